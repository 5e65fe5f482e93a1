#include "attachlab/stimuli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "attachlab/errors.hpp"

namespace attachlab::stimuli {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, '\t')) out.push_back(field);
  return out;
}

const std::string& rc_verb(const std::string& language, bool plural) {
  static const std::string en_sg = "was", en_pl = "were";
  static const std::string es_sg = "estaba", es_pl = "estaban";
  if (language == "spanish") return plural ? es_pl : es_sg;
  return plural ? en_pl : en_sg;
}

}  // namespace

void StimulusTemplate::validate() const {
  int n1 = 0, n2 = 0, v = 0;
  for (const auto& tok : tokens) {
    if (tok == "{N1}") ++n1;
    if (tok == "{N2}") ++n2;
    if (tok == "{V}") ++v;
  }
  if (n1 != 1 || n2 != 1 || v != 1) {
    throw DataError("template " + id + ": needs exactly one {N1}, {N2} and {V}");
  }
  if (tokens.empty() || tokens.back() != "{V}") {
    throw DataError("template " + id + ": {V} must be the final token");
  }
  if (language != "english" && language != "spanish") {
    throw DataError("template " + id + ": unknown language '" + language + "'");
  }
}

std::vector<NounEntry> load_noun_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open noun file: " + path);
  std::vector<NounEntry> nouns;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": noun entry needs singular and plural forms");
    }
    NounEntry entry{fields[0], fields[1], std::nullopt};
    if (fields.size() >= 3 && !fields[2].empty()) {
      if (fields[2] == "m") {
        entry.gender = Gender::Masculine;
      } else if (fields[2] == "f") {
        entry.gender = Gender::Feminine;
      } else {
        throw DataError(path + ":" + std::to_string(lineno) + ": gender must be 'm' or 'f'");
      }
    }
    if (entry.singular == entry.plural) {
      throw DataError(path + ":" + std::to_string(lineno) + ": forms of '" + entry.singular +
                      "' are not distinct");
    }
    nouns.push_back(std::move(entry));
  }
  return nouns;
}

std::vector<StimulusTemplate> load_template_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open template file: " + path);
  std::vector<StimulusTemplate> templates;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected id, language, text");
    }
    StimulusTemplate tmpl;
    tmpl.id = fields[0];
    tmpl.language = fields[1];
    std::istringstream ss(fields[2]);
    std::string tok;
    while (ss >> tok) tmpl.tokens.push_back(tok);
    tmpl.validate();
    templates.push_back(std::move(tmpl));
  }
  return templates;
}

std::vector<std::string> realize_np(const NounEntry& noun, bool plural,
                                    const std::string& language, bool after_de) {
  const std::string& form = plural ? noun.plural : noun.singular;
  if (language == "english") {
    return {"the", form};
  }
  if (language != "spanish") throw ConfigError("realize_np: unknown language '" + language + "'");
  if (!noun.gender) {
    throw DataError("noun '" + noun.singular + "': Spanish realization requires a gender");
  }
  const bool masc = *noun.gender == Gender::Masculine;
  const std::string det = masc ? (plural ? "los" : "el") : (plural ? "las" : "la");
  if (after_de) {
    if (masc && !plural) return {"del", form};
    return {"de", det, form};
  }
  return {det, form};
}

namespace {

struct Realization {
  std::vector<std::string> tokens;
  std::size_t target = 0;
};

Realization realize_template(const StimulusTemplate& tmpl, const NounEntry& n1, bool n1_plural,
                             const NounEntry& n2, bool n2_plural, bool verb_plural) {
  Realization out;
  for (const auto& tok : tmpl.tokens) {
    if (tok == "{N1}" || tok == "{N2}") {
      const NounEntry& noun = tok == "{N1}" ? n1 : n2;
      const bool plural = tok == "{N1}" ? n1_plural : n2_plural;
      bool after_de = false;
      if (tmpl.language == "spanish" && !out.tokens.empty() && out.tokens.back() == "de") {
        after_de = true;
        out.tokens.pop_back();  // realize_np re-emits de/del
      }
      for (auto& np_tok : realize_np(noun, plural, tmpl.language, after_de)) {
        out.tokens.push_back(std::move(np_tok));
      }
    } else if (tok == "{V}") {
      out.target = out.tokens.size();
      out.tokens.push_back(rc_verb(tmpl.language, verb_plural));
    } else {
      out.tokens.push_back(tok);
    }
  }
  return out;
}

std::vector<StimulusPair> expand(const std::vector<StimulusTemplate>& templates,
                                 const std::vector<NounEntry>& nouns,
                                 const std::string& language) {
  if (templates.empty()) throw ConfigError("expand: no templates");
  if (nouns.size() < 2) return {};

  std::vector<StimulusPair> pairs;
  pairs.reserve(templates.size() * nouns.size() * (nouns.size() - 1) * 2);
  for (const auto& tmpl : templates) {
    if (tmpl.language != language) {
      throw DataError("template " + tmpl.id + " is " + tmpl.language + ", expected " + language);
    }
    for (std::size_t i = 0; i < nouns.size(); ++i) {
      for (std::size_t j = 0; j < nouns.size(); ++j) {
        if (i == j) continue;  // reflexive pairs excluded
        for (int verb_plural = 0; verb_plural < 2; ++verb_plural) {
          const bool vp = verb_plural != 0;
          // high-agree: N1 matches the RC verb number, N2 mismatches.
          Realization high = realize_template(tmpl, nouns[i], vp, nouns[j], !vp, vp);
          Realization low = realize_template(tmpl, nouns[i], !vp, nouns[j], vp, vp);
          StimulusPair pair;
          pair.item_id = tmpl.id + ":" + nouns[i].singular + ":" + nouns[j].singular +
                         (vp ? ":pl" : ":sg");
          pair.template_id = tmpl.id;
          pair.language = language;
          pair.high_agree = std::move(high.tokens);
          pair.low_agree = std::move(low.tokens);
          pair.target_high = high.target;
          pair.target_low = low.target;
          pair.validate();
          pairs.push_back(std::move(pair));
        }
      }
    }
  }
  return pairs;
}

}  // namespace

std::vector<StimulusPair> expand_attachment_templates(
    const std::vector<StimulusTemplate>& templates, const std::vector<NounEntry>& nouns,
    const std::string& language) {
  return expand(templates, nouns, language);
}

std::vector<StimulusPair> expand_blocked_templates(const std::vector<StimulusTemplate>& templates,
                                                   const std::vector<NounEntry>& nouns,
                                                   const std::string& language) {
  return expand(templates, nouns, language);
}

}  // namespace attachlab::stimuli
