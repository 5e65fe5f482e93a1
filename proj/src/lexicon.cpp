#include "attachlab/lexicon.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "attachlab/errors.hpp"

namespace attachlab {

void Lexicon::validate() const {
  if (nouns.empty()) throw ConfigError("lexicon: empty category 'nouns'");
  if (verbs.empty()) throw ConfigError("lexicon: empty category 'verbs'");
  if (auxiliaries.empty()) throw ConfigError("lexicon: empty category 'auxiliaries'");
  if (determiners.empty()) throw ConfigError("lexicon: empty category 'determiners'");
  if (prepositions.empty()) throw ConfigError("lexicon: empty category 'prepositions'");

  std::unordered_set<std::string> seen;
  auto add = [&](const std::string& form) {
    if (form.empty()) throw ConfigError("lexicon: empty surface form");
    if (!seen.insert(form).second) {
      throw ConfigError("lexicon: duplicate surface form '" + form + "'");
    }
  };
  for (const auto& [sg, pl] : nouns) {
    add(sg);
    add(pl);
  }
  for (const auto& v : verbs) add(v);
  for (const auto& [sg, pl] : auxiliaries) {
    add(sg);
    add(pl);
  }
  for (const auto& d : determiners) add(d);
  for (const auto& p : prepositions) add(p);
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, '\t')) out.push_back(field);
  return out;
}

}  // namespace

Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path);
  Lexicon lex;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto fields = split_tabs(line);
    auto want = [&](std::size_t n) {
      if (fields.size() != n) {
        throw DataError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(n) +
                        " tab-separated forms in [" + section + "]");
      }
    };
    if (section == "nouns") {
      want(2);
      lex.nouns.emplace_back(fields[0], fields[1]);
    } else if (section == "verbs") {
      want(1);
      lex.verbs.push_back(fields[0]);
    } else if (section == "auxiliaries") {
      want(2);
      lex.auxiliaries.emplace_back(fields[0], fields[1]);
    } else if (section == "determiners") {
      want(1);
      lex.determiners.push_back(fields[0]);
    } else if (section == "prepositions") {
      want(1);
      lex.prepositions.push_back(fields[0]);
    } else {
      throw DataError(path + ":" + std::to_string(lineno) + ": line outside a known section");
    }
  }
  lex.validate();
  return lex;
}

void save_lexicon(const Lexicon& lex, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write lexicon file: " + path);
  out << "[nouns]\n";
  for (const auto& [sg, pl] : lex.nouns) out << sg << '\t' << pl << '\n';
  out << "[verbs]\n";
  for (const auto& v : lex.verbs) out << v << '\n';
  out << "[auxiliaries]\n";
  for (const auto& [sg, pl] : lex.auxiliaries) out << sg << '\t' << pl << '\n';
  out << "[determiners]\n";
  for (const auto& d : lex.determiners) out << d << '\n';
  out << "[prepositions]\n";
  for (const auto& p : lex.prepositions) out << p << '\n';
}

Lexicon default_synthetic_lexicon() {
  Lexicon lex;
  lex.nouns = {
      {"nephew", "nephews"},   {"teacher", "teachers"}, {"hostage", "hostages"},
      {"woman", "women"},      {"gymnast", "gymnasts"}, {"player", "players"},
      {"lawyer", "lawyers"},   {"child", "children"},   {"doctor", "doctors"},
      {"soldier", "soldiers"}, {"singer", "singers"},   {"farmer", "farmers"},
      {"student", "students"}, {"pilot", "pilots"},     {"nurse", "nurses"},
      {"writer", "writers"},   {"dancer", "dancers"},   {"guard", "guards"},
      {"butler", "butlers"},   {"clerk", "clerks"},     {"sailor", "sailors"},
      {"artist", "artists"},   {"banker", "bankers"},   {"waiter", "waiters"},
      {"driver", "drivers"},   {"actor", "actors"},     {"judge", "judges"},
      {"tailor", "tailors"},   {"miner", "miners"},     {"baker", "bakers"},
  };
  lex.verbs = {"seen",     "met",     "eating",  "sleeping", "reading", "running", "helped",
               "watched",  "praised", "smiling", "waiting",  "ignored", "greeted", "laughing"};
  lex.auxiliaries = {{"was", "were"}, {"has", "had"}};
  lex.determiners = {"the"};
  lex.prepositions = {"near", "by", "behind", "under"};
  return lex;
}

}  // namespace attachlab
