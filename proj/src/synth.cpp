#include "attachlab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "attachlab/errors.hpp"

namespace attachlab::synth {

namespace {

const char* tag_name(Construction tag) {
  switch (tag) {
    case Construction::Filler: return "FILLER";
    case Construction::RcHigh: return "RC_HIGH";
    case Construction::RcLow: return "RC_LOW";
  }
  return "?";
}

Construction tag_from_name(const std::string& name) {
  if (name == "FILLER") return Construction::Filler;
  if (name == "RC_HIGH") return Construction::RcHigh;
  if (name == "RC_LOW") return Construction::RcLow;
  throw DataError("unknown construction tag '" + name + "'");
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

// Uniform noun form with independently uniform number.
const std::string& pick_noun(Rng& rng, const Lexicon& lex, bool& plural) {
  const auto& entry = rng.pick(lex.nouns);
  plural = rng.bernoulli(0.5);
  return plural ? entry.second : entry.first;
}

}  // namespace

void SynthConfig::validate() const {
  if (rc_count > corpus_size) throw ConfigError("rc_count exceeds corpus_size");
  if (high_proportion < 0.0 || high_proportion > 1.0) {
    throw ConfigError("high_proportion must be in [0,1]");
  }
  const auto high = static_cast<std::uint64_t>(std::llround(double(rc_count) * high_proportion));
  const auto low =
      static_cast<std::uint64_t>(std::llround(double(rc_count) * (1.0 - high_proportion)));
  if (high + low != rc_count) {
    throw ConfigError("high_proportion splits rc_count ambiguously");
  }
}

std::uint64_t SynthConfig::high_count() const {
  return static_cast<std::uint64_t>(std::llround(double(rc_count) * high_proportion));
}

Sentence sample_filler(Rng& rng, const Lexicon& lexicon) {
  lexicon.validate();
  Sentence s;
  const std::string& det = rng.pick(lexicon.determiners);

  const bool subject_pp = rng.bernoulli(0.5);
  const bool has_aux = rng.bernoulli(0.5);
  const bool has_object = rng.bernoulli(0.5);
  const bool trailing_pp = rng.bernoulli(0.5);

  bool subj_plural = false;
  s.tokens.push_back(det);
  s.tokens.push_back(pick_noun(rng, lexicon, subj_plural));
  if (subject_pp) {
    s.tokens.push_back(rng.pick(lexicon.prepositions));
    s.tokens.push_back(det);
    bool plural = false;
    s.tokens.push_back(pick_noun(rng, lexicon, plural));
  }
  if (has_aux) {
    const auto& aux = rng.pick(lexicon.auxiliaries);
    s.tokens.push_back(subj_plural ? aux.second : aux.first);
  }
  s.tokens.push_back(rng.pick(lexicon.verbs));
  if (has_object) {
    s.tokens.push_back(det);
    bool plural = false;
    s.tokens.push_back(pick_noun(rng, lexicon, plural));
  }
  if (trailing_pp) {
    s.tokens.push_back(rng.pick(lexicon.prepositions));
    s.tokens.push_back(det);
    bool plural = false;
    s.tokens.push_back(pick_noun(rng, lexicon, plural));
  }
  s.tag = Construction::Filler;
  return s;
}

Sentence sample_rc(Rng& rng, const Lexicon& lexicon, Attachment attachment) {
  lexicon.validate();
  Sentence s;
  const std::string& det = rng.pick(lexicon.determiners);

  bool subj_plural = false;
  s.tokens.push_back(det);
  s.tokens.push_back(pick_noun(rng, lexicon, subj_plural));
  const auto& aux = rng.pick(lexicon.auxiliaries);
  s.tokens.push_back(subj_plural ? aux.second : aux.first);
  s.tokens.push_back(rng.pick(lexicon.verbs));

  // The two object nominals differ in number, making attachment unambiguous.
  const bool high_plural = rng.bernoulli(0.5);
  const bool low_plural = !high_plural;
  const auto& high_entry = rng.pick(lexicon.nouns);
  const auto& low_entry = rng.pick(lexicon.nouns);

  s.tokens.push_back(det);
  s.high_noun_index = static_cast<int>(s.tokens.size());
  s.tokens.push_back(high_plural ? high_entry.second : high_entry.first);
  s.tokens.push_back("of");
  s.tokens.push_back(det);
  s.low_noun_index = static_cast<int>(s.tokens.size());
  s.tokens.push_back(low_plural ? low_entry.second : low_entry.first);
  s.tokens.push_back("that");

  const bool agree_plural = attachment == Attachment::High ? high_plural : low_plural;
  s.aux_index = static_cast<int>(s.tokens.size());
  s.tokens.push_back(agree_plural ? "were" : "was");
  s.tokens.push_back(rng.pick(lexicon.verbs));

  s.tag = attachment == Attachment::High ? Construction::RcHigh : Construction::RcLow;
  return s;
}

Corpus generate_corpus(const SynthConfig& config, const Lexicon& lexicon) {
  config.validate();
  lexicon.validate();
  Rng rng(config.seed);

  const std::uint64_t n_high = config.high_count();
  const std::uint64_t n_low = config.rc_count - n_high;
  const std::uint64_t n_filler = config.corpus_size - config.rc_count;

  Corpus corpus;
  corpus.reserve(config.corpus_size);
  std::unordered_set<std::string> seen;
  seen.reserve(config.corpus_size * 2);

  std::uint64_t draws = 0;
  const std::uint64_t draw_cap = 100 * config.corpus_size;
  auto emit = [&](auto&& sampler, std::uint64_t count) {
    for (std::uint64_t i = 0; i < count; ++i) {
      for (;;) {
        if (++draws > draw_cap) {
          throw DataError("corpus generation exceeded retry cap; lexicon too small for " +
                          std::to_string(config.corpus_size) + " unique sentences");
        }
        Sentence s = sampler();
        if (seen.insert(join(s.tokens)).second) {
          corpus.push_back(std::move(s));
          break;
        }
      }
    }
  };

  emit([&] { return sample_rc(rng, lexicon, Attachment::High); }, n_high);
  emit([&] { return sample_rc(rng, lexicon, Attachment::Low); }, n_low);
  emit([&] { return sample_filler(rng, lexicon); }, n_filler);

  rng.shuffle(corpus);
  return corpus;
}

std::vector<StimulusPair> generate_test_pairs(Rng& rng, const Lexicon& lexicon, std::size_t n) {
  if (n < 1) throw ConfigError("generate_test_pairs: n must be >= 1");
  lexicon.validate();

  std::vector<StimulusPair> pairs;
  pairs.reserve(n);
  std::unordered_set<std::string> seen;
  std::size_t attempts = 0;
  const std::size_t cap = 1000 * n + 1000;
  while (pairs.size() < n) {
    if (++attempts > cap) {
      throw DataError("generate_test_pairs: exhausted distinct lexical combinations");
    }
    // Shared frame, built once; the two members differ only in noun number.
    Sentence high = sample_rc(rng, lexicon, Attachment::High);
    // Rebuild the LOW member from the same frame: flip which nominal agrees
    // by swapping the number marking on the two object nouns.
    Sentence low = high;
    const auto find_entry = [&](const std::string& form) -> const std::pair<std::string, std::string>& {
      for (const auto& e : lexicon.nouns) {
        if (e.first == form || e.second == form) return e;
      }
      throw DataError("internal: noun form not in lexicon");
    };
    const auto& high_entry = find_entry(high.tokens[high.high_noun_index]);
    const auto& low_entry = find_entry(high.tokens[high.low_noun_index]);
    const bool high_was_plural = high.tokens[high.high_noun_index] == high_entry.second;
    low.tokens[low.high_noun_index] = high_was_plural ? high_entry.first : high_entry.second;
    low.tokens[low.low_noun_index] = high_was_plural ? low_entry.second : low_entry.first;
    low.tag = Construction::RcLow;

    StimulusPair pair;
    pair.language = "synthetic";
    pair.template_id = "synthetic_rc";
    pair.high_agree = high.tokens;
    pair.low_agree = low.tokens;
    pair.target_high = static_cast<std::size_t>(high.aux_index);
    pair.target_low = static_cast<std::size_t>(low.aux_index);

    if (!seen.insert(join(high.tokens)).second) continue;
    pair.item_id = "syn" + std::to_string(pairs.size() + 1);
    pair.validate();
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void save_corpus(const Corpus& corpus, const std::string& text_path,
                 const std::string& annotation_path) {
  std::ofstream text(text_path, std::ios::binary);
  if (!text) throw DataError("cannot write corpus file: " + text_path);
  std::ofstream ann(annotation_path, std::ios::binary);
  if (!ann) throw DataError("cannot write annotation file: " + annotation_path);
  ann << "line\ttag\thigh_noun\tlow_noun\taux\n";
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Sentence& s = corpus[i];
    text << join(s.tokens) << '\n';
    ann << i << '\t' << tag_name(s.tag) << '\t' << s.high_noun_index << '\t' << s.low_noun_index
        << '\t' << s.aux_index << '\n';
  }
}

Corpus load_corpus(const std::string& text_path, const std::string& annotation_path) {
  std::ifstream text(text_path);
  if (!text) throw DataError("cannot open corpus file: " + text_path);
  std::ifstream ann(annotation_path);
  if (!ann) throw DataError("cannot open annotation file: " + annotation_path);

  Corpus corpus;
  std::string line;
  while (std::getline(text, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Sentence s;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) s.tokens.push_back(tok);
    corpus.push_back(std::move(s));
  }

  std::getline(ann, line);  // header
  std::size_t rows = 0;
  while (std::getline(ann, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::size_t idx;
    std::string tag;
    int hi, lo, aux;
    char tab;
    ss >> idx >> std::ws >> tag >> hi >> lo >> aux;
    (void)tab;
    if (!ss || idx >= corpus.size()) {
      throw DataError(annotation_path + ": malformed or out-of-range annotation row");
    }
    corpus[idx].tag = tag_from_name(tag);
    corpus[idx].high_noun_index = hi;
    corpus[idx].low_noun_index = lo;
    corpus[idx].aux_index = aux;
    ++rows;
  }
  if (rows != corpus.size()) {
    throw DataError(annotation_path + ": annotation row count does not match corpus");
  }
  return corpus;
}

}  // namespace attachlab::synth
