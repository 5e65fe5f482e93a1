#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "attachlab/errors.hpp"
#include "attachlab/synth.hpp"

using namespace attachlab;

namespace {

struct LexSets {
  std::set<std::string> singulars, plurals, verbs, aux_sg, aux_pl, dets, preps;

  explicit LexSets(const Lexicon& lex) {
    for (const auto& [sg, pl] : lex.nouns) {
      singulars.insert(sg);
      plurals.insert(pl);
    }
    for (const auto& v : lex.verbs) verbs.insert(v);
    for (const auto& [sg, pl] : lex.auxiliaries) {
      aux_sg.insert(sg);
      aux_pl.insert(pl);
    }
    for (const auto& d : lex.determiners) dets.insert(d);
    for (const auto& p : lex.prepositions) preps.insert(p);
  }

  bool noun(const std::string& w) const { return singulars.count(w) || plurals.count(w); }
  bool aux(const std::string& w) const { return aux_sg.count(w) || aux_pl.count(w); }
};

// Rigid recognizer for the filler frame D N (P D N) (Aux) V (D N) (P D N):
// tries all 16 optional-constituent combinations.
bool matches_filler(const std::vector<std::string>& t, const LexSets& lex) {
  for (int mask = 0; mask < 16; ++mask) {
    const bool subject_pp = mask & 1, has_aux = mask & 2, has_object = mask & 4,
               trailing_pp = mask & 8;
    std::vector<int> kinds;  // 0=det 1=noun 2=prep 3=aux 4=verb
    kinds.insert(kinds.end(), {0, 1});
    if (subject_pp) kinds.insert(kinds.end(), {2, 0, 1});
    if (has_aux) kinds.push_back(3);
    kinds.push_back(4);
    if (has_object) kinds.insert(kinds.end(), {0, 1});
    if (trailing_pp) kinds.insert(kinds.end(), {2, 0, 1});
    if (kinds.size() != t.size()) continue;
    bool ok = true;
    for (std::size_t i = 0; i < t.size() && ok; ++i) {
      switch (kinds[i]) {
        case 0: ok = lex.dets.count(t[i]); break;
        case 1: ok = lex.noun(t[i]); break;
        case 2: ok = lex.preps.count(t[i]); break;
        case 3: ok = lex.aux(t[i]); break;
        case 4: ok = lex.verbs.count(t[i]); break;
      }
    }
    if (ok) return true;
  }
  return false;
}

// Rigid recognizer for the RC frame D N Aux V D N of D N that was/were V.
bool matches_rc(const std::vector<std::string>& t, const LexSets& lex) {
  return t.size() == 12 && lex.dets.count(t[0]) && lex.noun(t[1]) && lex.aux(t[2]) &&
         lex.verbs.count(t[3]) && lex.dets.count(t[4]) && lex.noun(t[5]) && t[6] == "of" &&
         lex.dets.count(t[7]) && lex.noun(t[8]) && t[9] == "that" &&
         (t[10] == "was" || t[10] == "were") && lex.verbs.count(t[11]);
}

std::string joined(const synth::Corpus& corpus) {
  std::string out;
  for (const auto& s : corpus) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) out += ' ';
      out += s.tokens[i];
    }
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("config validation rejects impossible and ambiguous mixtures") {
  CHECK_THROWS_AS((synth::SynthConfig{5, 10, 0.5, 0}.validate()), ConfigError);
  CHECK_THROWS_AS((synth::SynthConfig{100, 10, 1.2, 0}.validate()), ConfigError);
  CHECK_THROWS_AS((synth::SynthConfig{100, 10, -0.1, 0}.validate()), ConfigError);
  // 2 * 0.25 = 0.5 RC sentences cannot be split into whole HIGH/LOW counts.
  CHECK_THROWS_AS((synth::SynthConfig{100, 2, 0.25, 0}.validate()), ConfigError);
  CHECK_NOTHROW((synth::SynthConfig{100, 2, 0.5, 0}.validate()));
  CHECK(synth::SynthConfig{100, 20, 0.75, 0}.high_count() == 15);
}

TEST_CASE("every generated sentence matches its declared frame exactly") {
  const Lexicon lex = default_synthetic_lexicon();
  const LexSets sets(lex);
  const synth::Corpus corpus = synth::generate_corpus({2000, 600, 0.5, 7}, lex);
  REQUIRE(corpus.size() == 2000);
  for (const auto& s : corpus) {
    if (s.tag == synth::Construction::Filler) {
      CHECK(matches_filler(s.tokens, sets));
      CHECK(s.aux_index == -1);
    } else {
      REQUIRE(matches_rc(s.tokens, sets));
      CHECK(s.high_noun_index == 5);
      CHECK(s.low_noun_index == 8);
      CHECK(s.aux_index == 10);
    }
  }
}

TEST_CASE("RC attachment coding: aux number tracks the annotated noun") {
  const Lexicon lex = default_synthetic_lexicon();
  const LexSets sets(lex);
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto att = i % 2 ? synth::Attachment::High : synth::Attachment::Low;
    const auto s = synth::sample_rc(rng, lex, att);
    const bool high_plural = sets.plurals.count(s.tokens[s.high_noun_index]) > 0;
    const bool low_plural = sets.plurals.count(s.tokens[s.low_noun_index]) > 0;
    CHECK(high_plural != low_plural);  // numbers always contrast
    const bool aux_plural = s.tokens[s.aux_index] == "were";
    CHECK(aux_plural == (att == synth::Attachment::High ? high_plural : low_plural));
  }
}

TEST_CASE("filler optional constituents appear at the configured rate") {
  const Lexicon lex = default_synthetic_lexicon();
  const LexSets sets(lex);
  Rng rng(13);
  int with_aux = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto s = synth::sample_filler(rng, lex);
    for (const auto& tok : s.tokens) {
      if (sets.aux(tok)) {
        ++with_aux;
        break;
      }
    }
  }
  CHECK(std::abs(double(double(with_aux) / n) - double(0.5)) <= (0.02));
}

TEST_CASE("exact construction counts, including the zero-HIGH boundary") {
  const Lexicon lex = default_synthetic_lexicon();
  const auto count = [](const synth::Corpus& c, synth::Construction tag) {
    std::size_t n = 0;
    for (const auto& s : c) n += s.tag == tag;
    return n;
  };

  const auto mixed = synth::generate_corpus({2000, 600, 0.5, 3}, lex);
  CHECK(count(mixed, synth::Construction::RcHigh) == 300);
  CHECK(count(mixed, synth::Construction::RcLow) == 300);
  CHECK(count(mixed, synth::Construction::Filler) == 1400);

  const auto low_only = synth::generate_corpus({1000, 20, 0.0, 3}, lex);
  CHECK(count(low_only, synth::Construction::RcHigh) == 0);
  CHECK(count(low_only, synth::Construction::RcLow) == 20);
}

TEST_CASE("sentences are unique within a corpus") {
  const auto corpus = synth::generate_corpus({3000, 300, 1.0, 5}, default_synthetic_lexicon());
  std::set<std::string> seen;
  for (const auto& s : corpus) {
    std::string key;
    for (const auto& t : s.tokens) key += t + ' ';
    CHECK(seen.insert(key).second);
  }
}

TEST_CASE("generation is deterministic and files are byte-identical across runs") {
  const Lexicon lex = default_synthetic_lexicon();
  const synth::SynthConfig config{1500, 150, 0.5, 42};
  const auto a = synth::generate_corpus(config, lex);
  const auto b = synth::generate_corpus(config, lex);
  CHECK(joined(a) == joined(b));
  const auto c = synth::generate_corpus({1500, 150, 0.5, 43}, lex);
  CHECK(joined(a) != joined(c));

  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "attachlab_synth_test";
  fs::create_directories(dir);
  synth::save_corpus(a, (dir / "a.txt").string(), (dir / "a.ann").string());
  synth::save_corpus(b, (dir / "b.txt").string(), (dir / "b.ann").string());
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK(slurp(dir / "a.txt") == slurp(dir / "b.txt"));
  CHECK(slurp(dir / "a.ann") == slurp(dir / "b.ann"));

  const auto reloaded = synth::load_corpus((dir / "a.txt").string(), (dir / "a.ann").string());
  REQUIRE(reloaded.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(reloaded[i].tokens == a[i].tokens);
    CHECK(reloaded[i].tag == a[i].tag);
    CHECK(reloaded[i].aux_index == a[i].aux_index);
  }
  fs::remove_all(dir);
}

TEST_CASE("test pairs are minimal: shared frame, flipped noun numbers, shared aux") {
  const Lexicon lex = default_synthetic_lexicon();
  const LexSets sets(lex);
  Rng rng(17);
  const auto pairs = synth::generate_test_pairs(rng, lex, 100);
  REQUIRE(pairs.size() == 100);
  for (const auto& p : pairs) {
    REQUIRE(p.high_agree.size() == 12);
    REQUIRE(p.low_agree.size() == 12);
    CHECK(p.target_high == 10);
    CHECK(p.target_low == 10);
    CHECK(p.high_agree[10] == p.low_agree[10]);  // shared RC auxiliary
    for (std::size_t i = 0; i < 12; ++i) {
      if (i == 5 || i == 8) {
        CHECK(p.high_agree[i] != p.low_agree[i]);  // both nominals flip number
        CHECK(sets.plurals.count(p.high_agree[i]) != sets.plurals.count(p.low_agree[i]));
      } else {
        CHECK(p.high_agree[i] == p.low_agree[i]);
      }
    }
    // The shared aux agrees HIGH in one member and LOW in the other.
    const bool aux_plural = p.high_agree[10] == "were";
    CHECK(sets.plurals.count(p.high_agree[5]) == std::size_t(aux_plural));
    CHECK(sets.plurals.count(p.low_agree[8]) == std::size_t(aux_plural));
  }
}

TEST_CASE("a lexicon too small for the requested corpus errors out") {
  Lexicon tiny;
  tiny.nouns = {{"cat", "cats"}};
  tiny.verbs = {"ran"};
  tiny.auxiliaries = {{"was", "were"}};
  tiny.determiners = {"the"};
  tiny.prepositions = {"near"};
  CHECK_THROWS_AS(synth::generate_corpus({100000, 0, 0.0, 1}, tiny), DataError);
}
