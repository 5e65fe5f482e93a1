#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "attachlab/lexicon.hpp"
#include "attachlab/rng.hpp"
#include "attachlab/stimulus.hpp"

namespace attachlab::synth {

enum class Construction { Filler, RcHigh, RcLow };

enum class Attachment { High, Low };

struct Sentence {
  std::vector<std::string> tokens;
  Construction tag = Construction::Filler;
  // For RC sentences: token indices of the two object nominals and the RC
  // auxiliary. -1 for fillers.
  int high_noun_index = -1;
  int low_noun_index = -1;
  int aux_index = -1;
};

struct SynthConfig {
  std::uint64_t corpus_size = 120000;
  std::uint64_t rc_count = 0;
  double high_proportion = 0.0;
  std::uint64_t seed = 0;

  // Throws ConfigError on rc_count > corpus_size, high_proportion outside
  // [0,1], or a rounding-ambiguous HIGH/LOW split.
  void validate() const;
  std::uint64_t high_count() const;  // round(rc_count * high_proportion)
};

// Filler template: D N (P D N) (Aux) V (D N) (P D N).
// Each optional constituent is included independently with probability 0.5;
// the auxiliary agrees in number with the subject.
Sentence sample_filler(Rng& rng, const Lexicon& lexicon);

// RC template: D N Aux V D N 'of' D N 'that' was/were V.
// The two object nominals differ in number; the RC auxiliary agrees with the
// higher nominal for HIGH attachment and the lower one for LOW.
Sentence sample_rc(Rng& rng, const Lexicon& lexicon, Attachment attachment);

using Corpus = std::vector<Sentence>;

// Exactly corpus_size unique sentences with exactly the requested RC counts,
// shuffled by seed. Duplicate draws are resampled, with a retry cap of
// 100 * corpus_size draws.
Corpus generate_corpus(const SynthConfig& config, const Lexicon& lexicon);

// Ambiguous RC test pairs built on template (7b): within a pair the RC
// auxiliary form is shared and only the number marking of the two object
// nominals flips. Lexical combinations are sampled uniformly, deduplicated.
std::vector<StimulusPair> generate_test_pairs(Rng& rng, const Lexicon& lexicon, std::size_t n);

// Corpus text file: one sentence per line, single-space-joined tokens.
// Annotation sidecar: TSV with line_number, tag, high/low nominal indices,
// aux index.
void save_corpus(const Corpus& corpus, const std::string& text_path,
                 const std::string& annotation_path);
Corpus load_corpus(const std::string& text_path, const std::string& annotation_path);

}  // namespace attachlab::synth
