#pragma once

#include <functional>
#include <string>
#include <vector>

#include "attachlab/corpus.hpp"
#include "attachlab/lm.hpp"
#include "attachlab/stimulus.hpp"

namespace attachlab::eval {

enum class Coding { Low, High, Tie };

const char* coding_name(Coding coding);

struct SurprisalRecord {
  std::string sentence_id;
  std::vector<double> surprisals;  // nats, one per token
  double target_surprisal = 0.0;
};

struct DeltaRecord {
  std::string pair_id;
  std::string template_id;
  std::string language;
  double surprisal_high_agree = 0.0;
  double surprisal_low_agree = 0.0;
  double delta = 0.0;  // high_agree - low_agree; positive => LOW bias
  Coding coding = Coding::Tie;
};

// Callback for OOV stimulus tokens (mapped to UNK, not an error).
using OovWarner = std::function<void(const std::string& token)>;

SurprisalRecord sequence_surprisal(const lm::Checkpoint& checkpoint, const Vocab& vocab,
                                   const std::vector<std::string>& tokens,
                                   const std::string& sentence_id = "",
                                   std::size_t target_index = SIZE_MAX,
                                   const OovWarner& warn = nullptr);

DeltaRecord attachment_delta(const lm::Checkpoint& checkpoint, const Vocab& vocab,
                             const StimulusPair& pair, const OovWarner& warn = nullptr);

struct AggregateReport {
  std::size_t n = 0;
  double mean_delta = 0.0;
  std::size_t low_count = 0;
  std::size_t high_count = 0;
  std::size_t tie_count = 0;
  double proportion_low = 0.0;   // over non-tie codings
  double proportion_high = 0.0;
};

AggregateReport aggregate_report(const std::vector<DeltaRecord>& deltas);

// Results CSV: pair_id, template_id, language, seed, surprisal_high_agree,
// surprisal_low_agree, delta_nats, coding.
void write_results_csv(const std::vector<DeltaRecord>& deltas, std::uint64_t seed,
                       const std::string& path, bool append = false);

// Inverse of write_results_csv; comment lines ("#") are skipped. If `seeds`
// is non-null it receives the seed column, row-aligned with the result.
std::vector<DeltaRecord> read_results_csv(const std::string& path,
                                          std::vector<std::uint64_t>* seeds = nullptr);

}  // namespace attachlab::eval
