#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace attachlab {

// A minimal pair: the two sentences differ only in which nominal carries the
// number agreeing with the (shared) RC-verb form. Surprisal is compared at
// the target token of each member.
//
// Member lengths are equal except for Spanish pairs where the masculine
// singular "de + el -> del" contraction removes one token on one side, so
// each member carries its own target index (the RC verb is always final).
struct StimulusPair {
  std::string item_id;
  std::string template_id;
  std::string language;  // "english", "spanish", "synthetic"
  std::vector<std::string> high_agree;  // RC verb agrees with the higher nominal
  std::vector<std::string> low_agree;   // RC verb agrees with the lower nominal
  std::size_t target_high = 0;
  std::size_t target_low = 0;

  // Throws DataError when the pair invariants fail (target token mismatch,
  // unexplained length difference).
  void validate() const;
};

std::vector<StimulusPair> load_stimulus_file(const std::string& path);
void save_stimulus_file(const std::vector<StimulusPair>& pairs, const std::string& path);

}  // namespace attachlab
