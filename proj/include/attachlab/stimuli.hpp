#pragma once

#include <optional>
#include <string>
#include <vector>

#include "attachlab/stimulus.hpp"

namespace attachlab::stimuli {

enum class Gender { Masculine, Feminine };

struct NounEntry {
  std::string singular;
  std::string plural;
  std::optional<Gender> gender;  // required for Spanish
};

// Preamble with two noun slots and a final RC-verb slot, e.g.
// "everybody ignored {N1} of {N2} that {V}". {N1}/{N2} expand to full noun
// phrases (determiner + noun); {V} must be the final token.
struct StimulusTemplate {
  std::string id;
  std::string language;  // "english" | "spanish"
  std::vector<std::string> tokens;

  void validate() const;
};

// TSV loaders. Nouns: singular, plural[, gender m|f]. Templates: id,
// language, text.
std::vector<NounEntry> load_noun_file(const std::string& path);
std::vector<StimulusTemplate> load_template_file(const std::string& path);

// Determiner + noun for one slot. English is invariant "the"; Spanish picks
// el/los/la/las by gender and number, with "de + el -> del" applied when the
// phrase follows "de".
std::vector<std::string> realize_np(const NounEntry& noun, bool plural,
                                    const std::string& language, bool after_de);

// Every template x ordered pair of distinct nouns x RC-verb number, emitted
// as two minimal pairs (the quadruple); |sentences| = T * n * (n-1) * 4.
std::vector<StimulusPair> expand_attachment_templates(
    const std::vector<StimulusTemplate>& templates, const std::vector<NounEntry>& nouns,
    const std::string& language);

// Same construction over blocked-attachment templates, where the lower
// nominal sits inside an intervening RC; the high-agree member is the
// grammatical one.
std::vector<StimulusPair> expand_blocked_templates(const std::vector<StimulusTemplate>& templates,
                                                   const std::vector<NounEntry>& nouns,
                                                   const std::string& language);

}  // namespace attachlab::stimuli
