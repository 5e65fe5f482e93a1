#pragma once

#include <string>
#include <utility>
#include <vector>

namespace attachlab {

// Typed word inventory for the synthetic language. Loaded from a sectioned
// plain-text file:
//
//   [nouns]
//   hostage<TAB>hostages
//   [verbs]
//   eating
//   [auxiliaries]
//   was<TAB>were
//   [determiners]
//   the
//   [prepositions]
//   near
struct Lexicon {
  std::vector<std::pair<std::string, std::string>> nouns;  // (singular, plural)
  std::vector<std::string> verbs;
  std::vector<std::pair<std::string, std::string>> auxiliaries;  // (singular, plural)
  std::vector<std::string> determiners;
  std::vector<std::string> prepositions;

  // Throws ConfigError if any category is empty or any surface form repeats
  // within or across categories.
  void validate() const;
};

Lexicon load_lexicon(const std::string& path);
void save_lexicon(const Lexicon& lex, const std::string& path);

// The built-in default: 30 noun lemmas, 14 verbs, 2 auxiliaries,
// 1 determiner, 4 prepositions.
Lexicon default_synthetic_lexicon();

}  // namespace attachlab
