#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace attachlab {

using TokenCorpus = std::vector<std::vector<std::string>>;
using IdSentence = std::vector<std::uint32_t>;
using IdCorpus = std::vector<IdSentence>;

inline constexpr const char* kUnkToken = "⟨UNK⟩";  // ⟨UNK⟩

// Frequency-ranked token<->id mapping. Id 0 is always the UNK token; kept
// words follow in rank order (count descending, ties lexicographic).
class Vocab {
 public:
  Vocab() = default;

  static Vocab build(const TokenCorpus& corpus, std::size_t max_size);

  std::uint32_t unk_id() const { return 0; }
  std::uint32_t id_of(const std::string& word) const;
  const std::string& word_of(std::uint32_t id) const;
  std::size_t size() const { return words_.size(); }  // includes UNK

  // Sentence delimiter used in encoded binary corpora; deliberately outside
  // the word-id range.
  std::uint32_t eos_id() const { return static_cast<std::uint32_t>(words_.size()); }

  // FNV-1a over the word list; checkpoints refuse to evaluate against a
  // vocabulary with a different hash.
  std::uint64_t hash() const;

  // One word per line, rank order = id order, first line is the UNK token.
  void save(const std::string& path) const;
  static Vocab load(const std::string& path);

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

IdCorpus encode(const TokenCorpus& corpus, const Vocab& vocab);
TokenCorpus decode(const IdCorpus& corpus, const Vocab& vocab);

struct SplitSpec {
  double train_fraction = 0.8;
  double valid_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Split {
  TokenCorpus train, valid, test;
};

// Shuffle by seed, then partition with floor-based sizes; the remainder goes
// to train.
Split split_corpus(const TokenCorpus& corpus, const SplitSpec& spec);

TokenCorpus load_text_corpus(const std::string& path);
void save_text_corpus(const TokenCorpus& corpus, const std::string& path);

// Binary encoded corpus: header (magic, version, vocab hash, delimiter id,
// sentence count), then little-endian u32 ids with the delimiter after each
// sentence.
void save_encoded_corpus(const IdCorpus& corpus, const Vocab& vocab, const std::string& path);
IdCorpus load_encoded_corpus(const std::string& path, std::uint64_t expected_vocab_hash);

}  // namespace attachlab
