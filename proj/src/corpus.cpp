#include "attachlab/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "attachlab/errors.hpp"
#include "attachlab/rng.hpp"

namespace attachlab {

Vocab Vocab::build(const TokenCorpus& corpus, std::size_t max_size) {
  if (max_size < 1) throw ConfigError("vocab max_size must be >= 1");
  if (corpus.empty()) throw ConfigError("cannot build vocabulary from empty corpus");

  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& sentence : corpus) {
    for (const auto& token : sentence) ++counts[token];
  }
  std::vector<std::pair<std::string, std::uint64_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  // max_size caps the total size including the UNK slot.
  if (ranked.size() > max_size - 1) ranked.resize(max_size - 1);

  Vocab vocab;
  vocab.words_.push_back(kUnkToken);
  for (const auto& [word, count] : ranked) vocab.words_.push_back(word);
  for (std::uint32_t i = 0; i < vocab.words_.size(); ++i) vocab.ids_[vocab.words_[i]] = i;
  return vocab;
}

std::uint32_t Vocab::id_of(const std::string& word) const {
  auto it = ids_.find(word);
  return it == ids_.end() ? unk_id() : it->second;
}

const std::string& Vocab::word_of(std::uint32_t id) const {
  if (id >= words_.size()) throw DataError("vocab id out of range: " + std::to_string(id));
  return words_[id];
}

std::uint64_t Vocab::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& word : words_) {
    for (unsigned char c : word) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= '\n';
    h *= 1099511628211ull;
  }
  return h;
}

void Vocab::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocab file: " + path);
  for (const auto& word : words_) out << word << '\n';
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocab file: " + path);
  Vocab vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    vocab.words_.push_back(line);
  }
  if (vocab.words_.empty() || vocab.words_[0] != kUnkToken) {
    throw DataError(path + ": first vocab line must be the UNK token");
  }
  for (std::uint32_t i = 0; i < vocab.words_.size(); ++i) vocab.ids_[vocab.words_[i]] = i;
  return vocab;
}

IdCorpus encode(const TokenCorpus& corpus, const Vocab& vocab) {
  IdCorpus out;
  out.reserve(corpus.size());
  for (const auto& sentence : corpus) {
    IdSentence ids;
    ids.reserve(sentence.size());
    for (const auto& token : sentence) ids.push_back(vocab.id_of(token));
    out.push_back(std::move(ids));
  }
  return out;
}

TokenCorpus decode(const IdCorpus& corpus, const Vocab& vocab) {
  TokenCorpus out;
  out.reserve(corpus.size());
  for (const auto& ids : corpus) {
    std::vector<std::string> sentence;
    sentence.reserve(ids.size());
    for (auto id : ids) sentence.push_back(vocab.word_of(id));
    out.push_back(std::move(sentence));
  }
  return out;
}

void SplitSpec::validate() const {
  if (train_fraction < 0 || valid_fraction < 0 || test_fraction < 0) {
    throw ConfigError("split fractions must be non-negative");
  }
  if (std::abs(train_fraction + valid_fraction + test_fraction - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
}

Split split_corpus(const TokenCorpus& corpus, const SplitSpec& spec) {
  spec.validate();
  if (corpus.size() < 10) throw ConfigError("corpus too small to split (need >= 10 sentences)");

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed);
  rng.shuffle(order);

  const std::size_t n = corpus.size();
  const std::size_t n_valid = static_cast<std::size_t>(std::floor(double(n) * spec.valid_fraction));
  const std::size_t n_test = static_cast<std::size_t>(std::floor(double(n) * spec.test_fraction));
  const std::size_t n_train = n - n_valid - n_test;

  Split split;
  split.train.reserve(n_train);
  split.valid.reserve(n_valid);
  split.test.reserve(n_test);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = corpus[order[i]];
    if (i < n_train) {
      split.train.push_back(s);
    } else if (i < n_train + n_valid) {
      split.valid.push_back(s);
    } else {
      split.test.push_back(s);
    }
  }
  return split;
}

TokenCorpus load_text_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  TokenCorpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> sentence;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) sentence.push_back(tok);
    corpus.push_back(std::move(sentence));
  }
  return corpus;
}

void save_text_corpus(const TokenCorpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file: " + path);
  for (const auto& sentence : corpus) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (i) out << ' ';
      out << sentence[i];
    }
    out << '\n';
  }
}

namespace {

constexpr char kEncMagic[4] = {'A', 'E', 'N', 'C'};
constexpr std::uint16_t kEncVersion = 1;

template <typename T>
void write_le(std::ofstream& out, T value) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = (value >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!in) throw DataError("truncated encoded corpus");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= T(buf[i]) << (8 * i);
  return value;
}

}  // namespace

void save_encoded_corpus(const IdCorpus& corpus, const Vocab& vocab, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write encoded corpus: " + path);
  out.write(kEncMagic, 4);
  write_le<std::uint16_t>(out, kEncVersion);
  write_le<std::uint64_t>(out, vocab.hash());
  write_le<std::uint32_t>(out, vocab.eos_id());
  write_le<std::uint64_t>(out, corpus.size());
  for (const auto& sentence : corpus) {
    for (auto id : sentence) write_le<std::uint32_t>(out, id);
    write_le<std::uint32_t>(out, vocab.eos_id());
  }
}

IdCorpus load_encoded_corpus(const std::string& path, std::uint64_t expected_vocab_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open encoded corpus: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kEncMagic, 4) != 0) {
    throw DataError(path + ": not an encoded corpus file");
  }
  const auto version = read_le<std::uint16_t>(in);
  if (version != kEncVersion) throw DataError(path + ": unsupported format version");
  const auto hash = read_le<std::uint64_t>(in);
  if (expected_vocab_hash != 0 && hash != expected_vocab_hash) {
    throw DataError(path + ": vocabulary hash mismatch");
  }
  const auto delimiter = read_le<std::uint32_t>(in);
  const auto count = read_le<std::uint64_t>(in);

  IdCorpus corpus;
  corpus.reserve(count);
  IdSentence current;
  while (corpus.size() < count) {
    const auto id = read_le<std::uint32_t>(in);
    if (id == delimiter) {
      corpus.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(id);
    }
  }
  return corpus;
}

}  // namespace attachlab
