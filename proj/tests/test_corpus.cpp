#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "attachlab/corpus.hpp"
#include "attachlab/errors.hpp"

using namespace attachlab;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "attachlab_corpus_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("vocabulary ranks by count, breaking ties lexicographically") {
  const TokenCorpus corpus{{"b", "b", "b"}, {"c", "c"}, {"a", "a"}, {"d"}};
  const Vocab vocab = Vocab::build(corpus, 100);
  REQUIRE(vocab.size() == 5);  // UNK + 4 words
  CHECK(vocab.word_of(0) == kUnkToken);
  CHECK(vocab.word_of(1) == "b");   // count 3
  CHECK(vocab.word_of(2) == "a");   // count 2, ties with c, 'a' < 'c'
  CHECK(vocab.word_of(3) == "c");
  CHECK(vocab.word_of(4) == "d");
  CHECK(vocab.id_of("b") == 1);
  CHECK(vocab.id_of("zebra") == vocab.unk_id());
  CHECK(vocab.eos_id() == 5);
}

TEST_CASE("max_size truncates the tail, keeping the most frequent words") {
  const TokenCorpus corpus{{"x", "x", "x", "y", "y", "z"}};
  const Vocab vocab = Vocab::build(corpus, 3);  // UNK + 2 slots
  REQUIRE(vocab.size() == 3);
  CHECK(vocab.id_of("x") == 1);
  CHECK(vocab.id_of("y") == 2);
  CHECK(vocab.id_of("z") == vocab.unk_id());
}

TEST_CASE("encode/decode round-trips in-vocabulary text and maps OOV to UNK") {
  const TokenCorpus train{{"the", "cat", "sat"}, {"the", "dog"}};
  const Vocab vocab = Vocab::build(train, 100);
  const TokenCorpus input{{"the", "wombat", "sat"}};
  const IdCorpus ids = encode(input, vocab);
  REQUIRE(ids.size() == 1);
  REQUIRE(ids[0].size() == 3);  // encoding never changes sentence length
  CHECK(ids[0][1] == vocab.unk_id());
  const TokenCorpus back = decode(ids, vocab);
  CHECK(back[0] == std::vector<std::string>{"the", kUnkToken, "sat"});

  const IdCorpus round = encode(decode(encode(train, vocab), vocab), vocab);
  CHECK(round == encode(train, vocab));
}

TEST_CASE("vocabulary file round-trip preserves ids and hash") {
  const TokenCorpus corpus{{"alpha", "beta", "beta", "gamma"}};
  const Vocab vocab = Vocab::build(corpus, 100);
  const auto path = (temp_dir() / "vocab.txt").string();
  vocab.save(path);
  const Vocab loaded = Vocab::load(path);
  CHECK(loaded.size() == vocab.size());
  CHECK(loaded.hash() == vocab.hash());
  for (std::uint32_t id = 0; id < vocab.size(); ++id) {
    CHECK(loaded.word_of(id) == vocab.word_of(id));
  }

  // A file whose first line is not the UNK token is rejected.
  const auto bad = (temp_dir() / "bad_vocab.txt").string();
  std::ofstream(bad) << "alpha\nbeta\n";
  CHECK_THROWS_AS(Vocab::load(bad), DataError);
}

TEST_CASE("splits use floor sizes for valid/test and give train the remainder") {
  TokenCorpus corpus;
  for (int i = 0; i < 100; ++i) corpus.push_back({"s" + std::to_string(i)});
  const Split s100 = split_corpus(corpus, {0.8, 0.1, 0.1, 9});
  CHECK(s100.train.size() == 80);
  CHECK(s100.valid.size() == 10);
  CHECK(s100.test.size() == 10);

  corpus.push_back({"s100"});
  const Split s101 = split_corpus(corpus, {0.8, 0.1, 0.1, 9});
  CHECK(s101.train.size() == 81);
  CHECK(s101.valid.size() == 10);
  CHECK(s101.test.size() == 10);

  // Partition: every sentence lands in exactly one part.
  std::set<std::string> seen;
  for (const auto* part : {&s101.train, &s101.valid, &s101.test}) {
    for (const auto& sent : *part) CHECK(seen.insert(sent[0]).second);
  }
  CHECK(seen.size() == 101);

  CHECK_THROWS_AS(split_corpus(corpus, {0.8, 0.1, 0.2, 9}), ConfigError);
}

TEST_CASE("splitting is deterministic in the seed") {
  TokenCorpus corpus;
  for (int i = 0; i < 50; ++i) corpus.push_back({"w" + std::to_string(i)});
  const Split a = split_corpus(corpus, {0.8, 0.1, 0.1, 4});
  const Split b = split_corpus(corpus, {0.8, 0.1, 0.1, 4});
  CHECK(a.train == b.train);
  CHECK(a.valid == b.valid);
  const Split c = split_corpus(corpus, {0.8, 0.1, 0.1, 5});
  CHECK(a.train != c.train);
}

TEST_CASE("text corpus file round-trip") {
  const TokenCorpus corpus{{"one", "two"}, {"three"}};
  const auto path = (temp_dir() / "corpus.txt").string();
  save_text_corpus(corpus, path);
  CHECK(load_text_corpus(path) == corpus);
  CHECK(slurp(path) == "one two\nthree\n");
}

TEST_CASE("encoded binary corpus: round-trip, delimiter audit, hash guard") {
  const TokenCorpus train{{"a", "b"}, {"b", "c", "a"}};
  const Vocab vocab = Vocab::build(train, 100);
  const IdCorpus ids = encode(train, vocab);
  const auto path = (temp_dir() / "corpus.bin").string();
  save_encoded_corpus(ids, vocab, path);

  const IdCorpus back = load_encoded_corpus(path, vocab.hash());
  CHECK(back == ids);

  // Stream length: tokens + one delimiter per sentence, 4 bytes each, after
  // the fixed header (magic 4 + version 2 + hash 8 + delimiter 4 + count 8).
  const std::size_t tokens = 5;
  CHECK(fs::file_size(path) == 26 + 4 * (tokens + ids.size()));

  CHECK_THROWS_AS(load_encoded_corpus(path, vocab.hash() + 1), DataError);

  // Saving twice is byte-identical.
  const auto path2 = (temp_dir() / "corpus2.bin").string();
  save_encoded_corpus(ids, vocab, path2);
  CHECK(slurp(path) == slurp(path2));
}
