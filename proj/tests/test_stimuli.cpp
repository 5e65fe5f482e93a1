#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "attachlab/errors.hpp"
#include "attachlab/stimuli.hpp"

using namespace attachlab;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "attachlab_stimuli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

stimuli::StimulusTemplate en_template(const std::string& id, const std::string& text) {
  stimuli::StimulusTemplate tmpl;
  tmpl.id = id;
  tmpl.language = "english";
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) tmpl.tokens.push_back(tok);
  return tmpl;
}

}  // namespace

TEST_CASE("noun-phrase realization: English and Spanish determiner systems") {
  const stimuli::NounEntry teacher{"teacher", "teachers", std::nullopt};
  CHECK(stimuli::realize_np(teacher, false, "english", false) ==
        std::vector<std::string>{"the", "teacher"});
  CHECK(stimuli::realize_np(teacher, true, "english", true) ==
        std::vector<std::string>{"the", "teachers"});

  const stimuli::NounEntry actor{"actor", "actores", stimuli::Gender::Masculine};
  const stimuli::NounEntry actriz{"actriz", "actrices", stimuli::Gender::Feminine};
  CHECK(stimuli::realize_np(actor, false, "spanish", false) ==
        std::vector<std::string>{"el", "actor"});
  CHECK(stimuli::realize_np(actor, true, "spanish", false) ==
        std::vector<std::string>{"los", "actores"});
  CHECK(stimuli::realize_np(actriz, false, "spanish", false) ==
        std::vector<std::string>{"la", "actriz"});
  CHECK(stimuli::realize_np(actriz, true, "spanish", false) ==
        std::vector<std::string>{"las", "actrices"});
  // "de + el" contracts to "del"; every other combination keeps "de".
  CHECK(stimuli::realize_np(actor, false, "spanish", true) ==
        std::vector<std::string>{"del", "actor"});
  CHECK(stimuli::realize_np(actor, true, "spanish", true) ==
        std::vector<std::string>{"de", "los", "actores"});
  CHECK(stimuli::realize_np(actriz, false, "spanish", true) ==
        std::vector<std::string>{"de", "la", "actriz"});

  const stimuli::NounEntry ungendered{"gato", "gatos", std::nullopt};
  CHECK_THROWS_AS(stimuli::realize_np(ungendered, false, "spanish", false), DataError);
}

TEST_CASE("template validation enforces slot structure") {
  CHECK_NOTHROW(en_template("t", "someone saw {N1} of {N2} that {V}").validate());
  CHECK_THROWS_AS(en_template("t", "someone saw {N1} that {V}").validate(), DataError);
  CHECK_THROWS_AS(en_template("t", "{N1} of {N2} {V} here").validate(), DataError);
  CHECK_THROWS_AS(en_template("t", "{N1} of {N2} and {N2} that {V}").validate(), DataError);
  auto bad_lang = en_template("t", "saw {N1} of {N2} that {V}");
  bad_lang.language = "french";
  CHECK_THROWS_AS(bad_lang.validate(), DataError);
}

TEST_CASE("count law: one template and two nouns yield exactly four pairs") {
  const std::vector<stimuli::StimulusTemplate> templates{
      en_template("t1", "everybody ignored {N1} of {N2} that {V}")};
  const std::vector<stimuli::NounEntry> nouns{{"nephew", "nephews", std::nullopt},
                                              {"teacher", "teachers", std::nullopt}};
  const auto pairs = stimuli::expand_attachment_templates(templates, nouns, "english");
  // T * n * (n-1) * 4 sentences = 1 * 2 * 1 * 4 = 8 sentences = 4 pairs.
  REQUIRE(pairs.size() == 4);

  std::set<std::string> ids;
  for (const auto& p : pairs) {
    CHECK(ids.insert(p.item_id).second);
    CHECK(p.high_agree.size() == p.low_agree.size());
    CHECK(p.target_high == p.high_agree.size() - 1);  // {V} is final
    CHECK(p.high_agree[p.target_high] == p.low_agree[p.target_low]);
  }

  // Full enumeration of one ordered noun pair, singular verb:
  // high-agree -> N1 singular ("nephew"), N2 plural; low-agree flips both.
  const auto it = std::find_if(pairs.begin(), pairs.end(), [](const StimulusPair& p) {
    return p.item_id == "t1:nephew:teacher:sg";
  });
  REQUIRE(it != pairs.end());
  CHECK(it->high_agree == std::vector<std::string>{"everybody", "ignored", "the", "nephew", "of",
                                                   "the", "teachers", "that", "was"});
  CHECK(it->low_agree == std::vector<std::string>{"everybody", "ignored", "the", "nephews", "of",
                                                  "the", "teacher", "that", "was"});
}

TEST_CASE("expansion degenerate cases") {
  const std::vector<stimuli::StimulusTemplate> templates{
      en_template("t1", "someone saw {N1} of {N2} that {V}")};
  CHECK(stimuli::expand_attachment_templates(templates,
                                             {{"nephew", "nephews", std::nullopt}}, "english")
            .empty());
  CHECK_THROWS_AS(stimuli::expand_attachment_templates({}, {}, "english"), ConfigError);
  CHECK_THROWS_AS(
      stimuli::expand_attachment_templates(templates, {{"a", "as", std::nullopt},
                                                       {"b", "bs", std::nullopt}},
                                           "spanish"),
      DataError);  // language mismatch
}

TEST_CASE("Spanish expansion handles the del contraction inside pairs") {
  stimuli::StimulusTemplate tmpl;
  tmpl.id = "es1";
  tmpl.language = "spanish";
  for (const char* tok : {"alguien", "vio", "{N1}", "de", "{N2}", "que", "{V}"}) {
    tmpl.tokens.push_back(tok);
  }
  const std::vector<stimuli::NounEntry> nouns{
      {"criado", "criados", stimuli::Gender::Masculine},
      {"actriz", "actrices", stimuli::Gender::Feminine}};
  const auto pairs = stimuli::expand_blocked_templates({tmpl}, nouns, "spanish");
  REQUIRE(pairs.size() == 4);  // 1 template x 2 ordered noun pairs x 2 verb numbers
  for (const auto& p : pairs) {
    CHECK((p.high_agree[p.target_high] == "estaba" || p.high_agree[p.target_high] == "estaban"));
    CHECK_NOTHROW(p.validate());
  }
  // N2 = masculine singular after "de" contracts, shortening that member.
  const auto it = std::find_if(pairs.begin(), pairs.end(), [](const StimulusPair& p) {
    return p.item_id == "es1:actriz:criado:pl";
  });
  REQUIRE(it != pairs.end());
  // high-agree: N1 plural + N2 singular -> "del criado".
  CHECK(it->high_agree == std::vector<std::string>{"alguien", "vio", "las", "actrices", "del",
                                                   "criado", "que", "estaban"});
  CHECK(it->low_agree == std::vector<std::string>{"alguien", "vio", "la", "actriz", "de", "los",
                                                  "criados", "que", "estaban"});
}

TEST_CASE("stimulus pair validation rejects malformed pairs") {
  StimulusPair pair;
  pair.item_id = "x";
  pair.language = "english";
  pair.high_agree = {"the", "boy", "that", "was"};
  pair.low_agree = {"the", "boys", "that", "was"};
  pair.target_high = pair.target_low = 3;
  CHECK_NOTHROW(pair.validate());

  auto short_member = pair;
  short_member.low_agree = {"boys", "that", "was"};
  short_member.target_low = 2;
  CHECK_THROWS_AS(short_member.validate(), DataError);  // English lengths must match

  auto bad_target = pair;
  bad_target.target_high = 9;
  CHECK_THROWS_AS(bad_target.validate(), DataError);

  auto mismatched = pair;
  mismatched.low_agree[3] = "were";
  CHECK_THROWS_AS(mismatched.validate(), DataError);
}

TEST_CASE("stimulus TSV files round-trip byte-identically") {
  const std::vector<stimuli::StimulusTemplate> templates{
      en_template("t1", "nobody warned {N1} of {N2} that {V}"),
      en_template("t2", "we visited {N1} of {N2} that {V}")};
  const std::vector<stimuli::NounEntry> nouns{{"woman", "women", std::nullopt},
                                              {"gymnast", "gymnasts", std::nullopt},
                                              {"hostage", "hostages", std::nullopt}};
  const auto pairs = stimuli::expand_attachment_templates(templates, nouns, "english");
  REQUIRE(pairs.size() == 2 * 3 * 2 * 2);

  const auto p1 = (temp_dir() / "stim1.tsv").string();
  const auto p2 = (temp_dir() / "stim2.tsv").string();
  save_stimulus_file(pairs, p1);
  const auto loaded = load_stimulus_file(p1);
  REQUIRE(loaded.size() == pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(loaded[i].item_id == pairs[i].item_id);
    CHECK(loaded[i].high_agree == pairs[i].high_agree);
    CHECK(loaded[i].low_agree == pairs[i].low_agree);
    CHECK(loaded[i].target_high == pairs[i].target_high);
  }
  save_stimulus_file(loaded, p2);
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("stimulus loader reports structural problems with line context") {
  const auto dir = temp_dir();
  const auto path = (dir / "bad.tsv").string();
  std::ofstream(path) << "item_id\ttemplate_id\tcondition\tlanguage\tsentence\ttarget_index\n"
                      << "i1\tt1\thigh_agree\tenglish\tthe boy that was\t3\n";
  CHECK_THROWS_WITH_AS(load_stimulus_file(path), doctest::Contains("expected 2"), DataError);

  const auto path2 = (dir / "bad2.tsv").string();
  std::ofstream(path2) << "item_id\ttemplate_id\tcondition\tlanguage\tsentence\ttarget_index\n"
                       << "i1\tt1\thigh_agree\tenglish\tthe boy that was\n";
  CHECK_THROWS_WITH_AS(load_stimulus_file(path2), doctest::Contains(":2:"), DataError);
}
