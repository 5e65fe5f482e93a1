#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "attachlab/errors.hpp"
#include "attachlab/report.hpp"

using namespace attachlab;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "attachlab_report_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<report::FigureCell> sample_cells() {
  report::FigureCell a;
  a.label = "high=0";
  a.proportion_high = 0.19;
  a.proportion_low = 0.81;
  a.per_seed = {{0.18, 0.82}, {0.20, 0.80}};
  report::FigureCell b;
  b.label = "high=1";
  b.proportion_high = 0.94;
  b.proportion_low = 0.06;
  return {a, b};
}

}  // namespace

TEST_CASE("proportions CSV embeds provenance and reads back the exact values") {
  const auto path = temp_dir() / "proportions.csv";
  report::write_proportions_csv(sample_cells(), "provenance: config=abc seeds=1+2",
                                path.string());

  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "# provenance: config=abc seeds=1+2");
  REQUIRE(std::getline(in, line));
  CHECK(line == "cell,proportion_high,proportion_low");

  // Rendering audit: parse the rows back and compare against the inputs.
  struct Row { std::string label; double high, low; };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    Row row;
    std::string field;
    std::getline(ss, row.label, ',');
    std::getline(ss, field, ',');
    row.high = std::stod(field);
    std::getline(ss, field, ',');
    row.low = std::stod(field);
    rows.push_back(row);
  }
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].label == "high=0");
  CHECK(rows[0].high == doctest::Approx(0.19));
  CHECK(rows[0].low == doctest::Approx(0.81));
  CHECK(rows[0].high + rows[0].low == doctest::Approx(1.0));
  CHECK(rows[1].high == doctest::Approx(0.94));

  CHECK_THROWS_AS(report::write_proportions_csv({}, "p", (temp_dir() / "x.csv").string()),
                  ConfigError);
}

TEST_CASE("SVG figure is well-formed and carries every bar group") {
  const auto path = temp_dir() / "figure.svg";
  report::write_proportions_svg(sample_cells(), "attachment proportions",
                                "provenance: config=abc seeds=1+2", path.string());
  const std::string svg = slurp(path);
  CHECK(svg.find("<?xml") == 0);
  CHECK(svg.find("<!-- provenance: config=abc seeds=1+2 -->") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("high=0") != std::string::npos);
  CHECK(svg.find("high=1") != std::string::npos);
  CHECK(svg.find("HIGH attachment") != std::string::npos);

  // Two bars per group plus the legend swatches.
  std::size_t rects = 0;
  for (std::size_t pos = svg.find("<rect"); pos != std::string::npos;
       pos = svg.find("<rect", pos + 1)) {
    ++rects;
  }
  CHECK(rects == 2 * 2 + 2);

  // Single-cell report still renders.
  const auto single = temp_dir() / "single.svg";
  report::write_proportions_svg({sample_cells()[0]}, "t", "p", single.string());
  CHECK(slurp(single).find("</svg>") != std::string::npos);
}

TEST_CASE("perplexity table formats mean/sd rows at two decimals") {
  const auto path = temp_dir() / "table.txt";
  report::write_perplexity_table({{"desk 2x128", 4.6222, 0.0301}, {"other", 12.5, 0.0}},
                                 "provenance: x", path.string());
  const std::string table = slurp(path);
  CHECK(table.find("# provenance: x") == 0);
  CHECK(table.find("configuration") != std::string::npos);
  CHECK(table.find("desk 2x128") != std::string::npos);
  CHECK(table.find("4.62") != std::string::npos);
  CHECK(table.find("0.03") != std::string::npos);
  CHECK(table.find("12.50") != std::string::npos);
}

TEST_CASE("report files are byte-identical across reruns with the same inputs") {
  const auto dir = temp_dir();
  report::write_proportions_svg(sample_cells(), "t", "p", (dir / "r1.svg").string());
  report::write_proportions_svg(sample_cells(), "t", "p", (dir / "r2.svg").string());
  CHECK(slurp(dir / "r1.svg") == slurp(dir / "r2.svg"));
  report::write_proportions_csv(sample_cells(), "p", (dir / "r1.csv").string());
  report::write_proportions_csv(sample_cells(), "p", (dir / "r2.csv").string());
  CHECK(slurp(dir / "r1.csv") == slurp(dir / "r2.csv"));
}
