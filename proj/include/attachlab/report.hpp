#pragma once

#include <string>
#include <utility>
#include <vector>

namespace attachlab::report {

// One bar group in the HIGH/LOW proportion figure.
struct FigureCell {
  std::string label;
  double proportion_high = 0.0;
  double proportion_low = 0.0;
  // Optional per-seed overlays, (high, low) per seed.
  std::vector<std::pair<double, double>> per_seed;
};

struct PerplexityRow {
  std::string label;
  double mean = 0.0;
  double sd = 0.0;
};

// Standalone vector-graphics bar chart of HIGH/LOW proportions with per-seed
// overlay ticks. `provenance` is embedded verbatim as a comment.
void write_proportions_svg(const std::vector<FigureCell>& cells, const std::string& title,
                           const std::string& provenance, const std::string& path);

void write_proportions_csv(const std::vector<FigureCell>& cells, const std::string& provenance,
                           const std::string& path);

// Plain-text mean/sd table of validation perplexities.
void write_perplexity_table(const std::vector<PerplexityRow>& rows, const std::string& provenance,
                            const std::string& path);

}  // namespace attachlab::report
