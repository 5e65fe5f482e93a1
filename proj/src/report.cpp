#include "attachlab/report.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "attachlab/errors.hpp"

namespace attachlab::report {

void write_proportions_csv(const std::vector<FigureCell>& cells, const std::string& provenance,
                           const std::string& path) {
  if (cells.empty()) throw ConfigError("write_proportions_csv: empty report");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write CSV: " + path);
  out << "# " << provenance << '\n';
  out << "cell,proportion_high,proportion_low\n";
  out << std::setprecision(12);
  for (const auto& cell : cells) {
    out << cell.label << ',' << cell.proportion_high << ',' << cell.proportion_low << '\n';
  }
}

void write_proportions_svg(const std::vector<FigureCell>& cells, const std::string& title,
                           const std::string& provenance, const std::string& path) {
  if (cells.empty()) throw ConfigError("write_proportions_svg: empty report");

  const double bar_w = 34.0;
  const double group_gap = 36.0;
  const double group_w = 2 * bar_w + 8.0;
  const double plot_h = 260.0;
  const double margin_left = 64.0;
  const double margin_top = 48.0;
  const double margin_bottom = 56.0;
  const double width = margin_left + cells.size() * (group_w + group_gap) + 24.0;
  const double height = margin_top + plot_h + margin_bottom;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write SVG: " + path);
  out << std::setprecision(6);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<!-- " << provenance << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
      << "font-family=\"sans-serif\">" << title << "</text>\n";

  // Axis + gridlines.
  for (int i = 0; i <= 4; ++i) {
    const double frac = i / 4.0;
    const double y = margin_top + plot_h * (1.0 - frac);
    out << "<line x1=\"" << margin_left - 6 << "\" y1=\"" << y << "\" x2=\""
        << width - 16 << "\" y2=\"" << y << "\" stroke=\"#cccccc\" stroke-width=\"0.6\"/>\n";
    out << "<text x=\"" << margin_left - 10 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << frac
        << "</text>\n";
  }

  double x = margin_left;
  for (const auto& cell : cells) {
    const double h_high = plot_h * std::clamp(cell.proportion_high, 0.0, 1.0);
    const double h_low = plot_h * std::clamp(cell.proportion_low, 0.0, 1.0);
    out << "<rect x=\"" << x << "\" y=\"" << margin_top + plot_h - h_high << "\" width=\"" << bar_w
        << "\" height=\"" << h_high << "\" fill=\"#4878a8\"/>\n";
    out << "<rect x=\"" << x + bar_w + 8 << "\" y=\"" << margin_top + plot_h - h_low
        << "\" width=\"" << bar_w << "\" height=\"" << h_low << "\" fill=\"#c06040\"/>\n";
    for (const auto& [seed_high, seed_low] : cell.per_seed) {
      const double yh = margin_top + plot_h * (1.0 - std::clamp(seed_high, 0.0, 1.0));
      const double yl = margin_top + plot_h * (1.0 - std::clamp(seed_low, 0.0, 1.0));
      out << "<line x1=\"" << x << "\" y1=\"" << yh << "\" x2=\"" << x + bar_w << "\" y2=\"" << yh
          << "\" stroke=\"#102040\" stroke-width=\"1.2\"/>\n";
      out << "<line x1=\"" << x + bar_w + 8 << "\" y1=\"" << yl << "\" x2=\""
          << x + 2 * bar_w + 8 << "\" y2=\"" << yl
          << "\" stroke=\"#401808\" stroke-width=\"1.2\"/>\n";
    }
    out << "<text x=\"" << x + group_w / 2 << "\" y=\"" << margin_top + plot_h + 18
        << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << cell.label
        << "</text>\n";
    x += group_w + group_gap;
  }

  // Legend.
  const double ly = height - 18.0;
  out << "<rect x=\"" << margin_left << "\" y=\"" << ly - 10 << "\" width=\"12\" height=\"12\" "
      << "fill=\"#4878a8\"/>\n";
  out << "<text x=\"" << margin_left + 18 << "\" y=\"" << ly
      << "\" font-size=\"11\" font-family=\"sans-serif\">HIGH attachment</text>\n";
  out << "<rect x=\"" << margin_left + 130 << "\" y=\"" << ly - 10
      << "\" width=\"12\" height=\"12\" fill=\"#c06040\"/>\n";
  out << "<text x=\"" << margin_left + 148 << "\" y=\"" << ly
      << "\" font-size=\"11\" font-family=\"sans-serif\">LOW attachment</text>\n";
  out << "</svg>\n";
}

void write_perplexity_table(const std::vector<PerplexityRow>& rows, const std::string& provenance,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write table: " + path);
  out << "# " << provenance << '\n';
  out << std::left << std::setw(28) << "configuration" << std::right << std::setw(10) << "mean"
      << std::setw(10) << "sd" << '\n';
  out << std::string(48, '-') << '\n';
  out << std::fixed << std::setprecision(2);
  for (const auto& row : rows) {
    out << std::left << std::setw(28) << row.label << std::right << std::setw(10) << row.mean
        << std::setw(10) << row.sd << '\n';
  }
}

}  // namespace attachlab::report
