#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attachlab/eval.hpp"
#include "attachlab/lexicon.hpp"
#include "attachlab/lm.hpp"
#include "attachlab/stats.hpp"

namespace attachlab::sweep {

// A sweep cell is one (high_proportion, seed) training configuration;
// completed cells are cached on disk by content hash and skipped on rerun.
struct ExperimentConfig {
  std::string kind = "synthetic-mixture";
  std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::uint64_t corpus_size = 120000;
  std::uint64_t rc_count = 12000;
  std::size_t test_pairs = 300;
  std::uint64_t test_pair_seed = 20201204;  // shared across cells
  std::string lexicon_path;  // empty -> built-in synthetic lexicon
  std::string profile = "desk";
  lm::LMConfig lm;  // per-cell seed is overridden
  std::size_t bonferroni_m = 6;
  std::size_t workers = 1;
  std::string output_dir = "sweep_out";

  void validate() const;
  std::uint64_t content_hash() const;  // ignores output_dir/workers
};

struct CellResult {
  double high_proportion = 0.0;
  std::uint64_t seed = 0;
  double valid_perplexity = 0.0;
  bool from_cache = false;
  std::vector<eval::DeltaRecord> deltas;
};

struct ExperimentReport {
  std::uint64_t config_hash = 0;
  std::string profile;
  std::vector<std::uint64_t> seeds;
  std::vector<CellResult> cells;  // grid-major, then seed
  std::vector<stats::TestResult> per_cell_stats;
};

ExperimentReport run_sweep(const ExperimentConfig& config);

struct ReplicationConfig {
  std::vector<std::string> checkpoint_paths;
  std::string vocab_path;
  std::vector<std::string> stimulus_paths;
  std::size_t bonferroni_m = 6;
  std::string output_dir = "replication_out";
};

// Evaluates every checkpoint on every stimulus file; per-item delta rows,
// pooled proportions and t/p/BF per stimulus set.
ExperimentReport run_replication(const ReplicationConfig& config);

// Writes the grouped-bar SVG, the underlying CSV, the perplexity summary
// table, and the stats CSV into `output_dir`.
void emit_figures(const ExperimentReport& report, const std::string& output_dir,
                  const std::string& title);

}  // namespace attachlab::sweep
