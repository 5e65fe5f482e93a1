#include "attachlab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "attachlab/corpus.hpp"
#include "attachlab/errors.hpp"
#include "attachlab/report.hpp"
#include "attachlab/synth.hpp"

namespace fs = std::filesystem;

namespace attachlab::sweep {

namespace {

std::uint64_t fnv64(const std::string& data, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << v;
  return ss.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::mutex g_log_mutex;

void log_line(const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::cerr << msg << '\n';
}

std::string prop_label(double p) {
  std::ostringstream ss;
  ss << "high=" << p;
  return ss.str();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("sweep: need at least one seed");
  if (grid.empty()) throw ConfigError("sweep: grid must be nonempty");
  if (test_pairs < 1) throw ConfigError("sweep: test_pairs must be >= 1");
  lm.validate();
  for (double p : grid) {
    synth::SynthConfig sc{corpus_size, rc_count, p, 0};
    sc.validate();
  }
}

std::uint64_t ExperimentConfig::content_hash() const {
  std::ostringstream ss;
  ss << kind << '|' << corpus_size << '|' << rc_count << '|' << test_pairs << '|'
     << test_pair_seed << '|' << profile << '|';
  for (double p : grid) ss << p << ',';
  ss << '|' << lm.layers << ',' << lm.embed_units << ',' << lm.hidden_units << ',' << lm.dropout
     << ',' << lm.batch_size << ',' << lm.initial_lr << ',' << lm.epochs << ',' << lm.bptt_len
     << ',' << lm.grad_clip << ',' << lm.lr_decay << ',' << lm.continuous;
  std::uint64_t h = fnv64(ss.str());
  if (!lexicon_path.empty()) h = fnv64(read_file(lexicon_path), h);
  return h;
}

namespace {

struct CellTask {
  double high_proportion;
  std::uint64_t seed;
  std::size_t index;
};

CellResult run_cell(const ExperimentConfig& config, const Lexicon& lexicon,
                    const std::vector<StimulusPair>& test_pairs, double high_proportion,
                    std::uint64_t seed, std::uint64_t cell_hash) {
  CellResult result;
  result.high_proportion = high_proportion;
  result.seed = seed;

  const fs::path cell_dir = fs::path(config.output_dir) / "cells" / hex(cell_hash);
  const fs::path done_path = cell_dir / "done";
  if (fs::exists(done_path) && read_file(done_path.string()) == hex(cell_hash)) {
    result.deltas = eval::read_results_csv((cell_dir / "results.csv").string());
    std::istringstream ss(read_file((cell_dir / "perplexity.txt").string()));
    ss >> result.valid_perplexity;
    result.from_cache = true;
    return result;
  }
  fs::create_directories(cell_dir);

  synth::SynthConfig sc{config.corpus_size, config.rc_count, high_proportion, seed};
  const synth::Corpus corpus = synth::generate_corpus(sc, lexicon);
  synth::save_corpus(corpus, (cell_dir / "corpus.txt").string(),
                     (cell_dir / "corpus.ann.tsv").string());

  TokenCorpus tokens;
  tokens.reserve(corpus.size());
  for (const auto& s : corpus) tokens.push_back(s.tokens);
  SplitSpec split_spec;
  split_spec.seed = seed;
  const Split split = split_corpus(tokens, split_spec);

  const Vocab vocab = Vocab::build(split.train, 50000);
  vocab.save((cell_dir / "vocab.txt").string());
  const IdCorpus train_ids = encode(split.train, vocab);
  const IdCorpus valid_ids = encode(split.valid, vocab);
  save_encoded_corpus(train_ids, vocab, (cell_dir / "train.bin").string());

  lm::LMConfig lm_config = config.lm;
  lm_config.seed = seed;
  const std::string tag = "[" + config.kind + " " + prop_label(high_proportion) +
                          " seed=" + std::to_string(seed) + "]";
  const lm::Checkpoint ckpt = lm::train(
      train_ids, valid_ids, lm_config, vocab.size(), vocab.hash(),
      [&](std::uint32_t epoch, double ppl, double lr) {
        std::ostringstream ss;
        ss << tag << " epoch " << epoch << " valid_ppl " << ppl << " lr " << lr;
        log_line(ss.str());
      });
  lm::save_checkpoint(ckpt, (cell_dir / "checkpoint.almc").string());
  result.valid_perplexity = ckpt.valid_ppl_history[ckpt.best_epoch];

  result.deltas.reserve(test_pairs.size());
  for (const auto& pair : test_pairs) {
    result.deltas.push_back(eval::attachment_delta(ckpt, vocab, pair));
  }
  eval::write_results_csv(result.deltas, seed, (cell_dir / "results.csv").string());
  {
    std::ofstream out(cell_dir / "perplexity.txt");
    out.precision(17);
    out << result.valid_perplexity << '\n';
  }
  std::ofstream marker(done_path);
  marker << hex(cell_hash);
  return result;
}

}  // namespace

ExperimentReport run_sweep(const ExperimentConfig& config) {
  config.validate();
  const std::uint64_t config_hash = config.content_hash();

  const Lexicon lexicon =
      config.lexicon_path.empty() ? default_synthetic_lexicon() : load_lexicon(config.lexicon_path);

  // Test pairs are shared across every cell so deltas are comparable.
  Rng pair_rng(config.test_pair_seed);
  const std::vector<StimulusPair> test_pairs =
      synth::generate_test_pairs(pair_rng, lexicon, config.test_pairs);

  std::vector<CellTask> tasks;
  for (double p : config.grid) {
    for (std::uint64_t seed : config.seeds) {
      tasks.push_back({p, seed, tasks.size()});
    }
  }

  ExperimentReport experiment;
  experiment.config_hash = config_hash;
  experiment.profile = config.profile;
  experiment.seeds = config.seeds;
  experiment.cells.resize(tasks.size());

  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  const std::size_t workers = std::max<std::size_t>(1, config.workers);
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const CellTask& task = tasks[i];
      std::ostringstream key;
      key << hex(config_hash) << '|' << task.high_proportion << '|' << task.seed;
      const std::uint64_t cell_hash = fnv64(key.str());
      try {
        experiment.cells[i] = run_cell(config, lexicon, test_pairs, task.high_proportion,
                                       task.seed, cell_hash);
      } catch (const std::exception& e) {
        // Record and keep going; other cells are independent.
        errors[i] = e.what();
        experiment.cells[i].high_proportion = task.high_proportion;
        experiment.cells[i].seed = task.seed;
        log_line("[cell failed] " + std::string(e.what()));
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool any_ok = false;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (errors[i].empty()) any_ok = true;
  }
  if (!any_ok) throw DataError("sweep: every cell failed");

  // Pooled stats per grid point (seeds concatenated).
  for (double p : config.grid) {
    std::vector<double> deltas;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].high_proportion == p && errors[i].empty()) {
        for (const auto& d : experiment.cells[i].deltas) deltas.push_back(d.delta);
      }
    }
    if (deltas.size() >= 2) {
      experiment.per_cell_stats.push_back(
          stats::analyze(config.kind + ":" + prop_label(p), deltas, config.bonferroni_m));
    }
  }
  return experiment;
}

ExperimentReport run_replication(const ReplicationConfig& config) {
  if (config.checkpoint_paths.empty()) throw ConfigError("replication: no checkpoints supplied");
  if (config.stimulus_paths.empty()) throw ConfigError("replication: no stimulus files supplied");

  const Vocab vocab = Vocab::load(config.vocab_path);
  fs::create_directories(config.output_dir);

  ExperimentReport experiment;
  std::ostringstream key;
  key << "replication|" << config.vocab_path;
  for (const auto& p : config.stimulus_paths) key << '|' << p;
  experiment.config_hash = fnv64(key.str());
  experiment.profile = "replication";

  std::size_t oov_warnings = 0;
  const auto warner = [&oov_warnings](const std::string& token) {
    if (++oov_warnings <= 20) {
      log_line("[oov] stimulus token '" + token + "' mapped to UNK");
    }
  };

  for (std::size_t file_index = 0; file_index < config.stimulus_paths.size(); ++file_index) {
    const std::string& stim_path = config.stimulus_paths[file_index];
    const auto pairs = load_stimulus_file(stim_path);
    if (pairs.empty()) throw DataError(stim_path + ": empty stimulus file");
    const std::string set_label = fs::path(stim_path).stem().string();

    std::vector<double> pooled;
    for (const auto& ckpt_path : config.checkpoint_paths) {
      const lm::Checkpoint ckpt = lm::load_checkpoint(ckpt_path);
      if (ckpt.vocab_hash != vocab.hash()) {
        throw DataError(ckpt_path + ": vocabulary hash mismatch with " + config.vocab_path);
      }
      CellResult cell;
      cell.high_proportion = double(file_index);
      cell.seed = ckpt.config.seed;
      cell.deltas.reserve(pairs.size());
      for (const auto& pair : pairs) {
        cell.deltas.push_back(eval::attachment_delta(ckpt, vocab, pair, warner));
      }
      for (const auto& d : cell.deltas) pooled.push_back(d.delta);

      const fs::path csv_path =
          fs::path(config.output_dir) / (set_label + "_seed" + std::to_string(cell.seed) + ".csv");
      eval::write_results_csv(cell.deltas, cell.seed, csv_path.string());
      experiment.seeds.push_back(cell.seed);
      experiment.cells.push_back(std::move(cell));
    }
    if (pooled.size() >= 2) {
      experiment.per_cell_stats.push_back(
          stats::analyze(set_label, pooled, config.bonferroni_m));
    }
  }
  if (oov_warnings > 20) {
    log_line("[oov] " + std::to_string(oov_warnings - 20) + " further warnings suppressed");
  }
  return experiment;
}

void emit_figures(const ExperimentReport& experiment, const std::string& output_dir,
                  const std::string& title) {
  if (experiment.cells.empty()) throw ConfigError("emit_figures: empty report");
  fs::create_directories(output_dir);

  std::ostringstream prov;
  prov << "provenance: config=" << hex(experiment.config_hash) << " profile="
       << experiment.profile << " seeds=";
  for (std::size_t i = 0; i < experiment.seeds.size(); ++i) {
    if (i) prov << '+';
    prov << experiment.seeds[i];
  }
  const std::string provenance = prov.str();

  // Group cells by grid value, preserving first-seen order.
  std::vector<double> groups;
  for (const auto& cell : experiment.cells) {
    if (std::find(groups.begin(), groups.end(), cell.high_proportion) == groups.end()) {
      groups.push_back(cell.high_proportion);
    }
  }

  std::vector<report::FigureCell> fig_cells;
  std::vector<report::PerplexityRow> ppl_rows;
  for (double g : groups) {
    report::FigureCell fig;
    fig.label = prop_label(g);
    std::vector<eval::DeltaRecord> pooled;
    std::vector<double> ppls;
    for (const auto& cell : experiment.cells) {
      if (cell.high_proportion != g || cell.deltas.empty()) continue;
      const auto agg = eval::aggregate_report(cell.deltas);
      fig.per_seed.emplace_back(agg.proportion_high, agg.proportion_low);
      pooled.insert(pooled.end(), cell.deltas.begin(), cell.deltas.end());
      if (cell.valid_perplexity > 0.0) ppls.push_back(cell.valid_perplexity);
    }
    if (pooled.empty()) continue;
    const auto agg = eval::aggregate_report(pooled);
    fig.proportion_high = agg.proportion_high;
    fig.proportion_low = agg.proportion_low;
    fig_cells.push_back(std::move(fig));

    if (!ppls.empty()) {
      double mean = 0.0;
      for (double v : ppls) mean += v;
      mean /= double(ppls.size());
      double ss = 0.0;
      for (double v : ppls) ss += (v - mean) * (v - mean);
      const double sd = ppls.size() > 1 ? std::sqrt(ss / double(ppls.size() - 1)) : 0.0;
      ppl_rows.push_back({prop_label(g), mean, sd});
    }
  }

  const fs::path dir(output_dir);
  report::write_proportions_svg(fig_cells, title, provenance, (dir / "proportions.svg").string());
  report::write_proportions_csv(fig_cells, provenance, (dir / "proportions.csv").string());
  if (!ppl_rows.empty()) {
    report::write_perplexity_table(ppl_rows, provenance, (dir / "perplexity_table.txt").string());
  }
  if (!experiment.per_cell_stats.empty()) {
    stats::write_stats_csv(experiment.per_cell_stats, (dir / "stats.csv").string());
  }

  // Combined per-seed delta rows.
  bool first = true;
  for (const auto& cell : experiment.cells) {
    if (cell.deltas.empty()) continue;
    eval::write_results_csv(cell.deltas, cell.seed, (dir / "results.csv").string(), !first);
    first = false;
  }
}

}  // namespace attachlab::sweep
