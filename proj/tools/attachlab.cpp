// Command-line front end: corpus generation, vocabulary building, training,
// stimulus expansion, evaluation, statistics, sweeps, and report emission.
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "attachlab/corpus.hpp"
#include "attachlab/errors.hpp"
#include "attachlab/eval.hpp"
#include "attachlab/kernels.hpp"
#include "attachlab/lexicon.hpp"
#include "attachlab/lm.hpp"
#include "attachlab/report.hpp"
#include "attachlab/stats.hpp"
#include "attachlab/stimuli.hpp"
#include "attachlab/sweep.hpp"
#include "attachlab/synth.hpp"

namespace fs = std::filesystem;
using namespace attachlab;

namespace {

Lexicon lexicon_or_default(const std::string& path) {
  return path.empty() ? default_synthetic_lexicon() : load_lexicon(path);
}

void add_lm_flags(CLI::App* cmd, lm::LMConfig& config) {
  cmd->add_option("--layers", config.layers, "LSTM layer count");
  cmd->add_option("--embed-units", config.embed_units, "embedding width");
  cmd->add_option("--hidden-units", config.hidden_units, "hidden width per layer");
  cmd->add_option("--dropout", config.dropout, "dropout fraction");
  cmd->add_option("--batch-size", config.batch_size, "minibatch size");
  cmd->add_option("--initial-lr", config.initial_lr, "initial SGD learning rate");
  cmd->add_option("--epochs", config.epochs, "training epochs");
  cmd->add_option("--bptt-len", config.bptt_len, "truncated-BPTT window (continuous mode)");
  cmd->add_option("--grad-clip", config.grad_clip, "gradient-norm clip");
  cmd->add_option("--lr-decay", config.lr_decay, "LR divisor on validation stall");
  cmd->add_flag("--continuous", config.continuous,
                "train on a delimited token stream instead of per-sentence");
}

void cmd_gen_synthetic(CLI::App& app) {
  auto* cmd = app.add_subcommand("gen-synthetic",
                                 "generate a synthetic corpus with a controlled RC mixture");
  struct O {
    synth::SynthConfig config;
    std::string lexicon, out = "corpus.txt", out_ann;
    std::size_t pairs = 0;
    std::uint64_t pair_seed = 20201204;
    std::string out_pairs = "test_pairs.tsv";
  };
  auto opts = std::make_shared<O>();
  cmd->set_config("--config");
  cmd->add_option("--corpus-size", opts->config.corpus_size, "total sentence count");
  cmd->add_option("--rc-count", opts->config.rc_count, "relative-clause sentence count");
  cmd->add_option("--high-proportion", opts->config.high_proportion,
                  "fraction of RC sentences with HIGH attachment");
  cmd->add_option("--seed", opts->config.seed, "generation seed");
  cmd->add_option("--lexicon", opts->lexicon, "lexicon file (default: built-in)");
  cmd->add_option("--out", opts->out, "corpus text output path");
  cmd->add_option("--out-ann", opts->out_ann, "annotation TSV path (default <out>.ann.tsv)");
  cmd->add_option("--test-pairs", opts->pairs, "also emit N ambiguous test pairs");
  cmd->add_option("--test-pair-seed", opts->pair_seed, "seed for test-pair sampling");
  cmd->add_option("--out-pairs", opts->out_pairs, "test-pair TSV output path");
  cmd->callback([opts] {
    opts->config.validate();
    const Lexicon lexicon = lexicon_or_default(opts->lexicon);
    const auto corpus = synth::generate_corpus(opts->config, lexicon);
    const std::string ann = opts->out_ann.empty() ? opts->out + ".ann.tsv" : opts->out_ann;
    synth::save_corpus(corpus, opts->out, ann);
    std::cerr << "wrote " << corpus.size() << " sentences to " << opts->out << '\n';
    if (opts->pairs > 0) {
      Rng rng(opts->pair_seed);
      const auto pairs = synth::generate_test_pairs(rng, lexicon, opts->pairs);
      save_stimulus_file(pairs, opts->out_pairs);
      std::cerr << "wrote " << pairs.size() << " test pairs to " << opts->out_pairs << '\n';
    }
  });
}

void cmd_build_vocab(CLI::App& app) {
  auto* cmd = app.add_subcommand("build-vocab", "build a frequency-ranked vocabulary");
  struct O {
    std::string corpus, out = "vocab.txt", encode_out;
    std::size_t max_size = 50000;
  };
  auto opts = std::make_shared<O>();
  cmd->set_config("--config");
  cmd->add_option("--corpus", opts->corpus, "corpus text file")->required();
  cmd->add_option("--max-size", opts->max_size, "maximum vocabulary size (incl. UNK)");
  cmd->add_option("--out", opts->out, "vocabulary output path");
  cmd->add_option("--encode-out", opts->encode_out, "also write the encoded corpus here");
  cmd->callback([opts] {
    const auto corpus = load_text_corpus(opts->corpus);
    const Vocab vocab = Vocab::build(corpus, opts->max_size);
    vocab.save(opts->out);
    std::cerr << "vocabulary: " << vocab.size() << " words (hash " << std::hex << vocab.hash()
              << std::dec << ")\n";
    if (!opts->encode_out.empty()) {
      save_encoded_corpus(encode(corpus, vocab), vocab, opts->encode_out);
    }
  });
}

void cmd_train(CLI::App& app) {
  auto* cmd = app.add_subcommand("train", "train an LSTM language model");
  struct O {
    std::string train_path, valid_path, vocab_path, out = "model.almc";
    lm::LMConfig config;
  };
  auto opts = std::make_shared<O>();
  cmd->set_config("--config");
  cmd->add_option("--train-corpus", opts->train_path, "training corpus text file")->required();
  cmd->add_option("--valid-corpus", opts->valid_path, "validation corpus text file")->required();
  cmd->add_option("--vocab", opts->vocab_path, "vocabulary file")->required();
  cmd->add_option("--out", opts->out, "checkpoint output path");
  cmd->add_option("--seed", opts->config.seed, "training seed");
  add_lm_flags(cmd, opts->config);
  cmd->callback([opts] {
    const Vocab vocab = Vocab::load(opts->vocab_path);
    const IdCorpus train_ids = encode(load_text_corpus(opts->train_path), vocab);
    const IdCorpus valid_ids = encode(load_text_corpus(opts->valid_path), vocab);
    const auto ckpt = lm::train(train_ids, valid_ids, opts->config, vocab.size(), vocab.hash(),
                                [](std::uint32_t epoch, double ppl, double lr) {
                                  std::cerr << "epoch " << epoch << " valid_ppl " << ppl << " lr "
                                            << lr << '\n';
                                });
    lm::save_checkpoint(ckpt, opts->out);
    std::cerr << "best epoch " << ckpt.best_epoch << " valid_ppl "
              << ckpt.valid_ppl_history[ckpt.best_epoch] << " -> " << opts->out << '\n';
  });
}

void cmd_expand_stimuli(CLI::App& app) {
  auto* cmd = app.add_subcommand("expand-stimuli",
                                 "expand templates x noun pairs into minimal-pair stimuli");
  struct O {
    std::string templates, nouns, language = "english", out = "stimuli.tsv";
    bool blocked = false;
  };
  auto opts = std::make_shared<O>();
  cmd->set_config("--config");
  cmd->add_option("--templates", opts->templates, "template TSV file")->required();
  cmd->add_option("--nouns", opts->nouns, "noun TSV file")->required();
  cmd->add_option("--language", opts->language, "english | spanish");
  cmd->add_flag("--blocked", opts->blocked, "templates block low attachment syntactically");
  cmd->add_option("--out", opts->out, "stimulus TSV output path");
  cmd->callback([opts] {
    const auto templates = stimuli::load_template_file(opts->templates);
    const auto nouns = stimuli::load_noun_file(opts->nouns);
    const auto pairs =
        opts->blocked ? stimuli::expand_blocked_templates(templates, nouns, opts->language)
                      : stimuli::expand_attachment_templates(templates, nouns, opts->language);
    save_stimulus_file(pairs, opts->out);
    std::cerr << "wrote " << pairs.size() << " pairs (" << 2 * pairs.size() << " sentences) to "
              << opts->out << '\n';
  });
}

void cmd_eval(CLI::App& app) {
  auto* cmd = app.add_subcommand("eval", "surprisal deltas for stimulus pairs");
  struct O {
    std::string checkpoint, vocab, stimuli, out = "results.csv";
    bool append = false;
  };
  auto opts = std::make_shared<O>();
  cmd->set_config("--config");
  cmd->add_option("--checkpoint", opts->checkpoint, "model checkpoint")->required();
  cmd->add_option("--vocab", opts->vocab, "vocabulary file")->required();
  cmd->add_option("--stimuli", opts->stimuli, "stimulus TSV file")->required();
  cmd->add_option("--out", opts->out, "results CSV path");
  cmd->add_flag("--append", opts->append, "append to an existing results CSV");
  cmd->callback([opts] {
    const auto ckpt = lm::load_checkpoint(opts->checkpoint);
    const Vocab vocab = Vocab::load(opts->vocab);
    const auto pairs = load_stimulus_file(opts->stimuli);
    if (pairs.empty()) throw DataError(opts->stimuli + ": empty stimulus file");
    std::vector<eval::DeltaRecord> deltas;
    deltas.reserve(pairs.size());
    for (const auto& pair : pairs) {
      deltas.push_back(eval::attachment_delta(ckpt, vocab, pair, [](const std::string& tok) {
        std::cerr << "[oov] '" << tok << "' mapped to UNK\n";
      }));
    }
    eval::write_results_csv(deltas, ckpt.config.seed, opts->out, opts->append);
    const auto agg = eval::aggregate_report(deltas);
    std::cerr << "n=" << agg.n << " mean_delta=" << agg.mean_delta
              << " p(HIGH)=" << agg.proportion_high << " p(LOW)=" << agg.proportion_low << '\n';
  });
}

void cmd_stats(CLI::App& app) {
  auto* cmd = app.add_subcommand("stats", "t-test + Bayes factor over pooled delta rows");
  struct O {
    std::vector<std::string> results;
    std::string id = "pooled", out = "stats.csv";
    std::size_t m = 6;
  };
  auto opts = std::make_shared<O>();
  cmd->set_config("--config");
  cmd->add_option("--results", opts->results, "results CSV file(s)")->required();
  cmd->add_option("--id", opts->id, "experiment id for the output row");
  cmd->add_option("--bonferroni-m", opts->m, "number of comparisons for correction");
  cmd->add_option("--out", opts->out, "stats CSV path");
  cmd->callback([opts] {
    std::vector<double> deltas;
    for (const auto& path : opts->results) {
      for (const auto& d : eval::read_results_csv(path)) deltas.push_back(d.delta);
    }
    const auto result = stats::analyze(opts->id, deltas, opts->m);
    stats::write_stats_csv({result}, opts->out);
    std::cerr << "n=" << result.n << " t=" << result.t << " p=" << result.p
              << " BF10=" << result.bf10 << (result.significant ? " *" : "") << '\n';
  });
}

void cmd_sweep(CLI::App& app) {
  auto* cmd = app.add_subcommand("sweep", "train/evaluate a grid of mixtures x seeds");
  auto opts = std::make_shared<sweep::ExperimentConfig>();
  cmd->set_config("--config");
  cmd->add_option("--kind", opts->kind, "experiment kind label");
  cmd->add_option("--grid", opts->grid, "HIGH-proportion grid values");
  cmd->add_option("--seeds", opts->seeds, "seeds per cell");
  cmd->add_option("--corpus-size", opts->corpus_size, "sentences per cell corpus");
  cmd->add_option("--rc-count", opts->rc_count, "RC sentences per cell corpus");
  cmd->add_option("--test-pairs", opts->test_pairs, "shared test-pair count");
  cmd->add_option("--test-pair-seed", opts->test_pair_seed, "test-pair sampling seed");
  cmd->add_option("--lexicon", opts->lexicon_path, "lexicon file (default: built-in)");
  cmd->add_option("--profile", opts->profile, "profile label embedded in reports");
  cmd->add_option("--bonferroni-m", opts->bonferroni_m, "comparisons for correction");
  cmd->add_option("--workers", opts->workers, "concurrent cells");
  cmd->add_option("--out", opts->output_dir, "output directory");
  add_lm_flags(cmd, opts->lm);
  cmd->callback([opts] {
    const auto report = sweep::run_sweep(*opts);
    sweep::emit_figures(report, (fs::path(opts->output_dir) / "report").string(),
                        opts->kind + " (" + opts->profile + ")");
    std::cerr << "sweep complete: " << report.cells.size() << " cells -> " << opts->output_dir
              << "/report\n";
  });
}

void cmd_replicate(CLI::App& app) {
  auto* cmd = app.add_subcommand("replicate",
                                 "evaluate trained checkpoints on stimulus sets end to end");
  auto opts = std::make_shared<sweep::ReplicationConfig>();
  cmd->set_config("--config");
  cmd->add_option("--checkpoints", opts->checkpoint_paths, "model checkpoints")->required();
  cmd->add_option("--vocab", opts->vocab_path, "vocabulary file")->required();
  cmd->add_option("--stimuli", opts->stimulus_paths, "stimulus TSV files")->required();
  cmd->add_option("--bonferroni-m", opts->bonferroni_m, "comparisons for correction");
  cmd->add_option("--out", opts->output_dir, "output directory");
  cmd->callback([opts] {
    const auto report = sweep::run_replication(*opts);
    sweep::emit_figures(report, opts->output_dir, "replication");
    std::cerr << "replication complete: " << report.cells.size() << " checkpoint x set cells -> "
              << opts->output_dir << '\n';
  });
}

void cmd_report(CLI::App& app) {
  auto* cmd = app.add_subcommand("report", "figures/tables from existing results CSVs");
  struct O {
    std::vector<std::string> results;
    std::string out = "report_out", title = "attachment report";
    std::size_t m = 6;
  };
  auto opts = std::make_shared<O>();
  cmd->set_config("--config");
  cmd->add_option("--results", opts->results, "results CSV file(s); one bar group each")
      ->required();
  cmd->add_option("--out", opts->out, "output directory");
  cmd->add_option("--title", opts->title, "figure title");
  cmd->add_option("--bonferroni-m", opts->m, "comparisons for correction");
  cmd->callback([opts] {
    std::vector<report::FigureCell> cells;
    std::vector<stats::TestResult> tests;
    std::string provenance = "provenance: results=";
    for (const auto& path : opts->results) {
      std::vector<std::uint64_t> seeds;
      const auto deltas = eval::read_results_csv(path, &seeds);
      if (deltas.empty()) throw DataError(path + ": no delta rows");
      report::FigureCell cell;
      cell.label = fs::path(path).stem().string();
      const auto agg = eval::aggregate_report(deltas);
      cell.proportion_high = agg.proportion_high;
      cell.proportion_low = agg.proportion_low;
      // Per-seed overlays from the seed column.
      std::vector<std::uint64_t> unique_seeds;
      for (auto s : seeds) {
        if (std::find(unique_seeds.begin(), unique_seeds.end(), s) == unique_seeds.end()) {
          unique_seeds.push_back(s);
        }
      }
      if (unique_seeds.size() > 1) {
        for (auto s : unique_seeds) {
          std::vector<eval::DeltaRecord> subset;
          for (std::size_t i = 0; i < deltas.size(); ++i) {
            if (seeds[i] == s) subset.push_back(deltas[i]);
          }
          const auto sub = eval::aggregate_report(subset);
          cell.per_seed.emplace_back(sub.proportion_high, sub.proportion_low);
        }
      }
      cells.push_back(std::move(cell));
      std::vector<double> values;
      for (const auto& d : deltas) values.push_back(d.delta);
      if (values.size() >= 2) {
        tests.push_back(stats::analyze(cells.back().label, values, opts->m));
      }
      provenance += fs::path(path).filename().string() + ";";
    }
    fs::create_directories(opts->out);
    const fs::path dir(opts->out);
    report::write_proportions_svg(cells, opts->title, provenance,
                                  (dir / "proportions.svg").string());
    report::write_proportions_csv(cells, provenance, (dir / "proportions.csv").string());
    if (!tests.empty()) stats::write_stats_csv(tests, (dir / "stats.csv").string());
    std::cerr << "wrote report for " << cells.size() << " result sets to " << opts->out << '\n';
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"controlled-rearing laboratory for relative-clause attachment in LSTM LMs"};
  app.require_subcommand(1);
  std::string simd = "auto";
  app.add_option("--simd", simd, "kernel implementation: auto, scalar, or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  app.parse_complete_callback([&simd] {
    if (simd == "scalar") {
      kern::force(kern::Impl::scalar);
    } else if (simd == "avx2") {
      if (!kern::detail::avx2_available()) throw ConfigError("avx2 not available on this CPU");
      kern::force(kern::Impl::avx2);
    }
  });
  cmd_gen_synthetic(app);
  cmd_build_vocab(app);
  cmd_train(app);
  cmd_expand_stimuli(app);
  cmd_eval(app);
  cmd_stats(app);
  cmd_sweep(app);
  cmd_replicate(app);
  cmd_report(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ConfigError::exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ConfigError::exit_code;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return DataError::exit_code;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return NumericalError::exit_code;
  }
  return 0;
}
