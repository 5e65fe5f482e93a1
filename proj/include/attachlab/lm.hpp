#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "attachlab/corpus.hpp"
#include "attachlab/lm_core.hpp"

namespace attachlab::lm {

struct LMConfig {
  std::uint32_t layers = 2;
  std::uint32_t embed_units = 128;
  std::uint32_t hidden_units = 128;
  double dropout = 0.2;
  std::uint32_t batch_size = 64;
  double initial_lr = 20.0;
  std::uint32_t epochs = 40;
  std::uint32_t bptt_len = 35;
  double grad_clip = 0.25;
  double lr_decay = 4.0;  // LR divisor when validation perplexity stalls
  std::uint64_t seed = 0;
  bool continuous = false;  // TBPTT over a delimited stream; else per-sentence

  void validate() const;
};

struct Checkpoint {
  LMConfig config;
  std::uint32_t vocab_dim = 0;  // vocab size + 1 (sentence delimiter)
  std::uint64_t vocab_hash = 0;
  std::uint32_t best_epoch = 0;
  std::vector<double> valid_ppl_history;
  Params<float> params;
};

// Trains with SGD + truncated BPTT, gradient-norm clipping, and LR annealing
// (divide by lr_decay when validation perplexity fails to improve). Returns
// the parameters from the best-validation epoch. Throws NumericalError with
// epoch/batch/LR diagnostics on non-finite loss.
Checkpoint train(const IdCorpus& train_corpus, const IdCorpus& valid_corpus,
                 const LMConfig& config, std::size_t vocab_size, std::uint64_t vocab_hash,
                 const std::function<void(std::uint32_t, double, double)>& on_epoch = nullptr);

// exp(mean per-token NLL, natural log); evaluation mode, state reset between
// sentences. The sentence-delimiter token is not scored.
double perplexity(const Checkpoint& checkpoint, const IdCorpus& corpus);

// Per-token surprisals (nats) for one sentence, in evaluation mode.
std::vector<double> sequence_surprisal(const Checkpoint& checkpoint, const IdSentence& sentence);

// Single-step API: probabilities over the vocab dimension after consuming
// `prefix` from a fresh state.
struct StepResult {
  std::vector<float> probs;
  State<float> state;
};
StepResult forward_step(const Checkpoint& checkpoint, const IdSentence& prefix);

// Analytic vs central-finite-difference gradients (step 1e-5) in double
// precision on `n_samples` >= 1 randomly chosen parameters; returns the max
// relative error.
double gradient_check(const LMConfig& config, std::size_t vocab_dim,
                      const std::vector<IdSentence>& batch, std::size_t n_samples,
                      std::uint64_t sample_seed = 7);

// Checkpoint file: "ALMC" magic, u16 version, metadata, then tensors as
// little-endian float32, row-major, each preceded by its shape.
void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace attachlab::lm
