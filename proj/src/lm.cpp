#include "attachlab/lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "attachlab/errors.hpp"

namespace attachlab::lm {

void LMConfig::validate() const {
  if (layers < 1 || embed_units < 1 || hidden_units < 1 || batch_size < 1 || epochs < 1 ||
      bptt_len < 1) {
    throw ConfigError("LM config counts must be >= 1");
  }
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0,1)");
  if (initial_lr <= 0.0) throw ConfigError("initial_lr must be positive");
  if (grad_clip <= 0.0) throw ConfigError("grad_clip must be positive");
  if (lr_decay <= 1.0) throw ConfigError("lr_decay must exceed 1");
}

namespace {

// Equal-length sentence batches; synthetic sentences are short, so batching
// by exact length wastes nothing on padding.
std::vector<std::vector<std::size_t>> bucket_batches(const IdCorpus& corpus,
                                                     std::size_t batch_size) {
  std::map<std::size_t, std::vector<std::size_t>> by_len;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!corpus[i].empty()) by_len[corpus[i].size()].push_back(i);
  }
  std::vector<std::vector<std::size_t>> batches;
  for (auto& [len, idxs] : by_len) {
    for (std::size_t start = 0; start < idxs.size(); start += batch_size) {
      const std::size_t end = std::min(start + batch_size, idxs.size());
      batches.emplace_back(idxs.begin() + start, idxs.begin() + end);
    }
  }
  return batches;
}

struct ParamRefs {
  std::vector<std::vector<float>*> tensors;
  explicit ParamRefs(Params<float>& p) {
    p.for_each_tensor([&](std::vector<float>& v) { tensors.push_back(&v); });
  }
};

void sgd_step(Params<float>& params, Params<float>& grads, double lr, double clip) {
  ParamRefs p(params), g(grads);
  double norm2 = 0.0;
  for (auto* t : g.tensors) norm2 += double(kern::dot(t->data(), t->data(), t->size()));
  const double norm = std::sqrt(norm2);
  const double scale = norm > clip ? clip / norm : 1.0;
  const float step = static_cast<float>(-lr * scale);
  for (std::size_t i = 0; i < p.tensors.size(); ++i) {
    kern::axpy(step, g.tensors[i]->data(), p.tensors[i]->data(), g.tensors[i]->size());
  }
}

void zero(Params<float>& grads) {
  grads.for_each_tensor([](std::vector<float>& v) { std::fill(v.begin(), v.end(), 0.0f); });
}

double perplexity_params(const Params<float>& params, const IdCorpus& corpus,
                         std::uint32_t eos_id) {
  const auto batches = bucket_batches(corpus, 128);
  double nll = 0.0;
  std::size_t tokens = 0;
  for (const auto& batch : batches) {
    const std::size_t B = batch.size();
    const std::size_t n = corpus[batch[0]].size();
    const std::size_t T = n + 1;  // same objective as training: w1..wn plus delimiter
    std::vector<std::int64_t> inputs(T * B), targets(T * B);
    for (std::size_t b = 0; b < B; ++b) {
      const IdSentence& s = corpus[batch[b]];
      for (std::size_t t = 0; t < T; ++t) {
        inputs[t * B + b] = t == 0 ? std::int64_t(eos_id) : std::int64_t(s[t - 1]);
        targets[t * B + b] = t < n ? std::int64_t(s[t]) : std::int64_t(eos_id);
      }
    }
    State<float> state;
    state.reset(params.layers.size(), B, params.hidden);
    Segment<float> seg(params, B, T);
    std::size_t batch_tokens = 0;
    nll += seg.forward(inputs, targets, state, false, 0.0, nullptr, &batch_tokens);
    tokens += batch_tokens;
  }
  if (tokens == 0) throw ConfigError("perplexity: corpus has no tokens");
  return std::exp(nll / double(tokens));
}

}  // namespace

Checkpoint train(const IdCorpus& train_corpus, const IdCorpus& valid_corpus,
                 const LMConfig& config, std::size_t vocab_size, std::uint64_t vocab_hash,
                 const std::function<void(std::uint32_t, double, double)>& on_epoch) {
  config.validate();
  if (train_corpus.empty() || valid_corpus.empty()) {
    throw ConfigError("train: empty training or validation corpus");
  }
  const std::uint32_t vocab_dim = static_cast<std::uint32_t>(vocab_size) + 1;
  const std::uint32_t eos_id = static_cast<std::uint32_t>(vocab_size);

  Checkpoint ckpt;
  ckpt.config = config;
  ckpt.vocab_dim = vocab_dim;
  ckpt.vocab_hash = vocab_hash;
  ckpt.params.allocate(vocab_dim, config.embed_units, config.hidden_units, config.layers);

  Rng rng(config.seed);
  ckpt.params.init(rng);

  Params<float> grads;
  grads.allocate(vocab_dim, config.embed_units, config.hidden_units, config.layers);
  Params<float> best_params = ckpt.params;
  double best_ppl = std::numeric_limits<double>::infinity();
  double lr = config.initial_lr;

  // Continuous mode: one delimited stream cut into batch_size parallel lanes.
  std::vector<std::int64_t> stream;
  if (config.continuous) {
    for (const auto& s : train_corpus) {
      for (auto id : s) stream.push_back(id);
      stream.push_back(eos_id);
    }
    if (stream.size() < config.batch_size * 2) {
      throw ConfigError("train: corpus too small for continuous batching");
    }
  }

  // Sentences are bucketed by length once; batch composition is re-drawn
  // every epoch so SGD does not revisit identical batches.
  std::map<std::size_t, std::vector<std::size_t>> by_len;
  if (!config.continuous) {
    for (std::size_t i = 0; i < train_corpus.size(); ++i) {
      if (!train_corpus[i].empty()) by_len[train_corpus[i].size()].push_back(i);
    }
  }

  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    double check_lr = lr;
    std::vector<std::vector<std::size_t>> batches;
    if (!config.continuous) {
      for (auto& [len, idxs] : by_len) {
        rng.shuffle(idxs);
        for (std::size_t start = 0; start < idxs.size(); start += config.batch_size) {
          const std::size_t end = std::min(start + config.batch_size, idxs.size());
          batches.emplace_back(idxs.begin() + start, idxs.begin() + end);
        }
      }
    }
    if (config.continuous) {
      const std::size_t B = config.batch_size;
      const std::size_t lane = stream.size() / B;
      State<float> state;
      state.reset(config.layers, B, config.hidden_units);
      std::size_t batch_index = 0;
      for (std::size_t pos = 0; pos + 1 < lane; pos += config.bptt_len, ++batch_index) {
        const std::size_t T = std::min<std::size_t>(config.bptt_len, lane - 1 - pos);
        std::vector<std::int64_t> inputs(T * B), targets(T * B);
        for (std::size_t b = 0; b < B; ++b) {
          for (std::size_t t = 0; t < T; ++t) {
            inputs[t * B + b] = stream[b * lane + pos + t];
            targets[t * B + b] = stream[b * lane + pos + t + 1];
          }
        }
        Segment<float> seg(ckpt.params, B, T);
        std::size_t tokens = 0;
        const double loss =
            seg.forward(inputs, targets, state, true, config.dropout, &rng, &tokens);
        if (!std::isfinite(loss)) {
          std::ostringstream msg;
          msg << "non-finite loss (epoch " << epoch << ", batch " << batch_index << ", lr "
              << check_lr << ")";
          throw NumericalError(msg.str());
        }
        zero(grads);
        seg.remember_inputs(inputs);
        seg.backward(grads, double(tokens));
        sgd_step(ckpt.params, grads, lr, config.grad_clip);
      }
    } else {
      rng.shuffle(batches);
      for (std::size_t batch_index = 0; batch_index < batches.size(); ++batch_index) {
        const auto& batch = batches[batch_index];
        const std::size_t B = batch.size();
        const std::size_t n = train_corpus[batch[0]].size();
        const std::size_t T = n + 1;  // predict w1..wn plus the delimiter
        std::vector<std::int64_t> inputs(T * B), targets(T * B);
        for (std::size_t b = 0; b < B; ++b) {
          const IdSentence& s = train_corpus[batch[b]];
          for (std::size_t t = 0; t < T; ++t) {
            inputs[t * B + b] = t == 0 ? std::int64_t(eos_id) : std::int64_t(s[t - 1]);
            targets[t * B + b] = t < n ? std::int64_t(s[t]) : std::int64_t(eos_id);
          }
        }
        State<float> state;
        state.reset(config.layers, B, config.hidden_units);
        Segment<float> seg(ckpt.params, B, T);
        std::size_t tokens = 0;
        const double loss =
            seg.forward(inputs, targets, state, true, config.dropout, &rng, &tokens);
        if (!std::isfinite(loss)) {
          std::ostringstream msg;
          msg << "non-finite loss (epoch " << epoch << ", batch " << batch_index << ", lr "
              << check_lr << ")";
          throw NumericalError(msg.str());
        }
        zero(grads);
        seg.remember_inputs(inputs);
        seg.backward(grads, double(tokens));
        sgd_step(ckpt.params, grads, lr, config.grad_clip);
      }
    }

    const double ppl = perplexity_params(ckpt.params, valid_corpus, eos_id);
    ckpt.valid_ppl_history.push_back(ppl);
    if (ppl < best_ppl) {
      best_ppl = ppl;
      best_params = ckpt.params;
      ckpt.best_epoch = epoch;
    } else {
      lr /= config.lr_decay;
    }
    if (on_epoch) on_epoch(epoch, ppl, lr);
  }

  ckpt.params = best_params;
  return ckpt;
}

double perplexity(const Checkpoint& checkpoint, const IdCorpus& corpus) {
  if (corpus.empty()) throw ConfigError("perplexity: empty corpus");
  return perplexity_params(checkpoint.params, corpus, checkpoint.vocab_dim - 1);
}

std::vector<double> sequence_surprisal(const Checkpoint& checkpoint, const IdSentence& sentence) {
  if (sentence.empty()) throw ConfigError("sequence_surprisal: empty sentence");
  const Params<float>& params = checkpoint.params;
  const std::uint32_t eos_id = checkpoint.vocab_dim - 1;
  const std::size_t T = sentence.size();
  std::vector<std::int64_t> inputs(T), targets(T);
  for (std::size_t t = 0; t < T; ++t) {
    inputs[t] = t == 0 ? std::int64_t(eos_id) : std::int64_t(sentence[t - 1]);
    targets[t] = sentence[t];
  }
  State<float> state;
  state.reset(params.layers.size(), 1, params.hidden);
  Segment<float> seg(params, 1, T);
  std::vector<double> per_token;
  std::size_t tokens = 0;
  seg.forward(inputs, targets, state, false, 0.0, nullptr, &tokens, nullptr, &per_token);
  return per_token;
}

StepResult forward_step(const Checkpoint& checkpoint, const IdSentence& prefix) {
  if (prefix.empty()) throw ConfigError("forward_step: empty prefix");
  const Params<float>& params = checkpoint.params;
  const std::size_t T = prefix.size();
  std::vector<std::int64_t> inputs(prefix.begin(), prefix.end());
  std::vector<std::int64_t> targets(T, -1);
  StepResult result;
  result.state.reset(params.layers.size(), 1, params.hidden);
  Segment<float> seg(params, 1, T);
  std::size_t tokens = 0;
  seg.forward(inputs, targets, result.state, false, 0.0, nullptr, &tokens, &result.probs);
  return result;
}

double gradient_check(const LMConfig& config, std::size_t vocab_dim,
                      const std::vector<IdSentence>& batch, std::size_t n_samples,
                      std::uint64_t sample_seed) {
  config.validate();
  if (n_samples == 0) throw ConfigError("gradient_check: empty parameter subset");
  if (batch.empty() || batch.size() > 4) {
    throw ConfigError("gradient_check: batch must hold 1..4 sequences");
  }

  Params<double> params;
  params.allocate(static_cast<std::uint32_t>(vocab_dim), config.embed_units, config.hidden_units,
                  config.layers);
  Rng init_rng(config.seed);
  params.init(init_rng);

  const std::size_t B = batch.size();
  std::size_t T = 0;
  for (const auto& s : batch) T = std::max(T, s.size());
  if (T == 0) throw ConfigError("gradient_check: empty sequences");
  const std::int64_t pad_input = std::int64_t(vocab_dim) - 1;
  std::vector<std::int64_t> inputs(T * B, pad_input), targets(T * B, -1);
  for (std::size_t b = 0; b < B; ++b) {
    const IdSentence& s = batch[b];
    for (std::size_t t = 0; t < s.size(); ++t) {
      inputs[t * B + b] = t == 0 ? pad_input : std::int64_t(s[t - 1]);
      targets[t * B + b] = s[t];
    }
  }

  auto loss_of = [&](const Params<double>& p) {
    State<double> state;
    state.reset(config.layers, B, config.hidden_units);
    Segment<double> seg(p, B, T);
    std::size_t tokens = 0;
    const double nll = seg.forward(inputs, targets, state, false, 0.0, nullptr, &tokens);
    return nll / double(tokens);
  };

  // Analytic gradients (dropout disabled; same path the loss uses).
  Params<double> grads;
  grads.allocate(static_cast<std::uint32_t>(vocab_dim), config.embed_units, config.hidden_units,
                 config.layers);
  {
    State<double> state;
    state.reset(config.layers, B, config.hidden_units);
    Segment<double> seg(params, B, T);
    std::size_t tokens = 0;
    seg.forward(inputs, targets, state, false, 0.0, nullptr, &tokens);
    seg.remember_inputs(inputs);
    seg.backward(grads, double(tokens));
  }

  std::vector<std::vector<double>*> p_tensors, g_tensors;
  params.for_each_tensor([&](std::vector<double>& v) { p_tensors.push_back(&v); });
  grads.for_each_tensor([&](std::vector<double>& v) { g_tensors.push_back(&v); });
  const std::size_t total = params.parameter_count();

  Rng pick(sample_seed);
  const double step = 1e-5;
  double max_rel = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    std::size_t flat = std::size_t(pick.uniform_int(total));
    std::size_t ti = 0;
    while (flat >= p_tensors[ti]->size()) {
      flat -= p_tensors[ti]->size();
      ++ti;
    }
    double& value = (*p_tensors[ti])[flat];
    const double saved = value;
    value = saved + step;
    const double up = loss_of(params);
    value = saved - step;
    const double down = loss_of(params);
    value = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double analytic = (*g_tensors[ti])[flat];
    const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
    max_rel = std::max(max_rel, std::abs(numeric - analytic) / denom);
  }
  return max_rel;
}

namespace {

constexpr char kCkptMagic[4] = {'A', 'L', 'M', 'C'};
constexpr std::uint16_t kCkptVersion = 1;

template <typename T>
void write_le(std::ofstream& out, T value) {
  unsigned char buf[sizeof(T)];
  std::uint64_t bits;
  if constexpr (std::is_floating_point_v<T>) {
    if constexpr (sizeof(T) == 4) {
      std::uint32_t b32;
      std::memcpy(&b32, &value, 4);
      bits = b32;
    } else {
      std::memcpy(&bits, &value, 8);
    }
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = (bits >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!in) throw DataError("truncated checkpoint file");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= std::uint64_t(buf[i]) << (8 * i);
  if constexpr (std::is_floating_point_v<T>) {
    T value;
    if constexpr (sizeof(T) == 4) {
      std::uint32_t b32 = static_cast<std::uint32_t>(bits);
      std::memcpy(&value, &b32, 4);
    } else {
      std::memcpy(&value, &bits, 8);
    }
    return value;
  } else {
    return static_cast<T>(bits);
  }
}

void write_tensor(std::ofstream& out, const std::vector<float>& data,
                  const std::vector<std::uint32_t>& shape) {
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
  std::size_t expect = 1;
  for (auto d : shape) {
    write_le<std::uint32_t>(out, d);
    expect *= d;
  }
  if (expect != data.size()) throw NumericalError("checkpoint tensor shape mismatch");
  for (float v : data) {
    if (!std::isfinite(v)) throw NumericalError("checkpoint contains non-finite value");
    write_le<float>(out, v);
  }
}

std::vector<float> read_tensor(std::ifstream& in, const std::vector<std::uint32_t>& shape) {
  const auto ndims = read_le<std::uint32_t>(in);
  if (ndims != shape.size()) throw DataError("checkpoint tensor rank mismatch");
  std::size_t n = 1;
  for (auto expect : shape) {
    const auto d = read_le<std::uint32_t>(in);
    if (d != expect) throw DataError("checkpoint tensor shape mismatch");
    n *= d;
  }
  std::vector<float> data(n);
  for (auto& v : data) v = read_le<float>(in);
  return data;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kCkptMagic, 4);
  write_le<std::uint16_t>(out, kCkptVersion);
  const LMConfig& c = ckpt.config;
  write_le<std::uint32_t>(out, c.layers);
  write_le<std::uint32_t>(out, c.embed_units);
  write_le<std::uint32_t>(out, c.hidden_units);
  write_le<std::uint32_t>(out, c.batch_size);
  write_le<std::uint32_t>(out, c.epochs);
  write_le<std::uint32_t>(out, c.bptt_len);
  write_le<double>(out, c.dropout);
  write_le<double>(out, c.initial_lr);
  write_le<double>(out, c.grad_clip);
  write_le<double>(out, c.lr_decay);
  write_le<std::uint64_t>(out, c.seed);
  write_le<std::uint8_t>(out, c.continuous ? 1 : 0);
  write_le<std::uint32_t>(out, ckpt.vocab_dim);
  write_le<std::uint64_t>(out, ckpt.vocab_hash);
  write_le<std::uint32_t>(out, ckpt.best_epoch);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.valid_ppl_history.size()));
  for (double p : ckpt.valid_ppl_history) write_le<double>(out, p);

  const Params<float>& p = ckpt.params;
  write_tensor(out, p.embedding, {p.vocab_dim, p.embed});
  for (const auto& layer : p.layers) {
    const std::uint32_t in = &layer == &p.layers.front() ? p.embed : p.hidden;
    write_tensor(out, layer.w_ih, {4 * p.hidden, in});
    write_tensor(out, layer.w_hh, {4 * p.hidden, p.hidden});
    write_tensor(out, layer.b_ih, {4 * p.hidden});
    write_tensor(out, layer.b_hh, {4 * p.hidden});
  }
  write_tensor(out, p.w_out, {p.vocab_dim, p.hidden});
  write_tensor(out, p.b_out, {p.vocab_dim});
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCkptMagic, 4) != 0) {
    throw DataError(path + ": not a checkpoint file");
  }
  if (read_le<std::uint16_t>(in) != kCkptVersion) {
    throw DataError(path + ": unsupported checkpoint version");
  }
  Checkpoint ckpt;
  LMConfig& c = ckpt.config;
  c.layers = read_le<std::uint32_t>(in);
  c.embed_units = read_le<std::uint32_t>(in);
  c.hidden_units = read_le<std::uint32_t>(in);
  c.batch_size = read_le<std::uint32_t>(in);
  c.epochs = read_le<std::uint32_t>(in);
  c.bptt_len = read_le<std::uint32_t>(in);
  c.dropout = read_le<double>(in);
  c.initial_lr = read_le<double>(in);
  c.grad_clip = read_le<double>(in);
  c.lr_decay = read_le<double>(in);
  c.seed = read_le<std::uint64_t>(in);
  c.continuous = read_le<std::uint8_t>(in) != 0;
  ckpt.vocab_dim = read_le<std::uint32_t>(in);
  ckpt.vocab_hash = read_le<std::uint64_t>(in);
  ckpt.best_epoch = read_le<std::uint32_t>(in);
  const auto hist = read_le<std::uint32_t>(in);
  ckpt.valid_ppl_history.resize(hist);
  for (auto& p : ckpt.valid_ppl_history) p = read_le<double>(in);

  Params<float>& p = ckpt.params;
  p.vocab_dim = ckpt.vocab_dim;
  p.embed = c.embed_units;
  p.hidden = c.hidden_units;
  p.embedding = read_tensor(in, {p.vocab_dim, p.embed});
  p.layers.resize(c.layers);
  for (std::uint32_t l = 0; l < c.layers; ++l) {
    const std::uint32_t in_dim = l == 0 ? p.embed : p.hidden;
    p.layers[l].w_ih = read_tensor(in, {4 * p.hidden, in_dim});
    p.layers[l].w_hh = read_tensor(in, {4 * p.hidden, p.hidden});
    p.layers[l].b_ih = read_tensor(in, {4 * p.hidden});
    p.layers[l].b_hh = read_tensor(in, {4 * p.hidden});
  }
  p.w_out = read_tensor(in, {p.vocab_dim, p.hidden});
  p.b_out = read_tensor(in, {p.vocab_dim});
  return ckpt;
}

}  // namespace attachlab::lm
