#pragma once

// Templated LSTM engine. Instantiated with float for training/evaluation
// (inner loops go through the dispatched kernels) and with double for the
// finite-difference gradient checker.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "attachlab/errors.hpp"
#include "attachlab/kernels.hpp"
#include "attachlab/rng.hpp"

namespace attachlab::lm {

template <typename T>
struct LayerParams {
  std::vector<T> w_ih;  // 4H x in
  std::vector<T> w_hh;  // 4H x H
  std::vector<T> b_ih;  // 4H
  std::vector<T> b_hh;  // 4H
};

template <typename T>
struct Params {
  std::uint32_t vocab_dim = 0;
  std::uint32_t embed = 0;
  std::uint32_t hidden = 0;
  std::vector<T> embedding;  // vocab_dim x embed
  std::vector<LayerParams<T>> layers;
  std::vector<T> w_out;  // vocab_dim x H
  std::vector<T> b_out;  // vocab_dim

  void allocate(std::uint32_t vocab, std::uint32_t embed_units, std::uint32_t hidden_units,
                std::uint32_t n_layers) {
    vocab_dim = vocab;
    embed = embed_units;
    hidden = hidden_units;
    embedding.assign(std::size_t(vocab) * embed, T(0));
    layers.assign(n_layers, {});
    for (std::uint32_t l = 0; l < n_layers; ++l) {
      const std::uint32_t in = l == 0 ? embed : hidden;
      layers[l].w_ih.assign(std::size_t(4) * hidden * in, T(0));
      layers[l].w_hh.assign(std::size_t(4) * hidden * hidden, T(0));
      layers[l].b_ih.assign(std::size_t(4) * hidden, T(0));
      layers[l].b_hh.assign(std::size_t(4) * hidden, T(0));
    }
    w_out.assign(std::size_t(vocab) * hidden, T(0));
    b_out.assign(vocab, T(0));
  }

  // Weight matrices uniform(-0.1, 0.1); biases zero.
  void init(Rng& rng) {
    auto fill = [&](std::vector<T>& v) {
      for (auto& x : v) x = static_cast<T>(rng.uniform_real(-0.1, 0.1));
    };
    fill(embedding);
    for (auto& layer : layers) {
      fill(layer.w_ih);
      fill(layer.w_hh);
    }
    fill(w_out);
  }

  template <typename Fn>
  void for_each_tensor(Fn&& fn) {
    fn(embedding);
    for (auto& layer : layers) {
      fn(layer.w_ih);
      fn(layer.w_hh);
      fn(layer.b_ih);
      fn(layer.b_hh);
    }
    fn(w_out);
    fn(b_out);
  }

  template <typename Fn>
  void for_each_tensor(Fn&& fn) const {
    fn(embedding);
    for (const auto& layer : layers) {
      fn(layer.w_ih);
      fn(layer.w_hh);
      fn(layer.b_ih);
      fn(layer.b_hh);
    }
    fn(w_out);
    fn(b_out);
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for_each_tensor([&](const std::vector<T>& v) { n += v.size(); });
    return n;
  }
};

template <typename T>
struct State {
  std::vector<std::vector<T>> h;  // per layer, B x H
  std::vector<std::vector<T>> c;

  void reset(std::size_t n_layers, std::size_t batch, std::size_t hidden) {
    h.assign(n_layers, std::vector<T>(batch * hidden, T(0)));
    c.assign(n_layers, std::vector<T>(batch * hidden, T(0)));
  }
};

template <typename T>
inline T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

// Per-timestep, per-layer cache kept for backpropagation.
template <typename T>
struct StepCache {
  std::vector<T> input;    // B x in, post-dropout
  std::vector<T> in_mask;  // dropout scale applied to input (empty in eval)
  std::vector<T> gates;    // B x 4H, activated (i f g o)
  std::vector<T> c_prev;   // B x H
  std::vector<T> c;        // B x H
  std::vector<T> tanh_c;   // B x H
  std::vector<T> h;        // B x H
};

// One training/eval segment: T timesteps over a batch of B sequences.
// inputs/targets are row-major [t][b]. Targets < 0 are padding and excluded
// from the loss (unused in sentence mode where batches share a length).
template <typename T>
class Segment {
 public:
  Segment(const Params<T>& params, std::size_t batch, std::size_t steps)
      : p_(params), B_(batch), T_(steps) {}

  // Runs the forward pass. When `train` is set, dropout masks are drawn from
  // `drop_rng` with keep probability 1-dropout and activations are cached.
  // Returns summed negative log-likelihood over non-padding targets (natural
  // log) and fills `probs` (B x vocab per step) only when `keep_probs`.
  double forward(const std::vector<std::int64_t>& inputs,
                 const std::vector<std::int64_t>& targets, State<T>& state, bool train,
                 double dropout, Rng* drop_rng, std::size_t* token_count,
                 std::vector<T>* last_probs = nullptr,
                 std::vector<double>* per_token_nll = nullptr) {
    if (per_token_nll) per_token_nll->assign(T_ * B_, 0.0);
    const std::uint32_t H = p_.hidden;
    const std::uint32_t V = p_.vocab_dim;
    const std::size_t L = p_.layers.size();
    cache_.assign(T_, std::vector<StepCache<T>>(L));
    dlogits_.assign(T_, {});
    init_h_ = state.h;  // segment-entry hidden state, needed at t=0 in backward

    double nll = 0.0;
    std::size_t tokens = 0;
    std::vector<T> x;
    std::vector<T> scratch(B_ * 4 * H);
    std::vector<T> logits(B_ * V);

    for (std::size_t t = 0; t < T_; ++t) {
      // Embedding gather + input dropout.
      x.assign(B_ * p_.embed, T(0));
      for (std::size_t b = 0; b < B_; ++b) {
        const auto id = inputs[t * B_ + b];
        if (id < 0 || std::uint32_t(id) >= V) throw DataError("token id out of vocab range");
        const T* row = p_.embedding.data() + std::size_t(id) * p_.embed;
        std::copy(row, row + p_.embed, x.begin() + b * p_.embed);
      }
      for (std::size_t l = 0; l < L; ++l) {
        StepCache<T>& sc = cache_[t][l];
        const std::uint32_t in = l == 0 ? p_.embed : H;
        if (train && dropout > 0.0) {
          sc.in_mask.resize(B_ * in);
          const T scale = T(1) / T(1.0 - dropout);
          for (auto& m : sc.in_mask) m = drop_rng->bernoulli(dropout) ? T(0) : scale;
          for (std::size_t i = 0; i < x.size(); ++i) x[i] *= sc.in_mask[i];
        }
        sc.input = x;
        sc.c_prev = state.c[l];

        sc.gates.resize(B_ * 4 * H);
        kern::gemm_nt(x.data(), p_.layers[l].w_ih.data(), sc.gates.data(), B_, 4 * H, in,
                      p_.layers[l].b_ih.data());
        kern::gemm_nt(state.h[l].data(), p_.layers[l].w_hh.data(), scratch.data(), B_, 4 * H, H,
                      p_.layers[l].b_hh.data());
        kern::axpy(T(1), scratch.data(), sc.gates.data(), B_ * 4 * H);

        sc.c.resize(B_ * H);
        sc.tanh_c.resize(B_ * H);
        sc.h.resize(B_ * H);
        for (std::size_t b = 0; b < B_; ++b) {
          T* g = sc.gates.data() + b * 4 * H;
          const T* cp = sc.c_prev.data() + b * H;
          T* cc = sc.c.data() + b * H;
          T* tc = sc.tanh_c.data() + b * H;
          T* hh = sc.h.data() + b * H;
          for (std::uint32_t j = 0; j < H; ++j) {
            const T gi = sigmoid(g[j]);
            const T gf = sigmoid(g[H + j]);
            const T gg = std::tanh(g[2 * H + j]);
            const T go = sigmoid(g[3 * H + j]);
            g[j] = gi;
            g[H + j] = gf;
            g[2 * H + j] = gg;
            g[3 * H + j] = go;
            cc[j] = gf * cp[j] + gi * gg;
            tc[j] = std::tanh(cc[j]);
            hh[j] = go * tc[j];
          }
        }
        state.h[l] = sc.h;
        state.c[l] = sc.c;
        x = sc.h;
      }

      // Output projection + softmax.
      kern::gemm_nt(x.data(), p_.w_out.data(), logits.data(), B_, V, H, p_.b_out.data());
      std::vector<T>& dl = dlogits_[t];
      dl.assign(B_ * V, T(0));
      for (std::size_t b = 0; b < B_; ++b) {
        T* row = logits.data() + b * V;
        T maxv = row[0];
        for (std::uint32_t j = 1; j < V; ++j) maxv = std::max(maxv, row[j]);
        double sum = 0.0;
        for (std::uint32_t j = 0; j < V; ++j) sum += std::exp(double(row[j] - maxv));
        const double log_z = std::log(sum) + double(maxv);
        const auto target = targets[t * B_ + b];
        T* drow = dl.data() + b * V;
        for (std::uint32_t j = 0; j < V; ++j) {
          drow[j] = static_cast<T>(std::exp(double(row[j]) - log_z));
        }
        if (last_probs && t == T_ - 1) {
          last_probs->assign(drow, drow + V);
        }
        if (target >= 0) {
          if (std::uint32_t(target) >= V) throw DataError("target id out of vocab range");
          const double token_nll = log_z - double(logits[b * V + target]);
          nll += token_nll;
          if (per_token_nll) (*per_token_nll)[t * B_ + b] = token_nll;
          drow[target] -= T(1);
          ++tokens;
        } else {
          std::fill(drow, drow + V, T(0));
        }
      }
    }
    if (token_count) *token_count = tokens;
    return nll;
  }

  // Backpropagation through the cached segment. Gradients accumulate into
  // `grads`; the loss is the mean NLL over `norm_tokens` targets.
  void backward(Params<T>& grads, double norm_tokens) {
    const std::uint32_t H = p_.hidden;
    const std::uint32_t V = p_.vocab_dim;
    const std::size_t L = p_.layers.size();
    const T inv = static_cast<T>(1.0 / norm_tokens);

    std::vector<std::vector<T>> dh_carry(L, std::vector<T>(B_ * H, T(0)));
    std::vector<std::vector<T>> dc_carry(L, std::vector<T>(B_ * H, T(0)));
    std::vector<T> dgates(B_ * 4 * H);
    std::vector<T> dx;

    for (std::size_t t = T_; t-- > 0;) {
      std::vector<T>& dl = dlogits_[t];
      for (auto& v : dl) v *= inv;

      const StepCache<T>& top = cache_[t][L - 1];
      // d b_out, d W_out, dh(top).
      for (std::size_t b = 0; b < B_; ++b) {
        kern::axpy(T(1), dl.data() + b * V, grads.b_out.data(), V);
      }
      kern::gemm_tn_acc(dl.data(), top.h.data(), grads.w_out.data(), B_, V, H);
      std::vector<T> dh(B_ * H, T(0));
      kern::gemm_nn_acc(dl.data(), p_.w_out.data(), dh.data(), B_, V, H);
      kern::axpy(T(1), dh_carry[L - 1].data(), dh.data(), B_ * H);

      for (std::size_t l = L; l-- > 0;) {
        const StepCache<T>& sc = cache_[t][l];
        const std::uint32_t in = l == 0 ? p_.embed : H;
        std::vector<T>& dc = dc_carry[l];

        for (std::size_t b = 0; b < B_; ++b) {
          const T* g = sc.gates.data() + b * 4 * H;
          const T* cp = sc.c_prev.data() + b * H;
          const T* tc = sc.tanh_c.data() + b * H;
          const T* dhb = dh.data() + b * H;
          T* dcb = dc.data() + b * H;
          T* dg = dgates.data() + b * 4 * H;
          for (std::uint32_t j = 0; j < H; ++j) {
            const T gi = g[j], gf = g[H + j], gg = g[2 * H + j], go = g[3 * H + j];
            const T dho = dhb[j];
            const T dcj = dcb[j] + dho * go * (T(1) - tc[j] * tc[j]);
            dg[3 * H + j] = dho * tc[j] * go * (T(1) - go);          // o pre-activation
            dg[j] = dcj * gg * gi * (T(1) - gi);                    // i
            dg[H + j] = dcj * cp[j] * gf * (T(1) - gf);             // f
            dg[2 * H + j] = dcj * gi * (T(1) - gg * gg);            // g
            dcb[j] = dcj * gf;                                      // to t-1
          }
        }

        for (std::size_t b = 0; b < B_; ++b) {
          kern::axpy(T(1), dgates.data() + b * 4 * H, grads.layers[l].b_ih.data(), 4 * H);
          kern::axpy(T(1), dgates.data() + b * 4 * H, grads.layers[l].b_hh.data(), 4 * H);
        }
        kern::gemm_tn_acc(dgates.data(), sc.input.data(), grads.layers[l].w_ih.data(), B_, 4 * H,
                          in);
        const std::vector<T>& h_prev = t > 0 ? cache_[t - 1][l].h : init_h_[l];
        kern::gemm_tn_acc(dgates.data(), h_prev.data(), grads.layers[l].w_hh.data(), B_, 4 * H, H);

        dh_carry[l].assign(B_ * H, T(0));
        kern::gemm_nn_acc(dgates.data(), p_.layers[l].w_hh.data(), dh_carry[l].data(), B_, 4 * H,
                          H);

        dx.assign(B_ * in, T(0));
        kern::gemm_nn_acc(dgates.data(), p_.layers[l].w_ih.data(), dx.data(), B_, 4 * H, in);
        if (!sc.in_mask.empty()) {
          for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= sc.in_mask[i];
        }
        if (l > 0) {
          dh = dx;
          kern::axpy(T(1), dh_carry[l - 1].data(), dh.data(), B_ * H);
        } else {
          // Scatter into embedding rows.
          for (std::size_t b = 0; b < B_; ++b) {
            const auto id = inputs_back_[t * B_ + b];
            kern::axpy(T(1), dx.data() + b * in,
                       grads.embedding.data() + std::size_t(id) * p_.embed, in);
          }
        }
      }
    }
  }

  // backward() needs the input ids for the embedding scatter.
  void remember_inputs(const std::vector<std::int64_t>& inputs) { inputs_back_ = inputs; }

 private:
  const Params<T>& p_;
  std::size_t B_, T_;
  std::vector<std::vector<StepCache<T>>> cache_;
  std::vector<std::vector<T>> dlogits_;
  std::vector<std::vector<T>> init_h_;
  std::vector<std::int64_t> inputs_back_;
};

}  // namespace attachlab::lm
