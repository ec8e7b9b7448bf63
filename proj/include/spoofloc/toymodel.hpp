// Desk-scale per-frame multi-task classifier.
//
// Architecture: per-frame input (raw features with +/- w frames of context
// stacked, zero-padded at utterance edges) -> one tanh hidden layer shared
// by three affine heads:
//   binary head     -> logistic genuineness probability (higher = genuine)
//   positional head -> softmax over the 8 joint (class, position) labels
//   transition head -> logistic boundary probability (optional)
//
// Loss: L_total = L_BCE + lambda * L_aux, where L_aux depends on the mode
// (positional cross-entropy, transition BCE, or zero). Gradients are
// analytic; the test suite checks them against central finite differences.
//
// Training is single-threaded gradient descent (Adam optional) and fully
// determined by the seed. Parameters serialize to a little-endian flat
// binary format (see save_params).
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "spoofloc/errors.hpp"
#include "spoofloc/labelcore.hpp"
#include "spoofloc/mixer.hpp"
#include "spoofloc/rng.hpp"

namespace spoofloc {

struct FrameFeatureSeq {
  std::size_t dim = 0;
  std::vector<double> values;  // row-major, frames x dim
  double resolution_ms = 20.0;

  std::size_t frames() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(std::size_t t) const { return {values.data() + t * dim, dim}; }

  void validate() const {
    if (dim == 0 || values.empty() || values.size() % dim != 0)
      throw std::invalid_argument("FrameFeatureSeq: values must form a non-empty T x dim matrix");
    for (double v : values)
      if (!std::isfinite(v)) throw std::invalid_argument("FrameFeatureSeq: entries must be finite");
  }
};

// Feature-space training sample; mixable by the same splicing machinery as
// waveform samples (rows play the role of audio samples).
struct LabeledFeatures {
  FrameFeatureSeq feats;
  FrameClassSeq labels;
};

inline std::size_t frame_count(const LabeledFeatures& s) { return s.labels.size(); }

inline void check_mix_compatible(const LabeledFeatures& a, const LabeledFeatures& b) {
  if (a.labels.size() != b.labels.size() || a.feats.dim != b.feats.dim ||
      a.labels.resolution_ms != b.labels.resolution_ms ||
      a.feats.frames() != a.labels.size() || b.feats.frames() != b.labels.size())
    throw std::invalid_argument("mix_pair: feature sample shape mismatch");
}

inline LabeledFeatures splice_sample(const LabeledFeatures& a, const LabeledFeatures& b,
                                     std::size_t crossover) {
  LabeledFeatures out;
  out.feats.dim = a.feats.dim;
  out.feats.resolution_ms = a.feats.resolution_ms;
  const std::size_t cut = crossover * a.feats.dim;
  out.feats.values.assign(a.feats.values.begin(), a.feats.values.begin() + static_cast<std::ptrdiff_t>(cut));
  out.feats.values.insert(out.feats.values.end(),
                          b.feats.values.begin() + static_cast<std::ptrdiff_t>(cut),
                          b.feats.values.end());
  out.labels.resolution_ms = a.labels.resolution_ms;
  out.labels.classes.assign(a.labels.classes.begin(),
                            a.labels.classes.begin() + static_cast<std::ptrdiff_t>(crossover));
  out.labels.classes.insert(out.labels.classes.end(),
                            b.labels.classes.begin() + static_cast<std::ptrdiff_t>(crossover),
                            b.labels.classes.end());
  return out;
}

struct ToyModelParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t context_window = 0;  // frames of context per side baked into input_dim
  bool has_transition_head = true;

  std::vector<double> enc_w;  // hidden_dim x input_dim, row-major
  std::vector<double> enc_b;  // hidden_dim
  std::vector<double> bin_w;  // hidden_dim
  double bin_b = 0.0;
  std::vector<double> spl_w;  // 8 x hidden_dim, row-major
  std::vector<double> spl_b;  // 8
  std::vector<double> tr_w;   // hidden_dim (empty when no transition head)
  double tr_b = 0.0;

  void validate() const {
    if (input_dim == 0 || hidden_dim == 0)
      throw std::invalid_argument("ToyModelParams: dimensions must be positive");
    if (enc_w.size() != hidden_dim * input_dim || enc_b.size() != hidden_dim ||
        bin_w.size() != hidden_dim || spl_w.size() != kJointClassCount * hidden_dim ||
        spl_b.size() != static_cast<std::size_t>(kJointClassCount) ||
        tr_w.size() != (has_transition_head ? hidden_dim : 0))
      throw std::invalid_argument("ToyModelParams: tensor shapes inconsistent with dimensions");
  }
};

// Weights uniform in [-0.1, 0.1], biases zero, draw order fixed so that all
// loss modes start from identical shared weights under the same seed.
inline ToyModelParams init_params(std::size_t input_dim, std::size_t hidden_dim, Rng rng,
                                  std::size_t context_window = 0, bool transition_head = true) {
  ToyModelParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.context_window = context_window;
  p.has_transition_head = transition_head;
  auto draw = [&](std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-0.1, 0.1);
    return v;
  };
  p.enc_w = draw(hidden_dim * input_dim);
  p.enc_b.assign(hidden_dim, 0.0);
  p.bin_w = draw(hidden_dim);
  p.spl_w = draw(kJointClassCount * hidden_dim);
  p.spl_b.assign(kJointClassCount, 0.0);
  if (transition_head) p.tr_w = draw(hidden_dim);
  return p;
}

inline ToyModelParams zeros_like(const ToyModelParams& p) {
  ToyModelParams z = p;
  auto clear = [](std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); };
  clear(z.enc_w);
  clear(z.enc_b);
  clear(z.bin_w);
  clear(z.spl_w);
  clear(z.spl_b);
  clear(z.tr_w);
  z.bin_b = 0.0;
  z.tr_b = 0.0;
  return z;
}

inline std::vector<double> flatten(const ToyModelParams& p) {
  std::vector<double> out;
  out.reserve(p.enc_w.size() + p.enc_b.size() + p.bin_w.size() + 1 + p.spl_w.size() +
              p.spl_b.size() + p.tr_w.size() + 1);
  auto app = [&](const std::vector<double>& v) { out.insert(out.end(), v.begin(), v.end()); };
  app(p.enc_w);
  app(p.enc_b);
  app(p.bin_w);
  out.push_back(p.bin_b);
  app(p.spl_w);
  app(p.spl_b);
  app(p.tr_w);
  out.push_back(p.tr_b);
  return out;
}

inline void assign_from_flat(ToyModelParams& p, std::span<const double> flat) {
  std::size_t i = 0;
  auto take = [&](std::vector<double>& v) {
    for (double& x : v) x = flat[i++];
  };
  take(p.enc_w);
  take(p.enc_b);
  take(p.bin_w);
  p.bin_b = flat[i++];
  take(p.spl_w);
  take(p.spl_b);
  take(p.tr_w);
  p.tr_b = flat[i++];
  if (i != flat.size()) throw std::invalid_argument("assign_from_flat: size mismatch");
}

enum class LossMode : std::uint8_t { BinaryOnly, BinaryPlusSpl, BinaryPlusTransition };
enum class Optimizer : std::uint8_t { GradientDescent, Adam };

struct TrainConfig {
  double lambda = 0.1;
  LossMode loss_mode = LossMode::BinaryPlusSpl;
  double learning_rate = 0.1;
  std::size_t epochs = 20;
  std::size_t batch_size = 8;
  std::uint64_t seed = 0;
  std::size_t context_window = 0;
  std::size_t hidden_dim = 16;
  Optimizer optimizer = Optimizer::GradientDescent;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const {
    if (lambda < 0.0) throw std::invalid_argument("TrainConfig: lambda must be >= 0");
    if (batch_size == 0 || hidden_dim == 0)
      throw std::invalid_argument("TrainConfig: batch_size and hidden_dim must be positive");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  }
};

// Concatenate rows [t-w, t+w] per frame, zero-padded at the edges. The
// context is what lets a classifier exploit boundary-local artifacts.
inline FrameFeatureSeq stack_context(const FrameFeatureSeq& feats, std::size_t window) {
  feats.validate();
  if (window == 0) return feats;
  const std::size_t frames = feats.frames();
  const std::size_t span = 2 * window + 1;
  FrameFeatureSeq out;
  out.dim = feats.dim * span;
  out.resolution_ms = feats.resolution_ms;
  out.values.assign(frames * out.dim, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t o = 0; o < span; ++o) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + o) - static_cast<std::ptrdiff_t>(window);
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(frames)) continue;
      std::copy_n(feats.values.begin() + src * static_cast<std::ptrdiff_t>(feats.dim), feats.dim,
                  out.values.begin() + static_cast<std::ptrdiff_t>(t * out.dim + o * feats.dim));
    }
  }
  return out;
}

struct ModelOutputs {
  std::vector<double> p_genuine;    // T
  std::vector<double> p_spl;        // T x 8, row-major; rows on the simplex
  std::vector<double> p_transition; // T (empty without the transition head)
  std::size_t frames = 0;
};

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline void encode_frame(const ToyModelParams& p, std::span<const double> x,
                         std::span<double> hidden) {
  for (std::size_t j = 0; j < p.hidden_dim; ++j) {
    double acc = p.enc_b[j];
    const double* w = p.enc_w.data() + j * p.input_dim;
    for (std::size_t k = 0; k < p.input_dim; ++k) acc += w[k] * x[k];
    hidden[j] = std::tanh(acc);
  }
}

inline void head_outputs(const ToyModelParams& p, std::span<const double> hidden,
                         double& p_genuine, std::span<double> p_spl, double& p_transition) {
  double logit_b = p.bin_b;
  for (std::size_t j = 0; j < p.hidden_dim; ++j) logit_b += p.bin_w[j] * hidden[j];
  p_genuine = sigmoid(logit_b);

  double logits[kJointClassCount];
  double max_logit = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < kJointClassCount; ++k) {
    double acc = p.spl_b[static_cast<std::size_t>(k)];
    const double* w = p.spl_w.data() + static_cast<std::size_t>(k) * p.hidden_dim;
    for (std::size_t j = 0; j < p.hidden_dim; ++j) acc += w[j] * hidden[j];
    logits[k] = acc;
    max_logit = std::max(max_logit, acc);
  }
  double denom = 0.0;
  for (int k = 0; k < kJointClassCount; ++k) denom += std::exp(logits[k] - max_logit);
  for (int k = 0; k < kJointClassCount; ++k)
    p_spl[static_cast<std::size_t>(k)] = std::exp(logits[k] - max_logit) / denom;

  if (p.has_transition_head) {
    double logit_t = p.tr_b;
    for (std::size_t j = 0; j < p.hidden_dim; ++j) logit_t += p.tr_w[j] * hidden[j];
    p_transition = sigmoid(logit_t);
  } else {
    p_transition = 0.0;
  }
}

inline double safe_log(double x) { return std::log(std::max(x, 1e-300)); }

}  // namespace detail

inline ModelOutputs forward(const ToyModelParams& params, const FrameFeatureSeq& feats) {
  params.validate();
  feats.validate();
  if (feats.dim != params.input_dim)
    throw std::invalid_argument("forward: feature dim does not match model input_dim");
  const std::size_t frames = feats.frames();
  ModelOutputs out;
  out.frames = frames;
  out.p_genuine.resize(frames);
  out.p_spl.resize(frames * kJointClassCount);
  if (params.has_transition_head) out.p_transition.resize(frames);
  std::vector<double> hidden(params.hidden_dim);
  for (std::size_t t = 0; t < frames; ++t) {
    detail::encode_frame(params, feats.row(t), hidden);
    double p_tr = 0.0;
    detail::head_outputs(params, hidden, out.p_genuine[t],
                         {out.p_spl.data() + t * kJointClassCount, kJointClassCount}, p_tr);
    if (params.has_transition_head) out.p_transition[t] = p_tr;
  }
  return out;
}

// Per-frame means: BCE of the binary head against the class channel, plus
// the mode's auxiliary term.
inline double loss(const ModelOutputs& outputs, const JointLabelSeq& target, const TrainConfig& cfg,
                   double* bce_out = nullptr, double* aux_out = nullptr) {
  if (outputs.frames != target.size())
    throw std::invalid_argument("loss: output length does not match target length");
  const std::size_t frames = outputs.frames;
  const double n = static_cast<double>(frames);

  double bce = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    const double y = target.labels[t].cls == FrameClass::Real ? 1.0 : 0.0;
    const double p = outputs.p_genuine[t];
    bce -= y * detail::safe_log(p) + (1.0 - y) * detail::safe_log(1.0 - p);
  }
  bce /= n;

  double aux = 0.0;
  if (cfg.loss_mode == LossMode::BinaryPlusSpl) {
    for (std::size_t t = 0; t < frames; ++t) {
      const int k = joint_class_index(target.labels[t]);
      aux -= detail::safe_log(outputs.p_spl[t * kJointClassCount + static_cast<std::size_t>(k)]);
    }
    aux /= n;
  } else if (cfg.loss_mode == LossMode::BinaryPlusTransition) {
    if (outputs.p_transition.size() != frames)
      throw std::invalid_argument("loss: transition mode requires a transition head");
    const std::vector<bool> flags = transition_labels(target.class_channel());
    for (std::size_t t = 0; t < frames; ++t) {
      const double y = flags[t] ? 1.0 : 0.0;
      const double p = outputs.p_transition[t];
      aux -= y * detail::safe_log(p) + (1.0 - y) * detail::safe_log(1.0 - p);
    }
    aux /= n;
  }

  if (bce_out) *bce_out = bce;
  if (aux_out) *aux_out = aux;
  return bce + cfg.lambda * aux;
}

struct GradResult {
  double loss_value = 0.0;
  ToyModelParams grads;  // same shapes as the parameters
};

// Analytic gradients of the full loss with respect to every weight. The
// forward pass is recomputed internally; outputs are not cached across calls.
inline GradResult gradients(const ToyModelParams& params, const FrameFeatureSeq& feats,
                            const JointLabelSeq& target, const TrainConfig& cfg) {
  params.validate();
  feats.validate();
  if (feats.dim != params.input_dim)
    throw std::invalid_argument("gradients: feature dim does not match model input_dim");
  if (feats.frames() != target.size())
    throw std::invalid_argument("gradients: feature frames do not match target length");
  if (cfg.loss_mode == LossMode::BinaryPlusTransition && !params.has_transition_head)
    throw std::invalid_argument("gradients: transition mode requires a transition head");

  const std::size_t frames = feats.frames();
  const double inv_n = 1.0 / static_cast<double>(frames);
  const bool use_spl = cfg.loss_mode == LossMode::BinaryPlusSpl;
  const bool use_tr = cfg.loss_mode == LossMode::BinaryPlusTransition;
  const std::vector<bool> tr_flags = use_tr ? transition_labels(target.class_channel())
                                            : std::vector<bool>{};

  GradResult res;
  res.grads = zeros_like(params);
  ToyModelParams& g = res.grads;

  std::vector<double> hidden(params.hidden_dim);
  std::vector<double> d_hidden(params.hidden_dim);
  std::vector<double> p_spl(kJointClassCount);
  double bce = 0.0, aux = 0.0;

  for (std::size_t t = 0; t < frames; ++t) {
    const std::span<const double> x = feats.row(t);
    detail::encode_frame(params, x, hidden);
    double p_gen = 0.0, p_tr = 0.0;
    detail::head_outputs(params, hidden, p_gen, {p_spl.data(), p_spl.size()}, p_tr);

    const double y = target.labels[t].cls == FrameClass::Real ? 1.0 : 0.0;
    bce -= y * detail::safe_log(p_gen) + (1.0 - y) * detail::safe_log(1.0 - p_gen);
    const double g_bin = (p_gen - y) * inv_n;

    std::fill(d_hidden.begin(), d_hidden.end(), 0.0);
    for (std::size_t j = 0; j < params.hidden_dim; ++j) {
      g.bin_w[j] += g_bin * hidden[j];
      d_hidden[j] += g_bin * params.bin_w[j];
    }
    g.bin_b += g_bin;

    if (use_spl) {
      const int target_k = joint_class_index(target.labels[t]);
      aux -= detail::safe_log(p_spl[static_cast<std::size_t>(target_k)]);
      for (int k = 0; k < kJointClassCount; ++k) {
        const double g_k =
            cfg.lambda * (p_spl[static_cast<std::size_t>(k)] - (k == target_k ? 1.0 : 0.0)) * inv_n;
        double* gw = g.spl_w.data() + static_cast<std::size_t>(k) * params.hidden_dim;
        const double* w = params.spl_w.data() + static_cast<std::size_t>(k) * params.hidden_dim;
        for (std::size_t j = 0; j < params.hidden_dim; ++j) {
          gw[j] += g_k * hidden[j];
          d_hidden[j] += g_k * w[j];
        }
        g.spl_b[static_cast<std::size_t>(k)] += g_k;
      }
    }

    if (use_tr) {
      const double y_tr = tr_flags[t] ? 1.0 : 0.0;
      aux -= y_tr * detail::safe_log(p_tr) + (1.0 - y_tr) * detail::safe_log(1.0 - p_tr);
      const double g_tr = cfg.lambda * (p_tr - y_tr) * inv_n;
      for (std::size_t j = 0; j < params.hidden_dim; ++j) {
        g.tr_w[j] += g_tr * hidden[j];
        d_hidden[j] += g_tr * params.tr_w[j];
      }
      g.tr_b += g_tr;
    }

    for (std::size_t j = 0; j < params.hidden_dim; ++j) {
      const double d_act = d_hidden[j] * (1.0 - hidden[j] * hidden[j]);
      if (d_act == 0.0) continue;
      double* gw = g.enc_w.data() + j * params.input_dim;
      for (std::size_t k = 0; k < params.input_dim; ++k) gw[k] += d_act * x[k];
      g.enc_b[j] += d_act;
    }
  }

  res.loss_value = bce * inv_n + cfg.lambda * aux * inv_n;
  return res;
}

struct TrainResult {
  ToyModelParams params;
  std::vector<double> epoch_loss;
};

// Seeded mini-batch training. When mixing is enabled, each shuffled
// mini-batch runs through augment_batch (originals retained) before context
// stacking; the mix seed is re-derived per (epoch, batch) so runs stay
// deterministic. Mini-batches too small to pair partners are left
// unaugmented.
inline TrainResult train(const std::vector<LabeledFeatures>& corpus, const TrainConfig& cfg,
                         const std::optional<MixConfig>& mix_cfg = std::nullopt) {
  cfg.validate();
  if (corpus.empty()) throw std::invalid_argument("train: empty corpus");
  const std::size_t raw_dim = corpus.front().feats.dim;
  for (const LabeledFeatures& s : corpus) {
    s.feats.validate();
    s.labels.validate();
    if (s.feats.dim != raw_dim || s.feats.frames() != s.labels.size())
      throw std::invalid_argument("train: inconsistent corpus shapes");
  }

  const std::size_t input_dim = raw_dim * (2 * cfg.context_window + 1);
  TrainResult result;
  result.params = init_params(input_dim, cfg.hidden_dim, Rng::stream(cfg.seed, 0),
                              cfg.context_window);
  if (cfg.epochs == 0) return result;

  std::vector<double> flat = flatten(result.params);
  std::vector<double> adam_m(flat.size(), 0.0), adam_v(flat.size(), 0.0);
  std::size_t adam_step = 0;

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng = Rng::stream(cfg.seed, 1 + epoch);
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(shuffle_rng.uniform_int(0, i - 1));
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss_sum = 0.0;
    std::size_t epoch_samples = 0;
    for (std::size_t batch_start = 0; batch_start < order.size(); batch_start += cfg.batch_size) {
      const std::size_t batch_end = std::min(batch_start + cfg.batch_size, order.size());
      std::vector<LabeledFeatures> batch;
      batch.reserve(batch_end - batch_start);
      for (std::size_t i = batch_start; i < batch_end; ++i) batch.push_back(corpus[order[i]]);

      std::vector<std::pair<LabeledFeatures, JointLabelSeq>> samples;
      if (mix_cfg && mix_cfg->probability > 0.0 && mix_cfg->rounds > 0 &&
          (batch.size() >= 2 || mix_cfg->allow_self_partner)) {
        MixConfig batch_mix = *mix_cfg;
        std::uint64_t s = mix_cfg->seed;
        s = splitmix64(s) ^ (epoch * 0x9e3779b97f4a7c15ULL + batch_start);
        batch_mix.seed = s;
        samples = augment_batch(batch, batch_mix);
      } else {
        samples.reserve(batch.size());
        for (const LabeledFeatures& b : batch) samples.emplace_back(b, spl_encode(b.labels));
      }

      std::vector<double> grad_flat(flat.size(), 0.0);
      double batch_loss = 0.0;
      for (const auto& [sample, joint] : samples) {
        const FrameFeatureSeq stacked = stack_context(sample.feats, cfg.context_window);
        const GradResult gr = gradients(result.params, stacked, joint, cfg);
        batch_loss += gr.loss_value;
        const std::vector<double> gf = flatten(gr.grads);
        for (std::size_t k = 0; k < grad_flat.size(); ++k) grad_flat[k] += gf[k];
      }
      const double inv_batch = 1.0 / static_cast<double>(samples.size());
      batch_loss *= inv_batch;
      if (!std::isfinite(batch_loss)) throw NumericError("train: non-finite loss");
      epoch_loss_sum += batch_loss * static_cast<double>(samples.size());
      epoch_samples += samples.size();

      if (cfg.optimizer == Optimizer::GradientDescent) {
        for (std::size_t k = 0; k < flat.size(); ++k)
          flat[k] -= cfg.learning_rate * grad_flat[k] * inv_batch;
      } else {
        ++adam_step;
        const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam_step));
        const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam_step));
        for (std::size_t k = 0; k < flat.size(); ++k) {
          const double gk = grad_flat[k] * inv_batch;
          adam_m[k] = cfg.adam_beta1 * adam_m[k] + (1.0 - cfg.adam_beta1) * gk;
          adam_v[k] = cfg.adam_beta2 * adam_v[k] + (1.0 - cfg.adam_beta2) * gk * gk;
          flat[k] -= cfg.learning_rate * (adam_m[k] / bc1) / (std::sqrt(adam_v[k] / bc2) + cfg.adam_eps);
        }
      }
      assign_from_flat(result.params, flat);
    }
    result.epoch_loss.push_back(epoch_loss_sum / static_cast<double>(epoch_samples));
  }
  return result;
}

// Input-gradient attribution for the summed fake probability
// S = sum_t (1 - p_genuine(t)). Attribution of raw frame t is the L2 norm of
// dS/dfeats[t], with context stacking unfolded back onto raw frames.
inline std::vector<double> saliency(const ToyModelParams& params, const FrameFeatureSeq& raw_feats) {
  params.validate();
  raw_feats.validate();
  const std::size_t window = params.context_window;
  const std::size_t span = 2 * window + 1;
  if (raw_feats.dim * span != params.input_dim)
    throw std::invalid_argument("saliency: feature dim incompatible with model input_dim/context");
  const FrameFeatureSeq stacked = stack_context(raw_feats, window);
  const std::size_t frames = stacked.frames();

  std::vector<double> grad(frames * raw_feats.dim, 0.0);
  std::vector<double> hidden(params.hidden_dim);
  std::vector<double> p_spl(kJointClassCount);
  std::vector<double> d_input(params.input_dim);
  for (std::size_t u = 0; u < frames; ++u) {
    detail::encode_frame(params, stacked.row(u), hidden);
    double p_gen = 0.0, p_tr = 0.0;
    detail::head_outputs(params, hidden, p_gen, {p_spl.data(), p_spl.size()}, p_tr);
    const double d_logit = -p_gen * (1.0 - p_gen);  // dS/dlogit at frame u
    std::fill(d_input.begin(), d_input.end(), 0.0);
    for (std::size_t j = 0; j < params.hidden_dim; ++j) {
      const double d_act = d_logit * params.bin_w[j] * (1.0 - hidden[j] * hidden[j]);
      if (d_act == 0.0) continue;
      const double* w = params.enc_w.data() + j * params.input_dim;
      for (std::size_t k = 0; k < params.input_dim; ++k) d_input[k] += d_act * w[k];
    }
    for (std::size_t o = 0; o < span; ++o) {
      const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(u + o) - static_cast<std::ptrdiff_t>(window);
      if (t < 0 || t >= static_cast<std::ptrdiff_t>(frames)) continue;
      double* dst = grad.data() + static_cast<std::size_t>(t) * raw_feats.dim;
      const double* src = d_input.data() + o * raw_feats.dim;
      for (std::size_t k = 0; k < raw_feats.dim; ++k) dst[k] += src[k];
    }
  }

  std::vector<double> attribution(frames, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    double acc = 0.0;
    const double* row = grad.data() + t * raw_feats.dim;
    for (std::size_t k = 0; k < raw_feats.dim; ++k) acc += row[k] * row[k];
    attribution[t] = std::sqrt(acc);
  }
  return attribution;
}

// Versioned flat binary model format: magic "TMDL", little-endian fields
//   u32 version, u64 input_dim, u64 hidden_dim, u64 context_window,
//   u8 has_transition_head, then the flattened weights as f64.
inline void save_params(std::ostream& out, const ToyModelParams& params) {
  params.validate();
  out.write("TMDL", 4);
  auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  put_u32(1);
  put_u64(params.input_dim);
  put_u64(params.hidden_dim);
  put_u64(params.context_window);
  const char flag = params.has_transition_head ? 1 : 0;
  out.write(&flag, 1);
  const std::vector<double> flat = flatten(params);
  out.write(reinterpret_cast<const char*>(flat.data()),
            static_cast<std::streamsize>(flat.size() * sizeof(double)));
  if (!out) throw FormatError("save_params: write failed");
}

inline ToyModelParams load_params(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "TMDL", 4) != 0) throw FormatError("load_params: bad magic");
  auto get_u32 = [&]() {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  auto get_u64 = [&]() {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  const std::uint32_t version = get_u32();
  if (version != 1) throw FormatError("load_params: unsupported version");
  ToyModelParams p;
  p.input_dim = get_u64();
  p.hidden_dim = get_u64();
  p.context_window = get_u64();
  char flag = 0;
  in.read(&flag, 1);
  if (!in) throw FormatError("load_params: truncated header");
  p.has_transition_head = flag != 0;
  p.enc_w.resize(p.hidden_dim * p.input_dim);
  p.enc_b.resize(p.hidden_dim);
  p.bin_w.resize(p.hidden_dim);
  p.spl_w.resize(kJointClassCount * p.hidden_dim);
  p.spl_b.resize(kJointClassCount);
  p.tr_w.resize(p.has_transition_head ? p.hidden_dim : 0);
  std::vector<double> flat(flatten(p).size());
  in.read(reinterpret_cast<char*>(flat.data()),
          static_cast<std::streamsize>(flat.size() * sizeof(double)));
  if (!in) throw FormatError("load_params: truncated weights");
  assign_from_flat(p, flat);
  p.validate();
  return p;
}

}  // namespace spoofloc
