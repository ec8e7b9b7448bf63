// Cross-segment mixing: splice two aligned samples (payload and frame
// labels) at a shared random crossover point and recompute positional
// labels on the spliced class channel.
//
// Indexing note: the mask definition is 1-indexed upstream of this library
// (M(t) = 1 for t <= lambda_c). Internally everything is 0-indexed: a
// crossover of lambda_c keeps indices [0, lambda_c) from sample A and
// [lambda_c, T) from sample B. Valid crossovers are {1, ..., T-1}, so both
// parts are non-empty.
//
// mix_pair/augment_batch are templates over any sample type that provides
//   frame_count(s)            -> number of label frames
//   check_mix_compatible(a,b) -> throws std::invalid_argument on mismatch
//   splice_sample(a,b,c)      -> payload + class labels spliced at c
// MixSample (waveform-backed) is defined here; feature-backed samples live
// with the model code.
#pragma once

#include <cstdint>
#include <sstream>
#include <utility>
#include <vector>

#include "spoofloc/labelcore.hpp"
#include "spoofloc/rng.hpp"

namespace spoofloc {

struct MixSample {
  std::vector<double> waveform;  // amplitudes in [-1, 1]
  FrameClassSeq labels;
  std::size_t samples_per_frame = 1;

  void validate() const {
    labels.validate();
    if (samples_per_frame == 0) throw std::invalid_argument("MixSample: samples_per_frame must be >= 1");
    if (waveform.size() != labels.size() * samples_per_frame)
      throw std::invalid_argument("MixSample: waveform length must equal T * samples_per_frame");
    for (double v : waveform)
      if (v < -1.0 || v > 1.0 || !std::isfinite(v))
        throw std::invalid_argument("MixSample: amplitudes must lie in [-1, 1]");
  }
};

inline std::size_t frame_count(const MixSample& s) { return s.labels.size(); }

inline void check_mix_compatible(const MixSample& a, const MixSample& b) {
  if (a.labels.size() != b.labels.size() || a.samples_per_frame != b.samples_per_frame ||
      a.labels.resolution_ms != b.labels.resolution_ms) {
    std::ostringstream msg;
    msg << "mix_pair: shape mismatch (T " << a.labels.size() << " vs " << b.labels.size()
        << ", samples_per_frame " << a.samples_per_frame << " vs " << b.samples_per_frame
        << ", resolution_ms " << a.labels.resolution_ms << " vs " << b.labels.resolution_ms << ")";
    throw std::invalid_argument(msg.str());
  }
}

inline MixSample splice_sample(const MixSample& a, const MixSample& b, std::size_t crossover) {
  MixSample out;
  out.samples_per_frame = a.samples_per_frame;
  out.labels.resolution_ms = a.labels.resolution_ms;
  const std::size_t frames = a.labels.size();
  const std::size_t cut = crossover * a.samples_per_frame;
  out.waveform.assign(a.waveform.begin(), a.waveform.begin() + static_cast<std::ptrdiff_t>(cut));
  out.waveform.insert(out.waveform.end(), b.waveform.begin() + static_cast<std::ptrdiff_t>(cut),
                      b.waveform.end());
  out.labels.classes.assign(a.labels.classes.begin(),
                            a.labels.classes.begin() + static_cast<std::ptrdiff_t>(crossover));
  out.labels.classes.insert(out.labels.classes.end(),
                            b.labels.classes.begin() + static_cast<std::ptrdiff_t>(crossover),
                            b.labels.classes.end());
  (void)frames;
  return out;
}

struct CrossoverMask {
  std::size_t frames = 0;
  std::size_t crossover = 0;  // indices [0, crossover) take sample A

  std::vector<std::uint8_t> values() const {
    std::vector<std::uint8_t> m(frames, 0);
    for (std::size_t t = 0; t < crossover; ++t) m[t] = 1;
    return m;
  }
};

struct MixConfig {
  double probability = 0.2;
  std::size_t rounds = 2;
  std::uint64_t seed = 0;
  bool allow_self_partner = false;

  void validate() const {
    if (probability < 0.0 || probability > 1.0)
      throw std::invalid_argument("MixConfig: probability must lie in [0, 1]");
  }
};

// Uniform crossover point from {1, ..., T-1}.
inline std::size_t sample_crossover(std::size_t frames, Rng& rng) {
  if (frames < 2) throw std::invalid_argument("sample_crossover: need T >= 2 to split");
  return static_cast<std::size_t>(rng.uniform_int(1, frames - 1));
}

inline CrossoverMask build_mask(std::size_t frames, std::size_t crossover) {
  if (crossover < 1 || crossover > frames - 1)
    throw std::invalid_argument("build_mask: crossover must lie in [1, T-1]");
  return {frames, crossover};
}

// Splice a pair at `crossover` and recompute the joint labels on the spliced
// class channel. Positional labels always come from re-encoding, so a
// same-class junction melts into the surrounding run instead of becoming a
// new boundary.
template <class Sample>
std::pair<Sample, JointLabelSeq> mix_pair(const Sample& a, const Sample& b, std::size_t crossover) {
  check_mix_compatible(a, b);
  const std::size_t frames = frame_count(a);
  if (crossover < 1 || crossover > frames - 1)
    throw std::invalid_argument("mix_pair: crossover must lie in [1, T-1]");
  Sample out = splice_sample(a, b, crossover);
  JointLabelSeq joint = spl_encode(out.labels);
  return {std::move(out), std::move(joint)};
}

// Probability-gated multi-round augmentation. Output keeps every original
// (with its own joint labels) in order, followed by one augmented sample per
// selected original. Each item draws from its own RNG stream derived from
// (seed, item index), so results are independent of processing order.
template <class Sample>
std::vector<std::pair<Sample, JointLabelSeq>> augment_batch(const std::vector<Sample>& batch,
                                                            const MixConfig& cfg) {
  cfg.validate();
  if (batch.empty()) throw std::invalid_argument("augment_batch: empty batch");
  const std::size_t frames = frame_count(batch.front());
  for (const Sample& s : batch) {
    check_mix_compatible(batch.front(), s);
    if (frame_count(s) < 2 && cfg.probability > 0.0 && cfg.rounds > 0)
      throw std::invalid_argument("augment_batch: samples must have T >= 2 to mix");
  }
  if (cfg.probability > 0.0 && cfg.rounds > 0 && !cfg.allow_self_partner && batch.size() < 2)
    throw std::invalid_argument("augment_batch: need batch size >= 2 unless self-partnering is allowed");

  std::vector<std::pair<Sample, JointLabelSeq>> out;
  out.reserve(batch.size() * 2);
  for (const Sample& s : batch) out.emplace_back(s, spl_encode(s.labels));

  for (std::size_t i = 0; i < batch.size(); ++i) {
    Rng rng = Rng::stream(cfg.seed, i);
    if (!rng.bernoulli(cfg.probability) || cfg.rounds == 0) continue;
    Sample current = batch[i];
    for (std::size_t round = 0; round < cfg.rounds; ++round) {
      std::size_t partner;
      if (cfg.allow_self_partner) {
        partner = static_cast<std::size_t>(rng.uniform_int(0, batch.size() - 1));
      } else {
        // draw from the batch minus the original index
        partner = static_cast<std::size_t>(rng.uniform_int(0, batch.size() - 2));
        if (partner >= i) ++partner;
      }
      const std::size_t crossover = sample_crossover(frames, rng);
      current = mix_pair(current, batch[partner], crossover).first;
    }
    out.emplace_back(current, spl_encode(current.labels));
  }
  return out;
}

}  // namespace spoofloc
