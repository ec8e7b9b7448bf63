// Synthetic corpora.
//
// gen_feature_corpus builds feature-space utterances with a controllable
// boundary-artifact shortcut: feature 0 carries class content (means +/-
// margin/2 for Real/Fake), feature 1 carries a spike on transition-adjacent
// frames of either class (so it predicts boundary-ness, never class), and
// the remaining features are pure noise. Class runs use a truncated
// geometric length distribution, which yields both single-frame and long
// segments.
//
// splice_wav_corpus builds partial-spoof waveforms from pools of real and
// fake audio, with annotations tiling the duration exactly on a 10 ms grid.
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "spoofloc/errors.hpp"
#include "spoofloc/labelcore.hpp"
#include "spoofloc/rng.hpp"
#include "spoofloc/toymodel.hpp"

namespace spoofloc {

struct SynthConfig {
  std::size_t num_utterances = 100;
  std::size_t frames_per_utterance = 25;
  std::size_t feature_dim = 4;  // >= 2: content + artifact channels
  double content_margin = 1.0;  // separation of Real vs Fake content means
  double boundary_spike = 0.0;  // added to the artifact feature at transitions
  double noise_sigma = 0.5;
  std::size_t min_run = 1;
  std::size_t max_run = 10;
  double continue_prob = 0.7;  // geometric continuation beyond min_run
  double resolution_ms = 160.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (frames_per_utterance < 2) throw std::invalid_argument("SynthConfig: need T >= 2");
    if (feature_dim < 2) throw std::invalid_argument("SynthConfig: feature_dim must be >= 2");
    if (!(noise_sigma > 0.0)) throw std::invalid_argument("SynthConfig: noise_sigma must be > 0");
    if (content_margin < 0.0 || boundary_spike < 0.0)
      throw std::invalid_argument("SynthConfig: margins must be >= 0");
    if (min_run < 1 || min_run > max_run)
      throw std::invalid_argument("SynthConfig: infeasible run length distribution");
    if (continue_prob < 0.0 || continue_prob >= 1.0)
      throw std::invalid_argument("SynthConfig: continue_prob must lie in [0, 1)");
  }
};

inline std::vector<std::pair<FrameFeatureSeq, JointLabelSeq>> gen_feature_corpus(
    const SynthConfig& cfg) {
  cfg.validate();
  std::vector<std::pair<FrameFeatureSeq, JointLabelSeq>> corpus;
  corpus.reserve(cfg.num_utterances);
  for (std::size_t u = 0; u < cfg.num_utterances; ++u) {
    Rng rng = Rng::stream(cfg.seed, u);

    FrameClassSeq classes;
    classes.resolution_ms = cfg.resolution_ms;
    FrameClass cls = rng.bernoulli(0.5) ? FrameClass::Fake : FrameClass::Real;
    while (classes.size() < cfg.frames_per_utterance) {
      std::size_t len = cfg.min_run;
      while (len < cfg.max_run && rng.bernoulli(cfg.continue_prob)) ++len;
      len = std::min(len, cfg.frames_per_utterance - classes.size());
      classes.classes.insert(classes.classes.end(), len, cls);
      cls = cls == FrameClass::Real ? FrameClass::Fake : FrameClass::Real;
    }

    const std::vector<bool> boundary = transition_labels(classes);
    FrameFeatureSeq feats;
    feats.dim = cfg.feature_dim;
    feats.resolution_ms = cfg.resolution_ms;
    feats.values.resize(cfg.frames_per_utterance * cfg.feature_dim);
    for (std::size_t t = 0; t < cfg.frames_per_utterance; ++t) {
      double* row = feats.values.data() + t * cfg.feature_dim;
      const double content_mean = classes.classes[t] == FrameClass::Real ? cfg.content_margin / 2.0
                                                                         : -cfg.content_margin / 2.0;
      row[0] = rng.gaussian(content_mean, cfg.noise_sigma);
      row[1] = rng.gaussian(boundary[t] ? cfg.boundary_spike : 0.0, cfg.noise_sigma);
      for (std::size_t k = 2; k < cfg.feature_dim; ++k) row[k] = rng.gaussian(0.0, cfg.noise_sigma);
    }
    corpus.emplace_back(std::move(feats), spl_encode(classes));
  }
  return corpus;
}

struct SpliceConfig {
  double duration_s = 4.0;      // target utterance length, 10 ms grid
  double crossfade_ms = 0.0;    // equal-power crossfade span at junctions
  double min_segment_s = 0.4;
  double max_segment_s = 1.5;
  double fake_ratio = 0.3;      // target fraction of fake time, in (0, 1)
  std::uint32_t sample_rate = 16000;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(duration_s > 0.0) || !(min_segment_s > 0.0) || !(max_segment_s >= min_segment_s))
      throw std::invalid_argument("SpliceConfig: durations must be positive and ordered");
    if (crossfade_ms < 0.0 || crossfade_ms / 1000.0 >= min_segment_s)
      throw std::invalid_argument("SpliceConfig: crossfade must be shorter than the min segment");
    if (!(fake_ratio > 0.0) || !(fake_ratio < 1.0))
      throw std::invalid_argument("SpliceConfig: fake_ratio must lie in (0, 1)");
    if (sample_rate == 0) throw std::invalid_argument("SpliceConfig: sample_rate must be positive");
  }
};

struct SplicedUtterance {
  std::string utt_id;
  std::vector<double> samples;  // mono, [-1, 1]
  TimeAnnotation annotation;
};

namespace detail {

inline double snap_to_10ms(double seconds) { return std::round(seconds * 100.0) / 100.0; }

// Pick a pool excerpt of `need` samples; throws when no pool entry is long
// enough.
inline std::size_t pick_source(const std::vector<std::vector<double>>& pool, std::size_t need,
                               Rng& rng, std::size_t& offset_out) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (pool[i].size() >= need) eligible.push_back(i);
  if (eligible.empty())
    throw FormatError("splice_wav_corpus: no pool audio long enough for the requested segment");
  const std::size_t idx = eligible[rng.uniform_int(0, eligible.size() - 1)];
  offset_out = pool[idx].size() == need
                   ? 0
                   : static_cast<std::size_t>(rng.uniform_int(0, pool[idx].size() - need));
  return idx;
}

}  // namespace detail

// Build `count` partial-spoof utterances by concatenating excerpts from the
// real and fake pools. Each excerpt's class is drawn with P(Fake) =
// fake_ratio; adjacent same-class regions are merged in the annotation, so
// the emitted regions always alternate. Region boundaries sit on the 10 ms
// annotation grid; with crossfade_ms > 0 an equal-power fade spans each
// junction, centered on the annotated boundary.
inline std::vector<SplicedUtterance> splice_wav_corpus(
    const std::vector<std::vector<double>>& real_pool,
    const std::vector<std::vector<double>>& fake_pool, const SpliceConfig& cfg, std::size_t count) {
  cfg.validate();
  if (real_pool.empty() || fake_pool.empty())
    throw std::invalid_argument("splice_wav_corpus: both pools must be non-empty");
  const double sr = static_cast<double>(cfg.sample_rate);
  const std::size_t min_seg_samples = static_cast<std::size_t>(std::round(cfg.min_segment_s * sr));
  for (const auto* pool : {&real_pool, &fake_pool})
    for (const auto& audio : *pool)
      if (audio.size() < min_seg_samples)
        throw FormatError("splice_wav_corpus: pool audio shorter than the minimum segment");

  const double duration = detail::snap_to_10ms(cfg.duration_s);
  const double crossfade_s = cfg.crossfade_ms / 1000.0;
  std::vector<SplicedUtterance> out;
  out.reserve(count);

  for (std::size_t u = 0; u < count; ++u) {
    Rng rng = Rng::stream(cfg.seed, u);

    // Segment plan: 10 ms-aligned boundaries, classes i.i.d. by fake_ratio.
    std::vector<TimeRegion> plan;
    double cursor = 0.0;
    while (cursor < duration - 1e-9) {
      double seg = detail::snap_to_10ms(rng.uniform(cfg.min_segment_s, cfg.max_segment_s));
      seg = std::max(seg, 0.01);
      const double end = std::min(detail::snap_to_10ms(cursor + seg), duration);
      const FrameClass cls = rng.bernoulli(cfg.fake_ratio) ? FrameClass::Fake : FrameClass::Real;
      plan.push_back({cursor, end, cls});
      cursor = end;
    }

    SplicedUtterance utt;
    char id[32];
    std::snprintf(id, sizeof id, "synth_%04zu", u);
    utt.utt_id = id;
    const std::size_t total_samples = static_cast<std::size_t>(std::round(duration * sr));
    utt.samples.assign(total_samples, 0.0);

    for (std::size_t k = 0; k < plan.size(); ++k) {
      const TimeRegion& region = plan[k];
      // interior junctions get half the crossfade on each side
      const double lead = k == 0 ? 0.0 : crossfade_s / 2.0;
      const double tail = k + 1 == plan.size() ? 0.0 : crossfade_s / 2.0;
      const std::size_t begin = static_cast<std::size_t>(std::round((region.start_s - lead) * sr));
      const std::size_t end = static_cast<std::size_t>(std::round((region.end_s + tail) * sr));
      const std::size_t need = end - begin;

      const auto& pool = region.cls == FrameClass::Fake ? fake_pool : real_pool;
      std::size_t offset = 0;
      const std::size_t src = detail::pick_source(pool, need, rng, offset);
      const std::vector<double>& audio = pool[src];

      const std::size_t fade = static_cast<std::size_t>(std::round(crossfade_s * sr));
      for (std::size_t s = 0; s < need; ++s) {
        double gain = 1.0;
        if (k > 0 && fade > 0 && s < fade) gain = std::sqrt((static_cast<double>(s) + 0.5) / fade);
        if (k + 1 < plan.size() && fade > 0 && need - s <= fade)
          gain = std::sqrt((static_cast<double>(need - s) - 0.5) / fade);
        utt.samples[begin + s] += gain * audio[offset + s];
      }
    }
    for (double& s : utt.samples) s = std::clamp(s, -1.0, 1.0);

    // merge adjacent same-class regions for the canonical annotation
    utt.annotation.utt_id = utt.utt_id;
    utt.annotation.duration_s = duration;
    for (const TimeRegion& region : plan) {
      if (!utt.annotation.regions.empty() && utt.annotation.regions.back().cls == region.cls)
        utt.annotation.regions.back().end_s = region.end_s;
      else
        utt.annotation.regions.push_back(region);
    }
    utt.annotation.validate();
    out.push_back(std::move(utt));
  }
  return out;
}

}  // namespace spoofloc
