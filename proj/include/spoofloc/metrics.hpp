// Frame-level detection metrics over pooled evaluation pairs.
//
// Conventions, fixed so sweeps reproduce bit-for-bit:
//   - scores are normalized to "higher is genuine" (HigherIsFake inputs are
//     negated, thresholds included);
//   - the decision at threshold t is genuine iff score >= t;
//   - F1 treats Fake as the positive class;
//   - EER pools frames across all utterances (micro). A per-utterance macro
//     mean is available separately.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "spoofloc/labelcore.hpp"

namespace spoofloc {

enum class Polarity : std::uint8_t { HigherIsGenuine, HigherIsFake };

struct ScoreSeq {
  std::vector<double> scores;
  Polarity polarity = Polarity::HigherIsGenuine;

  void validate() const {
    for (double s : scores)
      if (!std::isfinite(s)) throw std::invalid_argument("ScoreSeq: scores must be finite");
  }
};

struct EvalPair {
  std::string utt_id;
  ScoreSeq scores;
  FrameClassSeq reference;

  void validate() const {
    scores.validate();
    reference.validate();
    if (scores.scores.size() != reference.size())
      throw std::invalid_argument("EvalPair '" + utt_id + "': score length must equal reference length");
  }
};

struct DetPoint {
  double threshold = 0.0;
  double far = 0.0;  // fake frames accepted as genuine
  double frr = 0.0;  // genuine frames rejected
};

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

namespace detail {

struct PooledFrame {
  double score;  // genuineness (already polarity-normalized)
  bool genuine;
};

inline std::vector<PooledFrame> pool_frames(const std::vector<EvalPair>& pairs) {
  std::vector<PooledFrame> pool;
  for (const EvalPair& p : pairs) {
    p.validate();
    const double sign = p.scores.polarity == Polarity::HigherIsGenuine ? 1.0 : -1.0;
    for (std::size_t t = 0; t < p.reference.size(); ++t)
      pool.push_back({sign * p.scores.scores[t], p.reference.classes[t] == FrameClass::Real});
  }
  if (pool.empty()) throw std::invalid_argument("metrics: empty frame pool");
  return pool;
}

// Sweep points ordered by increasing threshold: FAR is non-increasing, FRR
// non-decreasing. Includes -inf/+inf sentinels; consecutive duplicates in
// (FAR, FRR) are collapsed.
inline std::vector<DetPoint> sweep(std::vector<PooledFrame> pool) {
  std::sort(pool.begin(), pool.end(),
            [](const PooledFrame& a, const PooledFrame& b) { return a.score < b.score; });
  std::size_t genuine_total = 0, fake_total = 0;
  for (const PooledFrame& f : pool) (f.genuine ? genuine_total : fake_total)++;
  if (genuine_total == 0 || fake_total == 0)
    throw std::invalid_argument("metrics: pool must contain both genuine and fake frames");

  std::vector<DetPoint> points;
  auto push = [&](double thr, std::size_t genuine_below, std::size_t fake_below) {
    DetPoint pt{thr, static_cast<double>(fake_total - fake_below) / static_cast<double>(fake_total),
                static_cast<double>(genuine_below) / static_cast<double>(genuine_total)};
    if (!points.empty() && points.back().far == pt.far && points.back().frr == pt.frr) return;
    points.push_back(pt);
  };

  push(-std::numeric_limits<double>::infinity(), 0, 0);
  std::size_t genuine_below = 0, fake_below = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (i == 0 || pool[i].score != pool[i - 1].score) push(pool[i].score, genuine_below, fake_below);
    (pool[i].genuine ? genuine_below : fake_below)++;
  }
  push(std::numeric_limits<double>::infinity(), genuine_below, fake_below);
  return points;
}

inline EerResult crossing(const std::vector<DetPoint>& points) {
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double d0 = points[i].far - points[i].frr;
    const double d1 = points[i + 1].far - points[i + 1].frr;
    if (d0 == 0.0) return {points[i].far, points[i].threshold};
    if (d0 > 0.0 && d1 <= 0.0) {
      const double alpha = d0 / (d0 - d1);
      const double eer = points[i].far + alpha * (points[i + 1].far - points[i].far);
      const double t0 = points[i].threshold;
      const double t1 = points[i + 1].threshold;
      double thr;
      if (std::isfinite(t0) && std::isfinite(t1)) thr = t0 + alpha * (t1 - t0);
      else if (std::isfinite(t0)) thr = t0;
      else if (std::isfinite(t1)) thr = t1;
      else thr = 0.0;  // constant-score pool: any threshold is equivalent
      return {eer, thr};
    }
  }
  const DetPoint& last = points.back();
  return {last.far, last.threshold};
}

}  // namespace detail

inline std::vector<DetPoint> det_curve(const std::vector<EvalPair>& pairs) {
  return detail::sweep(detail::pool_frames(pairs));
}

// Pooled (micro) EER with linear interpolation between the sweep points that
// bracket the FAR/FRR crossing. The returned threshold is in normalized
// (higher-is-genuine) score space.
inline EerResult frame_eer(const std::vector<EvalPair>& pairs) {
  return detail::crossing(det_curve(pairs));
}

// Unweighted mean of per-utterance EERs. Non-default mode; every utterance
// must contain both classes.
inline double frame_eer_macro(const std::vector<EvalPair>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("metrics: empty evaluation set");
  double sum = 0.0;
  for (const EvalPair& p : pairs) sum += frame_eer({p}).eer;
  return sum / static_cast<double>(pairs.size());
}

struct F1Result {
  double f1 = 0.0;
  bool degenerate = false;  // no predicted and no reference fakes
};

// F1 with Fake positive: predicted Fake iff normalized score < threshold.
inline F1Result frame_f1(const std::vector<EvalPair>& pairs, double threshold) {
  const auto pool = detail::pool_frames(pairs);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& f : pool) {
    const bool predicted_fake = f.score < threshold;
    if (predicted_fake && !f.genuine) ++tp;
    else if (predicted_fake && f.genuine) ++fp;
    else if (!predicted_fake && !f.genuine) ++fn;
  }
  if (tp == 0 && fp == 0 && fn == 0) return {0.0, true};
  const double precision = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (precision + recall == 0.0) return {0.0, false};
  return {2.0 * precision * recall / (precision + recall), false};
}

// Where a fake segment sits within its utterance.
enum class SegmentPosition : std::uint8_t { FullUtterance = 0, StartEdge = 1, EndEdge = 2, Middle = 3 };

constexpr std::array<const char*, 4> kSegmentPositionNames = {"FullUtterance", "StartEdge",
                                                              "EndEdge", "Middle"};

inline SegmentPosition classify_fake_segment(std::size_t start, std::size_t end_exclusive,
                                             std::size_t total_frames) {
  const bool at_start = start == 0;
  const bool at_end = end_exclusive == total_frames;
  if (at_start && at_end) return SegmentPosition::FullUtterance;
  if (at_start) return SegmentPosition::StartEdge;
  if (at_end) return SegmentPosition::EndEdge;
  return SegmentPosition::Middle;
}

struct PositionBreakdown {
  struct Category {
    std::size_t segment_count = 0;
    std::size_t fake_frames = 0;
    std::size_t misclassified_frames = 0;

    double error_rate() const {
      return fake_frames == 0 ? 0.0
                              : static_cast<double>(misclassified_frames) /
                                    static_cast<double>(fake_frames);
    }
  };
  std::array<Category, 4> categories;  // indexed by SegmentPosition

  std::size_t total_fake_frames() const {
    std::size_t n = 0;
    for (const auto& c : categories) n += c.fake_frames;
    return n;
  }
};

// Per-position error analysis: every maximal fake run in every reference is
// categorized by where it sits in the utterance; a fake frame is counted as
// misclassified when it is accepted as genuine at the given threshold.
inline PositionBreakdown position_breakdown(const std::vector<EvalPair>& pairs, double threshold) {
  PositionBreakdown out;
  for (const EvalPair& p : pairs) {
    p.validate();
    const double sign = p.scores.polarity == Polarity::HigherIsGenuine ? 1.0 : -1.0;
    const SegmentList segs = segments_from_frames(p.reference);
    for (const Segment& s : segs.segments) {
      if (s.cls != FrameClass::Fake) continue;
      auto& cat = out.categories[static_cast<std::size_t>(
          classify_fake_segment(s.start_frame, s.end_frame, segs.total_frames))];
      cat.segment_count += 1;
      cat.fake_frames += s.length();
      for (std::size_t t = s.start_frame; t < s.end_frame; ++t)
        if (sign * p.scores.scores[t] >= threshold) cat.misclassified_frames += 1;
    }
  }
  return out;
}

}  // namespace spoofloc
