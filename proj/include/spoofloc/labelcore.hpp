// Frame/segment label algebra for partial-spoof localization.
//
// A frame sequence carries one binary class (Real/Fake) per fixed-duration
// frame. Maximal same-class runs ("segments") induce positional labels:
// Start, Middle, End for runs of length >= 2 and Unit for single-frame runs.
// Combined with the binary class this gives 8 joint classes per frame.
//
// Everything here is an immutable value; all operations are pure.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "spoofloc/errors.hpp"

namespace spoofloc {

enum class FrameClass : std::uint8_t { Real = 0, Fake = 1 };

inline char frame_class_char(FrameClass c) { return c == FrameClass::Real ? 'R' : 'F'; }

enum class PositionalLabel : std::uint8_t { Start = 0, Middle = 1, End = 2, Unit = 3 };

inline const char* positional_label_name(PositionalLabel p) {
  switch (p) {
    case PositionalLabel::Start: return "Start";
    case PositionalLabel::Middle: return "Middle";
    case PositionalLabel::End: return "End";
    default: return "Unit";
  }
}

struct FrameClassSeq {
  std::vector<FrameClass> classes;
  double resolution_ms = 20.0;

  std::size_t size() const { return classes.size(); }

  void validate() const {
    if (classes.empty()) throw std::invalid_argument("FrameClassSeq: T must be >= 1");
    if (!(resolution_ms > 0.0)) throw std::invalid_argument("FrameClassSeq: resolution_ms must be > 0");
  }

  bool operator==(const FrameClassSeq& other) const = default;
};

struct Segment {
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;  // exclusive
  FrameClass cls = FrameClass::Real;

  std::size_t length() const { return end_frame - start_frame; }
  bool operator==(const Segment& other) const = default;
};

// Canonical run decomposition: segments tile [0, total_frames) in order and
// adjacent segments differ in class.
struct SegmentList {
  std::vector<Segment> segments;
  std::size_t total_frames = 0;

  void validate() const {
    if (segments.empty() || total_frames == 0)
      throw std::invalid_argument("SegmentList: must cover at least one frame");
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const Segment& s = segments[i];
      if (s.start_frame != cursor || s.start_frame >= s.end_frame)
        throw std::invalid_argument("SegmentList: segments must tile [0, T) with no gaps or overlaps");
      if (i > 0 && segments[i - 1].cls == s.cls)
        throw std::invalid_argument("SegmentList: adjacent segments must differ in class");
      cursor = s.end_frame;
    }
    if (cursor != total_frames)
      throw std::invalid_argument("SegmentList: segments do not cover total_frames");
  }

  bool operator==(const SegmentList& other) const = default;
};

struct JointLabel {
  FrameClass cls = FrameClass::Real;
  PositionalLabel pos = PositionalLabel::Unit;
  bool operator==(const JointLabel& other) const = default;
};

// Index in [0, 8) over the joint (class, position) alphabet.
inline int joint_class_index(JointLabel l) {
  return static_cast<int>(l.cls) * 4 + static_cast<int>(l.pos);
}

constexpr int kJointClassCount = 8;

struct JointLabelSeq {
  std::vector<JointLabel> labels;
  double resolution_ms = 20.0;

  std::size_t size() const { return labels.size(); }

  FrameClassSeq class_channel() const {
    FrameClassSeq out;
    out.resolution_ms = resolution_ms;
    out.classes.reserve(labels.size());
    for (const JointLabel& l : labels) out.classes.push_back(l.cls);
    return out;
  }

  bool operator==(const JointLabelSeq& other) const = default;
};

struct TimeRegion {
  double start_s = 0.0;
  double end_s = 0.0;
  FrameClass cls = FrameClass::Real;
  bool operator==(const TimeRegion& other) const = default;
};

struct TimeAnnotation {
  std::string utt_id;
  std::vector<TimeRegion> regions;
  double duration_s = 0.0;

  static constexpr double kTileToleranceS = 1e-6;

  void validate() const {
    if (regions.empty()) throw FormatError("annotation '" + utt_id + "': no regions");
    double cursor = 0.0;
    for (const TimeRegion& r : regions) {
      if (std::abs(r.start_s - cursor) > kTileToleranceS)
        throw FormatError("annotation '" + utt_id + "': regions must tile [0, duration) contiguously");
      if (!(r.end_s > r.start_s))
        throw FormatError("annotation '" + utt_id + "': empty or reversed region");
      cursor = r.end_s;
    }
    if (std::abs(cursor - duration_s) > kTileToleranceS)
      throw FormatError("annotation '" + utt_id + "': regions do not cover the full duration");
  }

  bool operator==(const TimeAnnotation& other) const = default;
};

enum class PoolPolicy : std::uint8_t { AnyFake, Majority };

inline SegmentList segments_from_frames(const FrameClassSeq& frames) {
  frames.validate();
  SegmentList out;
  out.total_frames = frames.size();
  std::size_t run_start = 0;
  for (std::size_t i = 1; i <= frames.size(); ++i) {
    if (i == frames.size() || frames.classes[i] != frames.classes[run_start]) {
      out.segments.push_back({run_start, i, frames.classes[run_start]});
      run_start = i;
    }
  }
  return out;
}

inline FrameClassSeq frames_from_segments(const SegmentList& segs, double resolution_ms = 20.0) {
  segs.validate();
  FrameClassSeq out;
  out.resolution_ms = resolution_ms;
  out.classes.resize(segs.total_frames);
  for (const Segment& s : segs.segments)
    std::fill(out.classes.begin() + static_cast<std::ptrdiff_t>(s.start_frame),
              out.classes.begin() + static_cast<std::ptrdiff_t>(s.end_frame), s.cls);
  return out;
}

// Positional labeling: each frame gets its class plus its relative position
// within the maximal same-class run containing it.
inline JointLabelSeq spl_encode(const FrameClassSeq& frames) {
  frames.validate();
  JointLabelSeq out;
  out.resolution_ms = frames.resolution_ms;
  out.labels.resize(frames.size());
  const SegmentList segs = segments_from_frames(frames);
  for (const Segment& s : segs.segments) {
    if (s.length() == 1) {
      out.labels[s.start_frame] = {s.cls, PositionalLabel::Unit};
      continue;
    }
    out.labels[s.start_frame] = {s.cls, PositionalLabel::Start};
    for (std::size_t i = s.start_frame + 1; i + 1 < s.end_frame; ++i)
      out.labels[i] = {s.cls, PositionalLabel::Middle};
    out.labels[s.end_frame - 1] = {s.cls, PositionalLabel::End};
  }
  return out;
}

// Boundary flags: both frames adjacent to every class change are flagged.
// Utterance edges alone never flag; only real<->fake changes inside the
// utterance count.
inline std::vector<bool> transition_labels(const FrameClassSeq& frames) {
  frames.validate();
  const std::size_t n = frames.size();
  std::vector<bool> out(n, false);
  for (std::size_t i = 1; i < n; ++i) {
    if (frames.classes[i] != frames.classes[i - 1]) {
      out[i - 1] = true;
      out[i] = true;
    }
  }
  return out;
}

namespace detail {
inline double interval_overlap(double a_lo, double a_hi, double b_lo, double b_hi) {
  return std::max(0.0, std::min(a_hi, b_hi) - std::max(a_lo, b_lo));
}
}  // namespace detail

// Time annotation to frame labels. Frame t covers [t*r, (t+1)*r) ms; region
// boundaries exactly on a frame edge contribute zero overlap to the earlier
// frame (half-open intervals throughout). Under AnyFake a frame is Fake iff
// any Fake region overlaps it; under Majority iff the Fake overlap is at
// least half the frame's covered span (ties go to Fake).
inline FrameClassSeq labels_from_annotation(const TimeAnnotation& ann, double resolution_ms,
                                            PoolPolicy policy) {
  ann.validate();
  if (!(resolution_ms > 0.0)) throw std::invalid_argument("labels_from_annotation: resolution_ms must be > 0");
  const double duration_ms = ann.duration_s * 1000.0;
  const std::size_t frames = static_cast<std::size_t>(std::ceil(duration_ms / resolution_ms - 1e-9));
  if (frames == 0) throw FormatError("annotation '" + ann.utt_id + "': duration too short for one frame");

  constexpr double kEpsMs = 1e-6;
  FrameClassSeq out;
  out.resolution_ms = resolution_ms;
  out.classes.resize(frames, FrameClass::Real);
  for (std::size_t t = 0; t < frames; ++t) {
    const double lo = static_cast<double>(t) * resolution_ms;
    const double hi = lo + resolution_ms;
    double fake_overlap = 0.0;
    double covered = 0.0;
    for (const TimeRegion& r : ann.regions) {
      const double ov = detail::interval_overlap(lo, hi, r.start_s * 1000.0, r.end_s * 1000.0);
      covered += ov;
      if (r.cls == FrameClass::Fake) fake_overlap += ov;
    }
    const bool fake = policy == PoolPolicy::AnyFake ? fake_overlap > kEpsMs
                                                    : fake_overlap >= covered / 2.0 - kEpsMs;
    out.classes[t] = fake ? FrameClass::Fake : FrameClass::Real;
  }
  return out;
}

// Coarsen labels by grouping `factor` frames; ceil semantics keep a partial
// trailing group. Majority ties go to Fake, consistent with
// labels_from_annotation.
inline FrameClassSeq downsample_labels(const FrameClassSeq& frames, std::size_t factor,
                                       PoolPolicy policy) {
  frames.validate();
  if (factor < 1) throw std::invalid_argument("downsample_labels: factor must be >= 1");
  const std::size_t groups = (frames.size() + factor - 1) / factor;
  FrameClassSeq out;
  out.resolution_ms = frames.resolution_ms * static_cast<double>(factor);
  out.classes.resize(groups, FrameClass::Real);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t lo = g * factor;
    const std::size_t hi = std::min(lo + factor, frames.size());
    std::size_t fake = 0;
    for (std::size_t i = lo; i < hi; ++i)
      if (frames.classes[i] == FrameClass::Fake) ++fake;
    const bool is_fake = policy == PoolPolicy::AnyFake ? fake > 0 : 2 * fake >= (hi - lo);
    out.classes[g] = is_fake ? FrameClass::Fake : FrameClass::Real;
  }
  return out;
}

}  // namespace spoofloc
