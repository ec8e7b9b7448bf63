#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spoofloc/metrics.hpp"

using namespace spoofloc;

namespace {

EvalPair pair_of(std::vector<double> scores, std::initializer_list<char> classes,
                 Polarity polarity = Polarity::HigherIsGenuine) {
  EvalPair out;
  out.utt_id = "u";
  out.scores.scores = std::move(scores);
  out.scores.polarity = polarity;
  for (char c : classes)
    out.reference.classes.push_back(c == 'F' ? FrameClass::Fake : FrameClass::Real);
  return out;
}

std::vector<EvalPair> random_pool(Rng& rng, std::size_t frames, bool ensure_both = true) {
  std::vector<EvalPair> pairs;
  EvalPair p;
  p.utt_id = "u0";
  for (std::size_t t = 0; t < frames; ++t) {
    p.scores.scores.push_back(rng.uniform(-2.0, 2.0));
    p.reference.classes.push_back(rng.bernoulli(0.5) ? FrameClass::Fake : FrameClass::Real);
  }
  if (ensure_both) {
    p.reference.classes[0] = FrameClass::Real;
    p.reference.classes[frames - 1] = FrameClass::Fake;
  }
  pairs.push_back(std::move(p));
  return pairs;
}

void flatten_pool(const std::vector<EvalPair>& pairs, std::vector<double>& scores,
                  std::vector<bool>& genuine) {
  for (const EvalPair& p : pairs) {
    const double sign = p.scores.polarity == Polarity::HigherIsGenuine ? 1.0 : -1.0;
    for (std::size_t t = 0; t < p.reference.size(); ++t) {
      scores.push_back(sign * p.scores.scores[t]);
      genuine.push_back(p.reference.classes[t] == FrameClass::Real);
    }
  }
}

}  // namespace

TEST_CASE("frame_eer on separable and degenerate pools") {
  const auto separable = std::vector<EvalPair>{pair_of({0.9, 0.8, 0.1, 0.2}, {'R', 'R', 'F', 'F'})};
  CHECK(frame_eer(separable).eer == doctest::Approx(0.0));

  const auto constant = std::vector<EvalPair>{pair_of({0.5, 0.5, 0.5, 0.5}, {'R', 'R', 'F', 'F'})};
  CHECK(frame_eer(constant).eer == doctest::Approx(0.5));

  const auto single_class = std::vector<EvalPair>{pair_of({0.1, 0.9}, {'R', 'R'})};
  CHECK_THROWS_AS(frame_eer(single_class), std::invalid_argument);
}

TEST_CASE("frame_eer equals the exhaustive sweep oracle") {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto pairs = random_pool(rng, 2 + rng.uniform_int(0, 198));
    std::vector<double> scores;
    std::vector<bool> genuine;
    flatten_pool(pairs, scores, genuine);
    CHECK(frame_eer(pairs).eer == doctest::Approx(oracle::eer_sweep(scores, genuine)).epsilon(1e-9));
  }
}

TEST_CASE("polarity involution leaves all metrics unchanged") {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const auto pairs = random_pool(rng, 2 + rng.uniform_int(0, 98));
    auto flipped = pairs;
    for (EvalPair& p : flipped) {
      for (double& s : p.scores.scores) s = -s;
      p.scores.polarity = Polarity::HigherIsFake;
    }
    CHECK(frame_eer(pairs).eer == frame_eer(flipped).eer);
    CHECK(frame_f1(pairs, 0.3).f1 == frame_f1(flipped, 0.3).f1);
    const auto b1 = position_breakdown(pairs, 0.3);
    const auto b2 = position_breakdown(flipped, 0.3);
    for (std::size_t c = 0; c < 4; ++c)
      CHECK(b1.categories[c].misclassified_frames == b2.categories[c].misclassified_frames);
  }
}

TEST_CASE("EER is invariant under strictly increasing score transforms") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const auto pairs = random_pool(rng, 2 + rng.uniform_int(0, 98));
    auto warped = pairs;
    for (EvalPair& p : warped)
      for (double& s : p.scores.scores) s = std::tanh(s) * 3.0 + 0.1 * s;
    CHECK(frame_eer(pairs).eer == doctest::Approx(frame_eer(warped).eer).epsilon(1e-12));
  }
}

TEST_CASE("shuffling evaluation pairs changes nothing") {
  Rng rng(14);
  std::vector<EvalPair> pairs;
  for (int u = 0; u < 6; ++u) {
    auto p = random_pool(rng, 20)[0];
    p.utt_id = "u" + std::to_string(u);
    pairs.push_back(std::move(p));
  }
  auto shuffled = pairs;
  std::swap(shuffled[0], shuffled[5]);
  std::swap(shuffled[1], shuffled[3]);
  CHECK(frame_eer(pairs).eer == frame_eer(shuffled).eer);
  CHECK(frame_f1(pairs, 0.0).f1 == frame_f1(shuffled, 0.0).f1);
}

TEST_CASE("frame_f1 fixed examples") {
  // all correct with fakes present
  const auto perfect = std::vector<EvalPair>{pair_of({0.9, 0.1, 0.1}, {'R', 'F', 'F'})};
  CHECK(frame_f1(perfect, 0.5).f1 == doctest::Approx(1.0));

  // no predicted fakes and no reference fakes: degenerate, F1 = 0
  const auto empty = std::vector<EvalPair>{pair_of({0.9, 0.8}, {'R', 'R'})};
  const auto res = frame_f1(empty, 0.5);
  CHECK(res.f1 == 0.0);
  CHECK(res.degenerate);

  // 3 reference fakes, 2 predicted... P=0.5, R=1/3, F1=0.4
  const auto partial = std::vector<EvalPair>{
      pair_of({0.1, 0.9, 0.9, 0.1, 0.9}, {'F', 'F', 'F', 'R', 'R'})};
  // predicted fake at frames 0 and 3; correct only at frame 0
  CHECK(frame_f1(partial, 0.5).f1 == doctest::Approx(0.4));
}

TEST_CASE("frame_f1 matches the counting oracle") {
  Rng rng(15);
  for (int i = 0; i < 200; ++i) {
    const auto pairs = random_pool(rng, 2 + rng.uniform_int(0, 98), false);
    std::vector<double> scores;
    std::vector<bool> genuine;
    flatten_pool(pairs, scores, genuine);
    const double thr = rng.uniform(-2.0, 2.0);
    CHECK(frame_f1(pairs, thr).f1 == doctest::Approx(oracle::f1_count(scores, genuine, thr)));
  }
}

TEST_CASE("ties at the threshold decide genuine") {
  const auto pairs = std::vector<EvalPair>{pair_of({0.5, 0.5}, {'R', 'F'})};
  // both at the threshold: neither predicted fake
  const auto res = frame_f1(pairs, 0.5);
  CHECK(res.f1 == 0.0);
  CHECK_FALSE(res.degenerate);  // a reference fake exists
}

TEST_CASE("det_curve endpoints, monotonicity, and EER crossing") {
  const auto separable = std::vector<EvalPair>{pair_of({0.9, 0.8, 0.1, 0.2}, {'R', 'R', 'F', 'F'})};
  bool has_origin = false;
  for (const DetPoint& pt : det_curve(separable))
    if (pt.far == 0.0 && pt.frr == 0.0) has_origin = true;
  CHECK(has_origin);

  const auto constant = std::vector<EvalPair>{pair_of({0.5, 0.5}, {'R', 'F'})};
  const auto pts = det_curve(constant);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].far == 1.0);
  CHECK(pts[0].frr == 0.0);
  CHECK(pts[1].far == 0.0);
  CHECK(pts[1].frr == 1.0);

  Rng rng(16);
  for (int i = 0; i < 100; ++i) {
    const auto pairs = random_pool(rng, 2 + rng.uniform_int(0, 198));
    const auto curve = det_curve(pairs);
    for (std::size_t k = 1; k < curve.size(); ++k) {
      CHECK(curve[k].far <= curve[k - 1].far);
      CHECK(curve[k].frr >= curve[k - 1].frr);
    }
    // the EER is the interpolated crossing of the curve
    const EerResult eer = frame_eer(pairs);
    CHECK(eer.eer >= 0.0);
    CHECK(eer.eer <= 1.0);
  }
}

TEST_CASE("position_breakdown fixed examples") {
  const auto edges = std::vector<EvalPair>{pair_of({0.1, 0.1, 0.9, 0.1}, {'F', 'F', 'R', 'F'})};
  const auto b = position_breakdown(edges, 0.5);
  CHECK(b.categories[static_cast<int>(SegmentPosition::StartEdge)].segment_count == 1);
  CHECK(b.categories[static_cast<int>(SegmentPosition::EndEdge)].segment_count == 1);
  CHECK(b.categories[static_cast<int>(SegmentPosition::Middle)].segment_count == 0);
  CHECK(b.categories[static_cast<int>(SegmentPosition::FullUtterance)].segment_count == 0);

  // middle fake frame misclassified as genuine
  const auto mid = std::vector<EvalPair>{pair_of({0.9, 0.9, 0.9}, {'R', 'F', 'R'})};
  const auto bm = position_breakdown(mid, 0.5);
  CHECK(bm.categories[static_cast<int>(SegmentPosition::Middle)].error_rate() ==
        doctest::Approx(1.0));
}

TEST_CASE("position_breakdown matches a brute-force segment classifier") {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    std::vector<EvalPair> pairs;
    for (int u = 0; u < 4; ++u) {
      auto p = random_pool(rng, 2 + rng.uniform_int(0, 30), false)[0];
      p.utt_id = "u" + std::to_string(u);
      pairs.push_back(std::move(p));
    }
    const auto b = position_breakdown(pairs, 0.0);

    std::size_t counts[4] = {0, 0, 0, 0};
    std::size_t fake_frames = 0;
    for (const EvalPair& p : pairs) {
      const auto segs = oracle::run_scan_segments(p.reference.classes);
      for (const Segment& s : segs) {
        if (s.cls != FrameClass::Fake) continue;
        fake_frames += s.length();
        const bool at_start = s.start_frame == 0;
        const bool at_end = s.end_frame == p.reference.size();
        int cat;
        if (at_start && at_end) cat = 0;
        else if (at_start) cat = 1;
        else if (at_end) cat = 2;
        else cat = 3;
        counts[cat] += 1;
      }
    }
    for (int c = 0; c < 4; ++c) CHECK(b.categories[c].segment_count == counts[c]);
    CHECK(b.total_fake_frames() == fake_frames);
  }
}
