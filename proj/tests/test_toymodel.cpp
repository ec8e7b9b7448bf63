#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "spoofloc/synth.hpp"
#include "spoofloc/toymodel.hpp"

using namespace spoofloc;

namespace {

FrameFeatureSeq random_features(Rng& rng, std::size_t frames, std::size_t dim) {
  FrameFeatureSeq out;
  out.dim = dim;
  out.values.resize(frames * dim);
  for (double& v : out.values) v = rng.uniform(-1.0, 1.0);
  return out;
}

TrainConfig mode_cfg(LossMode mode, double lambda = 0.1) {
  TrainConfig cfg;
  cfg.loss_mode = mode;
  cfg.lambda = lambda;
  return cfg;
}

}  // namespace

TEST_CASE("forward with zero weights gives chance outputs") {
  ToyModelParams p = init_params(3, 4, Rng(0));
  std::fill(p.enc_w.begin(), p.enc_w.end(), 0.0);
  std::fill(p.bin_w.begin(), p.bin_w.end(), 0.0);
  std::fill(p.spl_w.begin(), p.spl_w.end(), 0.0);
  std::fill(p.tr_w.begin(), p.tr_w.end(), 0.0);

  Rng rng(1);
  const ModelOutputs out = forward(p, random_features(rng, 5, 3));
  for (double v : out.p_genuine) CHECK(v == doctest::Approx(0.5));
  for (double v : out.p_spl) CHECK(v == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("forward outputs are probabilities and deterministic") {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const std::size_t dim = 1 + rng.uniform_int(0, 5);
    const std::size_t hidden = 1 + rng.uniform_int(0, 7);
    const ToyModelParams p = init_params(dim, hidden, Rng(rng.next_u64()));
    const FrameFeatureSeq feats = random_features(rng, 1 + rng.uniform_int(0, 9), dim);
    const ModelOutputs a = forward(p, feats);
    const ModelOutputs b = forward(p, feats);
    CHECK(a.p_genuine == b.p_genuine);
    CHECK(a.p_spl == b.p_spl);
    for (double v : a.p_genuine) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
    for (std::size_t t = 0; t < a.frames; ++t) {
      double row_sum = 0.0;
      for (int k = 0; k < kJointClassCount; ++k) {
        const double v = a.p_spl[t * kJointClassCount + k];
        CHECK(v >= 0.0);
        row_sum += v;
      }
      CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("forward rejects dimension mismatch") {
  const ToyModelParams p = init_params(3, 4, Rng(0));
  Rng rng(3);
  CHECK_THROWS_AS(forward(p, random_features(rng, 5, 4)), std::invalid_argument);
}

TEST_CASE("loss with lambda 0 is exactly the binary cross-entropy") {
  Rng rng(4);
  const ToyModelParams p = init_params(3, 4, Rng(1));
  const FrameFeatureSeq feats = random_features(rng, 7, 3);
  const JointLabelSeq target = spl_encode(oracle::random_classes(rng, 7));
  const ModelOutputs out = forward(p, feats);

  TrainConfig cfg = mode_cfg(LossMode::BinaryPlusSpl, 0.0);
  double bce = 0.0, aux = 0.0;
  const double total = loss(out, target, cfg, &bce, &aux);
  CHECK(total == bce);
}

TEST_CASE("loss decomposition holds to 1e-12 for every mode") {
  Rng rng(5);
  for (const LossMode mode :
       {LossMode::BinaryOnly, LossMode::BinaryPlusSpl, LossMode::BinaryPlusTransition}) {
    for (int i = 0; i < 30; ++i) {
      const std::size_t dim = 1 + rng.uniform_int(0, 4);
      const std::size_t frames = 2 + rng.uniform_int(0, 10);
      const ToyModelParams p = init_params(dim, 1 + rng.uniform_int(0, 6), Rng(rng.next_u64()));
      const FrameFeatureSeq feats = random_features(rng, frames, dim);
      const JointLabelSeq target = spl_encode(oracle::random_classes(rng, frames));
      const TrainConfig cfg = mode_cfg(mode, 0.1);
      double bce = 0.0, aux = 0.0;
      const double total = loss(forward(p, feats), target, cfg, &bce, &aux);
      CHECK(std::abs(total - bce - cfg.lambda * aux) < 1e-12);
      if (mode == LossMode::BinaryOnly) CHECK(aux == 0.0);
    }
  }
}

TEST_CASE("loss against an independent scalar recomputation") {
  Rng rng(6);
  const std::size_t frames = 9, dim = 3;
  const ToyModelParams p = init_params(dim, 5, Rng(7));
  const FrameFeatureSeq feats = random_features(rng, frames, dim);
  const JointLabelSeq target = spl_encode(oracle::random_classes(rng, frames));
  const ModelOutputs out = forward(p, feats);
  const TrainConfig cfg = mode_cfg(LossMode::BinaryPlusSpl, 0.1);

  double bce = 0.0, ce = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    const bool genuine = target.labels[t].cls == FrameClass::Real;
    bce += genuine ? -std::log(out.p_genuine[t]) : -std::log(1.0 - out.p_genuine[t]);
    ce += -std::log(out.p_spl[t * kJointClassCount + joint_class_index(target.labels[t])]);
  }
  bce /= frames;
  ce /= frames;
  CHECK(std::abs(loss(out, target, cfg) - (bce + 0.1 * ce)) < 1e-12);
}

TEST_CASE("lambda 0 zeroes auxiliary head gradients") {
  Rng rng(7);
  const std::size_t dim = 3, frames = 6;
  const ToyModelParams p = init_params(dim, 4, Rng(8));
  const FrameFeatureSeq feats = random_features(rng, frames, dim);
  const JointLabelSeq target = spl_encode(oracle::random_classes(rng, frames));
  const GradResult g = gradients(p, feats, target, mode_cfg(LossMode::BinaryPlusSpl, 0.0));
  for (double v : g.grads.spl_w) CHECK(v == 0.0);
  for (double v : g.grads.spl_b) CHECK(v == 0.0);
}

TEST_CASE("duplicate frames contribute identical gradients") {
  Rng rng(8);
  const std::size_t dim = 3;
  const ToyModelParams p = init_params(dim, 4, Rng(9));
  FrameFeatureSeq one;
  one.dim = dim;
  one.values = {0.3, -0.7, 0.2};
  FrameFeatureSeq two;
  two.dim = dim;
  two.values = {0.3, -0.7, 0.2, 0.3, -0.7, 0.2};

  JointLabelSeq t1, t2;
  t1.labels = {{FrameClass::Fake, PositionalLabel::Unit}};
  t2.labels = {{FrameClass::Fake, PositionalLabel::Start}, {FrameClass::Fake, PositionalLabel::End}};
  // binary-only loss so the (different) positional labels play no role
  const TrainConfig cfg = mode_cfg(LossMode::BinaryOnly);
  const GradResult g1 = gradients(p, one, t1, cfg);
  const GradResult g2 = gradients(p, two, t2, cfg);
  for (std::size_t i = 0; i < g1.grads.enc_w.size(); ++i)
    CHECK(g2.grads.enc_w[i] == doctest::Approx(g1.grads.enc_w[i]).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(9);
  int checked = 0;
  for (int i = 0; i < 30; ++i) {
    const std::size_t dim = 1 + rng.uniform_int(0, 3);
    const std::size_t hidden = 1 + rng.uniform_int(0, 4);
    const std::size_t frames = 2 + rng.uniform_int(0, 6);
    const LossMode mode = static_cast<LossMode>(rng.uniform_int(0, 2));
    const ToyModelParams p = init_params(dim, hidden, Rng(rng.next_u64()));
    const FrameFeatureSeq feats = random_features(rng, frames, dim);
    const JointLabelSeq target = spl_encode(oracle::random_classes(rng, frames));
    const TrainConfig cfg = mode_cfg(mode, 0.1);

    const std::vector<double> analytic = flatten(gradients(p, feats, target, cfg).grads);
    const std::vector<double> numeric = oracle::fd_gradients(p, feats, target, cfg);
    REQUIRE(analytic.size() == numeric.size());
    for (std::size_t k = 0; k < analytic.size(); ++k) {
      const double scale = std::max({std::abs(analytic[k]), std::abs(numeric[k]), 1e-6});
      CHECK(std::abs(analytic[k] - numeric[k]) / scale < 1e-4);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("train returns initial params for zero epochs and descends otherwise") {
  SynthConfig synth;
  synth.num_utterances = 40;
  synth.frames_per_utterance = 20;
  synth.content_margin = 2.0;
  synth.boundary_spike = 0.0;
  synth.noise_sigma = 0.5;
  synth.seed = 42;
  const auto corpus_raw = gen_feature_corpus(synth);
  std::vector<LabeledFeatures> corpus;
  for (const auto& [feats, joint] : corpus_raw) corpus.push_back({feats, joint.class_channel()});

  TrainConfig cfg;
  cfg.epochs = 0;
  cfg.seed = 5;
  const TrainResult frozen = train(corpus, cfg);
  CHECK(flatten(frozen.params) == flatten(init_params(corpus[0].feats.dim, cfg.hidden_dim,
                                                      Rng::stream(cfg.seed, 0))));

  cfg.epochs = 10;
  const TrainResult trained = train(corpus, cfg);
  REQUIRE(trained.epoch_loss.size() == 10);
  CHECK(trained.epoch_loss.back() < trained.epoch_loss.front());
}

TEST_CASE("training is deterministic under a fixed seed") {
  SynthConfig synth;
  synth.num_utterances = 12;
  synth.frames_per_utterance = 16;
  synth.seed = 3;
  const auto corpus_raw = gen_feature_corpus(synth);
  std::vector<LabeledFeatures> corpus;
  for (const auto& [feats, joint] : corpus_raw) corpus.push_back({feats, joint.class_channel()});

  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.seed = 17;
  MixConfig mix;
  mix.probability = 0.5;
  mix.rounds = 2;
  mix.seed = 9;
  const TrainResult a = train(corpus, cfg, mix);
  const TrainResult b = train(corpus, cfg, mix);
  CHECK(flatten(a.params) == flatten(b.params));
  CHECK(a.epoch_loss == b.epoch_loss);
}

TEST_CASE("BinaryOnly with any lambda matches lambda 0 runs exactly") {
  SynthConfig synth;
  synth.num_utterances = 10;
  synth.frames_per_utterance = 12;
  synth.seed = 4;
  const auto corpus_raw = gen_feature_corpus(synth);
  std::vector<LabeledFeatures> corpus;
  for (const auto& [feats, joint] : corpus_raw) corpus.push_back({feats, joint.class_channel()});

  TrainConfig binary_only;
  binary_only.loss_mode = LossMode::BinaryOnly;
  binary_only.lambda = 0.7;
  binary_only.epochs = 3;
  binary_only.seed = 21;

  TrainConfig spl_zero = binary_only;
  spl_zero.loss_mode = LossMode::BinaryPlusSpl;
  spl_zero.lambda = 0.0;

  TrainConfig tr_zero = binary_only;
  tr_zero.loss_mode = LossMode::BinaryPlusTransition;
  tr_zero.lambda = 0.0;

  const auto a = train(corpus, binary_only);
  const auto b = train(corpus, spl_zero);
  const auto c = train(corpus, tr_zero);
  CHECK(flatten(a.params) == flatten(b.params));
  CHECK(flatten(a.params) == flatten(c.params));
  CHECK(a.epoch_loss == b.epoch_loss);
  CHECK(a.epoch_loss == c.epoch_loss);
}

TEST_CASE("saliency is zero for a constant model and local for w = 0") {
  ToyModelParams p = init_params(3, 4, Rng(0));
  std::fill(p.enc_w.begin(), p.enc_w.end(), 0.0);
  std::fill(p.bin_w.begin(), p.bin_w.end(), 0.0);
  Rng rng(10);
  const FrameFeatureSeq feats = random_features(rng, 6, 3);
  for (double a : saliency(p, feats)) CHECK(a == 0.0);

  // w = 0: perturbing frame 0 must not change other frames' attributions
  const ToyModelParams q = init_params(3, 4, Rng(11));
  FrameFeatureSeq perturbed = feats;
  perturbed.values[0] += 0.5;
  const auto base = saliency(q, feats);
  const auto moved = saliency(q, perturbed);
  for (std::size_t t = 1; t < base.size(); ++t) CHECK(base[t] == moved[t]);
  CHECK(base[0] != moved[0]);
}

TEST_CASE("saliency matches finite-difference input perturbation") {
  Rng rng(12);
  for (const std::size_t window : {std::size_t{0}, std::size_t{2}}) {
    const std::size_t dim = 3, frames = 7;
    const std::size_t input_dim = dim * (2 * window + 1);
    const ToyModelParams p = init_params(input_dim, 5, Rng(rng.next_u64()), window);
    const FrameFeatureSeq feats = random_features(rng, frames, dim);

    auto fake_sum = [&](const FrameFeatureSeq& f) {
      const ModelOutputs out = forward(p, stack_context(f, window));
      double s = 0.0;
      for (double v : out.p_genuine) s += 1.0 - v;
      return s;
    };

    const std::vector<double> attribution = saliency(p, feats);
    const double step = 1e-5;
    for (std::size_t t = 0; t < frames; ++t) {
      double norm_sq = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        FrameFeatureSeq up = feats, down = feats;
        up.values[t * dim + k] += step;
        down.values[t * dim + k] -= step;
        const double g = (fake_sum(up) - fake_sum(down)) / (2.0 * step);
        norm_sq += g * g;
      }
      const double expected = std::sqrt(norm_sq);
      const double scale = std::max(std::abs(expected), 1e-8);
      CHECK(std::abs(attribution[t] - expected) / scale < 1e-4);
    }
  }
}

TEST_CASE("model parameters round-trip through the binary format") {
  const ToyModelParams p = init_params(6, 5, Rng(77), 1);
  std::stringstream buffer;
  save_params(buffer, p);
  const ToyModelParams q = load_params(buffer);
  CHECK(flatten(p) == flatten(q));
  CHECK(q.input_dim == p.input_dim);
  CHECK(q.hidden_dim == p.hidden_dim);
  CHECK(q.context_window == p.context_window);

  std::stringstream bad("not a model");
  CHECK_THROWS_AS(load_params(bad), FormatError);
}
