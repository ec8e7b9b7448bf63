// spoofloc_cli: command-line front end for the spoofloc library.
//
// Every run writes its resolved configuration to <out-dir>/manifest.json so
// any artifact can be regenerated from the manifest alone. All randomness
// flows from --seed; reruns with identical flags and inputs produce
// byte-identical outputs.
//
// Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numeric
// failure.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "spoofloc/io.hpp"
#include "spoofloc/metrics.hpp"
#include "spoofloc/mixer.hpp"
#include "spoofloc/synth.hpp"
#include "spoofloc/toymodel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace spoofloc;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

struct GlobalOpts {
  std::uint64_t seed = 0;
  double resolution_ms = 20.0;
  std::string out_dir = ".";

  fs::path out(const std::string& name) const { return fs::path(out_dir) / name; }
};

void write_manifest(const GlobalOpts& g, const std::string& subcommand, json extra) {
  json m;
  m["subcommand"] = subcommand;
  m["seed"] = g.seed;
  m["resolution_ms"] = g.resolution_ms;
  m["out_dir"] = g.out_dir;
  for (auto& [k, v] : extra.items()) m[k] = v;
  write_file(g.out("manifest.json"), m.dump(2) + "\n");
}

// Pair each utterance in a feature file with its labels (matched by id).
std::vector<LabeledFeatures> join_corpus(const FeatureFile& feats, const LabelFile& labels) {
  std::vector<LabeledFeatures> corpus;
  for (const auto& [utt, seq] : feats.utterances) {
    const FrameClassSeq* ref = nullptr;
    for (const auto& [id, classes] : labels.utterances)
      if (id == utt) ref = &classes;
    if (!ref) throw FormatError("no labels for utterance '" + utt + "'");
    if (ref->size() != seq.frames())
      throw FormatError("utterance '" + utt + "': " + std::to_string(seq.frames()) +
                        " feature frames vs " + std::to_string(ref->size()) + " label frames");
    corpus.push_back({seq, *ref});
  }
  return corpus;
}

std::vector<EvalPair> build_eval_pairs(const ScoreFile& scores,
                                       const std::vector<TimeAnnotation>& annotations,
                                       PoolPolicy policy) {
  std::vector<EvalPair> pairs;
  for (const auto& [utt, values] : scores.utterances) {
    const TimeAnnotation* ann = nullptr;
    for (const TimeAnnotation& a : annotations)
      if (a.utt_id == utt) ann = &a;
    if (!ann) throw FormatError("no annotation for scored utterance '" + utt + "'");
    EvalPair p;
    p.utt_id = utt;
    p.scores.scores = values;
    p.scores.polarity = scores.polarity;
    p.reference = labels_from_annotation(*ann, scores.resolution_ms, policy);
    p.validate();
    pairs.push_back(std::move(p));
  }
  if (pairs.empty()) throw FormatError("score file contains no utterances");
  return pairs;
}

PoolPolicy parse_pooling(const std::string& name) {
  if (name == "anyfake") return PoolPolicy::AnyFake;
  if (name == "majority") return PoolPolicy::Majority;
  throw CLI::ValidationError("--pooling", "must be 'anyfake' or 'majority'");
}

LossMode parse_loss_mode(const std::string& name) {
  if (name == "binary") return LossMode::BinaryOnly;
  if (name == "spl") return LossMode::BinaryPlusSpl;
  if (name == "transition") return LossMode::BinaryPlusTransition;
  throw CLI::ValidationError("--loss-mode", "must be 'binary', 'spl', or 'transition'");
}

std::vector<std::vector<double>> load_wav_dir(const std::string& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw FormatError("'" + dir + "' is not a directory");
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".wav")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<std::vector<double>> pool;
  for (const fs::path& f : files) pool.push_back(parse_wav(read_file(f)).to_float());
  if (pool.empty()) throw FormatError("no .wav files in '" + dir + "'");
  return pool;
}

// ---------------------------------------------------------------------------
// Subcommand implementations. Each receives fully parsed options and the
// global run context.

void run_spl_encode(const GlobalOpts& g, const std::string& labels_path) {
  const LabelFile labels = parse_labels(read_file(labels_path));
  std::vector<std::pair<std::string, JointLabelSeq>> encoded;
  for (const auto& [utt, seq] : labels.utterances) encoded.emplace_back(utt, spl_encode(seq));
  write_file(g.out("joint_labels.tsv"), serialize_joint_labels(encoded));
  write_manifest(g, "spl-encode", {{"labels", labels_path}});
  std::cout << "encoded " << encoded.size() << " utterances -> "
            << g.out("joint_labels.tsv").string() << "\n";
}

struct MixOpts {
  std::string labels_path, utt_a, utt_b;
  std::string wav_a, wav_b, ann_a, ann_b;
  std::size_t lambda_c = 0;
  bool lambda_c_given = false;
};

void run_mix(const GlobalOpts& g, const MixOpts& o) {
  MixSample a, b;
  const bool wav_mode = !o.wav_a.empty();
  std::uint32_t sample_rate = 0;
  if (wav_mode) {
    const WavAudio wa = parse_wav(read_file(o.wav_a));
    const WavAudio wb = parse_wav(read_file(o.wav_b));
    if (wa.sample_rate != wb.sample_rate)
      throw FormatError("sample rates differ: " + std::to_string(wa.sample_rate) + " vs " +
                        std::to_string(wb.sample_rate));
    sample_rate = wa.sample_rate;
    const double spf = double(sample_rate) * g.resolution_ms / 1000.0;
    if (spf != std::floor(spf) || spf < 1.0)
      throw FormatError("resolution_ms must map to a whole number of samples per frame");
    const auto anns_a = parse_annotation(read_file(o.ann_a));
    const auto anns_b = parse_annotation(read_file(o.ann_b));
    if (anns_a.size() != 1 || anns_b.size() != 1)
      throw FormatError("each annotation file must describe exactly one utterance");
    a.samples_per_frame = b.samples_per_frame = std::size_t(spf);
    a.labels = labels_from_annotation(anns_a[0], g.resolution_ms, PoolPolicy::AnyFake);
    b.labels = labels_from_annotation(anns_b[0], g.resolution_ms, PoolPolicy::AnyFake);
    a.waveform = wa.to_float();
    b.waveform = wb.to_float();
    a.waveform.resize(a.labels.size() * a.samples_per_frame, 0.0);
    b.waveform.resize(b.labels.size() * b.samples_per_frame, 0.0);
  } else {
    const LabelFile labels = parse_labels(read_file(o.labels_path));
    if (labels.utterances.size() < 2)
      throw FormatError("label file must contain at least two utterances to mix");
    auto find = [&](const std::string& id, std::size_t fallback) -> const FrameClassSeq& {
      if (id.empty()) return labels.utterances[fallback].second;
      for (const auto& [utt, seq] : labels.utterances)
        if (utt == id) return seq;
      throw FormatError("no utterance '" + id + "' in label file");
    };
    a.samples_per_frame = b.samples_per_frame = 1;
    a.labels = find(o.utt_a, 0);
    b.labels = find(o.utt_b, 1);
    a.waveform.assign(a.labels.size(), 0.0);
    b.waveform.assign(b.labels.size(), 0.0);
  }

  std::size_t crossover = o.lambda_c;
  if (!o.lambda_c_given) {
    Rng rng = Rng::stream(g.seed, 0);
    crossover = sample_crossover(frame_count(a), rng);
  }
  const auto [mixed, joint] = mix_pair(a, b, crossover);

  LabelFile out_labels;
  out_labels.resolution_ms = mixed.labels.resolution_ms;
  out_labels.utterances.emplace_back("mixed", mixed.labels);
  write_file(g.out("mixed_labels.txt"), serialize_labels(out_labels));
  write_file(g.out("mixed_joint.tsv"), serialize_joint_labels({{"mixed", joint}}));
  if (wav_mode)
    write_file(g.out("mixed.wav"), serialize_wav(WavAudio::from_float(mixed.waveform, sample_rate)));

  json extra = {{"mode", wav_mode ? "wav" : "labels"}, {"crossover", crossover}};
  if (wav_mode) {
    extra["wav_a"] = o.wav_a;
    extra["wav_b"] = o.wav_b;
    extra["ann_a"] = o.ann_a;
    extra["ann_b"] = o.ann_b;
  } else {
    extra["labels"] = o.labels_path;
    extra["a"] = o.utt_a;
    extra["b"] = o.utt_b;
  }
  write_manifest(g, "mix", extra);
  std::cout << "mixed at crossover frame " << crossover << " of " << frame_count(a) << "\n";
}

struct AugmentOpts {
  std::string features_path, labels_path;
  double probability = 0.2;
  std::size_t rounds = 2;
  bool allow_self = false;
};

void run_augment(const GlobalOpts& g, const AugmentOpts& o) {
  const FeatureFile feats = parse_features(read_file(o.features_path));
  const LabelFile labels = parse_labels(read_file(o.labels_path));
  const std::vector<LabeledFeatures> corpus = join_corpus(feats, labels);

  MixConfig cfg;
  cfg.probability = o.probability;
  cfg.rounds = o.rounds;
  cfg.seed = g.seed;
  cfg.allow_self_partner = o.allow_self;
  const auto out = augment_batch(corpus, cfg);

  FeatureFile out_feats;
  out_feats.dim = feats.dim;
  out_feats.resolution_ms = feats.resolution_ms;
  LabelFile out_labels;
  out_labels.resolution_ms = labels.resolution_ms;
  std::vector<std::pair<std::string, JointLabelSeq>> out_joint;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::string id = i < corpus.size() ? feats.utterances[i].first
                                             : "mix_" + std::to_string(i - corpus.size());
    out_feats.utterances.emplace_back(id, out[i].first.feats);
    out_labels.utterances.emplace_back(id, out[i].first.labels);
    out_joint.emplace_back(id, out[i].second);
  }
  write_file(g.out("augmented_features.tsv"), serialize_features(out_feats));
  write_file(g.out("augmented_labels.txt"), serialize_labels(out_labels));
  write_file(g.out("augmented_joint.tsv"), serialize_joint_labels(out_joint));
  write_manifest(g, "augment",
                 {{"features", o.features_path},
                  {"labels", o.labels_path},
                  {"probability", o.probability},
                  {"rounds", o.rounds},
                  {"allow_self_partner", o.allow_self}});
  std::cout << "batch of " << corpus.size() << " -> " << out.size() << " samples ("
            << out.size() - corpus.size() << " augmented)\n";
}

struct ScoreOpts {
  std::string scores_path, annotation_path;
  std::string pooling = "anyfake";
  double threshold = 0.5;
};

void run_score(const GlobalOpts& g, const ScoreOpts& o) {
  const ScoreFile scores = parse_scores(read_file(o.scores_path));
  const auto annotations = parse_annotation(read_file(o.annotation_path));
  const auto pairs = build_eval_pairs(scores, annotations, parse_pooling(o.pooling));

  const EerResult eer = frame_eer(pairs);
  const F1Result f1 = frame_f1(pairs, o.threshold);

  std::string det = "threshold,far,frr\n";
  for (const DetPoint& pt : det_curve(pairs))
    det += ioutil::format_general(pt.threshold) + "," + ioutil::format_general(pt.far) + "," +
           ioutil::format_general(pt.frr) + "\n";
  write_file(g.out("det.csv"), det);

  std::string summary = "EER " + ioutil::format_fixed(eer.eer, 6) + "\n";
  summary += "EER_threshold " + ioutil::format_general(eer.threshold) + "\n";
  summary += "F1 " + ioutil::format_fixed(f1.f1, 6) + (f1.degenerate ? " (degenerate)" : "") + "\n";
  write_file(g.out("metrics.txt"), summary);
  write_manifest(g, "score",
                 {{"scores", o.scores_path},
                  {"annotation", o.annotation_path},
                  {"pooling", o.pooling},
                  {"threshold", o.threshold}});
  std::cout << summary;
}

void run_breakdown(const GlobalOpts& g, const ScoreOpts& o) {
  const ScoreFile scores = parse_scores(read_file(o.scores_path));
  const auto annotations = parse_annotation(read_file(o.annotation_path));
  const auto pairs = build_eval_pairs(scores, annotations, parse_pooling(o.pooling));
  const PositionBreakdown b = position_breakdown(pairs, o.threshold);

  std::string csv = "category,segments,fake_frames,misclassified_frames,error_rate\n";
  for (std::size_t c = 0; c < b.categories.size(); ++c) {
    const auto& cat = b.categories[c];
    csv += std::string(kSegmentPositionNames[c]) + "," + std::to_string(cat.segment_count) + "," +
           std::to_string(cat.fake_frames) + "," + std::to_string(cat.misclassified_frames) + "," +
           ioutil::format_general(cat.error_rate()) + "\n";
  }
  write_file(g.out("breakdown.csv"), csv);
  write_manifest(g, "breakdown",
                 {{"scores", o.scores_path},
                  {"annotation", o.annotation_path},
                  {"pooling", o.pooling},
                  {"threshold", o.threshold}});
  std::cout << csv;
}

struct GenSynthOpts {
  std::string kind = "feature";
  // feature corpus
  std::size_t count = 100, frames = 25, dim = 4, min_run = 1, max_run = 10;
  double margin = 1.0, spike = 0.0, sigma = 0.5, continue_prob = 0.7;
  // wav corpus
  std::string real_dir, fake_dir;
  double duration_s = 4.0, crossfade_ms = 0.0, min_segment_s = 0.4, max_segment_s = 1.5;
  double fake_ratio = 0.3;
};

void run_gen_synth(const GlobalOpts& g, const GenSynthOpts& o) {
  json extra = {{"kind", o.kind}, {"count", o.count}};
  if (o.kind == "feature") {
    SynthConfig cfg;
    cfg.num_utterances = o.count;
    cfg.frames_per_utterance = o.frames;
    cfg.feature_dim = o.dim;
    cfg.content_margin = o.margin;
    cfg.boundary_spike = o.spike;
    cfg.noise_sigma = o.sigma;
    cfg.min_run = o.min_run;
    cfg.max_run = o.max_run;
    cfg.continue_prob = o.continue_prob;
    cfg.resolution_ms = g.resolution_ms;
    cfg.seed = g.seed;
    const auto corpus = gen_feature_corpus(cfg);

    FeatureFile feats;
    feats.dim = cfg.feature_dim;
    feats.resolution_ms = cfg.resolution_ms;
    LabelFile labels;
    labels.resolution_ms = cfg.resolution_ms;
    for (std::size_t u = 0; u < corpus.size(); ++u) {
      char id[32];
      std::snprintf(id, sizeof id, "synth_%04zu", u);
      feats.utterances.emplace_back(id, corpus[u].first);
      labels.utterances.emplace_back(id, corpus[u].second.class_channel());
    }
    write_file(g.out("features.tsv"), serialize_features(feats));
    write_file(g.out("labels.txt"), serialize_labels(labels));
    extra["frames"] = o.frames;
    extra["dim"] = o.dim;
    extra["margin"] = o.margin;
    extra["spike"] = o.spike;
    extra["sigma"] = o.sigma;
    extra["min_run"] = o.min_run;
    extra["max_run"] = o.max_run;
    extra["continue_prob"] = o.continue_prob;
    std::cout << "wrote " << corpus.size() << " feature utterances\n";
  } else if (o.kind == "wav") {
    SpliceConfig cfg;
    cfg.duration_s = o.duration_s;
    cfg.crossfade_ms = o.crossfade_ms;
    cfg.min_segment_s = o.min_segment_s;
    cfg.max_segment_s = o.max_segment_s;
    cfg.fake_ratio = o.fake_ratio;
    cfg.seed = g.seed;
    const auto real_pool = load_wav_dir(o.real_dir);
    const auto fake_pool = load_wav_dir(o.fake_dir);
    const auto corpus = splice_wav_corpus(real_pool, fake_pool, cfg, o.count);

    std::vector<TimeAnnotation> annotations;
    for (const SplicedUtterance& utt : corpus) {
      write_file(g.out(utt.utt_id + ".wav"),
                 serialize_wav(WavAudio::from_float(utt.samples, cfg.sample_rate)));
      annotations.push_back(utt.annotation);
    }
    write_file(g.out("annotations.txt"), serialize_annotation(annotations));
    extra["real_dir"] = o.real_dir;
    extra["fake_dir"] = o.fake_dir;
    extra["duration_s"] = o.duration_s;
    extra["crossfade_ms"] = o.crossfade_ms;
    extra["min_segment_s"] = o.min_segment_s;
    extra["max_segment_s"] = o.max_segment_s;
    extra["fake_ratio"] = o.fake_ratio;
    std::cout << "wrote " << corpus.size() << " spliced utterances\n";
  } else {
    throw CLI::ValidationError("--kind", "must be 'feature' or 'wav'");
  }
  write_manifest(g, "gen-synth", extra);
}

struct TrainOpts {
  std::string features_path, labels_path;
  std::string loss_mode = "spl";
  std::string optimizer = "gd";
  double lambda = 0.1, learning_rate = 0.1;
  std::size_t epochs = 20, batch_size = 8, hidden = 16, context = 0;
  bool csm = false;
  double probability = 0.2;
  std::size_t rounds = 2;
};

void run_train(const GlobalOpts& g, const TrainOpts& o) {
  const FeatureFile feats = parse_features(read_file(o.features_path));
  const LabelFile labels = parse_labels(read_file(o.labels_path));
  const std::vector<LabeledFeatures> corpus = join_corpus(feats, labels);

  TrainConfig cfg;
  cfg.lambda = o.lambda;
  cfg.loss_mode = parse_loss_mode(o.loss_mode);
  cfg.learning_rate = o.learning_rate;
  cfg.epochs = o.epochs;
  cfg.batch_size = o.batch_size;
  cfg.hidden_dim = o.hidden;
  cfg.context_window = o.context;
  cfg.seed = g.seed;
  if (o.optimizer == "gd") cfg.optimizer = Optimizer::GradientDescent;
  else if (o.optimizer == "adam") cfg.optimizer = Optimizer::Adam;
  else throw CLI::ValidationError("--optimizer", "must be 'gd' or 'adam'");

  std::optional<MixConfig> mix;
  if (o.csm) {
    MixConfig m;
    m.probability = o.probability;
    m.rounds = o.rounds;
    m.seed = g.seed;
    mix = m;
  }

  const TrainResult result = train(corpus, cfg, mix);
  {
    std::ofstream out(g.out("model.bin"), std::ios::binary);
    if (!out) throw FormatError("cannot write '" + g.out("model.bin").string() + "'");
    save_params(out, result.params);
  }
  std::string log = "epoch,loss\n";
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
    log += std::to_string(e) + "," + ioutil::format_general(result.epoch_loss[e]) + "\n";
  write_file(g.out("train_log.csv"), log);
  write_manifest(g, "train",
                 {{"features", o.features_path},
                  {"labels", o.labels_path},
                  {"loss_mode", o.loss_mode},
                  {"lambda", o.lambda},
                  {"learning_rate", o.learning_rate},
                  {"epochs", o.epochs},
                  {"batch_size", o.batch_size},
                  {"hidden", o.hidden},
                  {"context", o.context},
                  {"optimizer", o.optimizer},
                  {"csm", o.csm},
                  {"probability", o.probability},
                  {"rounds", o.rounds}});
  std::cout << "trained " << o.epochs << " epochs; final loss "
            << (result.epoch_loss.empty() ? std::string("n/a")
                                          : ioutil::format_general(result.epoch_loss.back()))
            << "\n";
}

struct SaliencyOpts {
  std::string model_path, features_path;
};

void run_saliency(const GlobalOpts& g, const SaliencyOpts& o) {
  ToyModelParams params;
  {
    std::ifstream in(o.model_path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + o.model_path + "'");
    params = load_params(in);
  }
  const FeatureFile feats = parse_features(read_file(o.features_path));

  std::string csv = "utt_id,frame,p_genuine,attribution\n";
  for (const auto& [utt, seq] : feats.utterances) {
    const ModelOutputs outputs = forward(params, stack_context(seq, params.context_window));
    const std::vector<double> attribution = saliency(params, seq);
    for (std::size_t t = 0; t < attribution.size(); ++t)
      csv += utt + "," + std::to_string(t) + "," + ioutil::format_general(outputs.p_genuine[t]) +
             "," + ioutil::format_general(attribution[t]) + "\n";
  }
  write_file(g.out("saliency.csv"), csv);
  write_manifest(g, "saliency", {{"model", o.model_path}, {"features", o.features_path}});
  std::cout << "wrote " << g.out("saliency.csv").string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frame-level partial-spoof localization toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--seed", g.seed, "random seed (all randomness flows from here)");
  app.add_option("--resolution-ms", g.resolution_ms, "frame resolution in milliseconds")
      ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "output directory (created if missing)");

  std::string enc_labels;
  auto* enc = app.add_subcommand("spl-encode", "labels -> joint positional labels");
  enc->add_option("--labels", enc_labels, "label file (R/F per frame)")->required();

  MixOpts mo;
  auto* mix = app.add_subcommand("mix", "splice two utterances at a crossover frame");
  mix->add_option("--labels", mo.labels_path, "label file for label-pair mode");
  mix->add_option("--a", mo.utt_a, "first utterance id (default: first in file)");
  mix->add_option("--b", mo.utt_b, "second utterance id (default: second in file)");
  mix->add_option("--wav-a", mo.wav_a, "first waveform for wav mode");
  mix->add_option("--wav-b", mo.wav_b, "second waveform for wav mode");
  mix->add_option("--ann-a", mo.ann_a, "annotation for --wav-a");
  mix->add_option("--ann-b", mo.ann_b, "annotation for --wav-b");
  auto* lc = mix->add_option("--lambda-c", mo.lambda_c, "crossover frame (default: sampled)");

  AugmentOpts ao;
  auto* aug = app.add_subcommand("augment", "batch cross-segment mixing over a feature corpus");
  aug->add_option("--features", ao.features_path, "feature file")->required();
  aug->add_option("--labels", ao.labels_path, "label file")->required();
  aug->add_option("--probability", ao.probability, "per-sample selection probability")
      ->check(CLI::Range(0.0, 1.0));
  aug->add_option("--rounds", ao.rounds, "mixing rounds per selected sample");
  aug->add_flag("--allow-self", ao.allow_self, "allow a sample to mix with itself");

  ScoreOpts so;
  auto* score = app.add_subcommand("score", "frame EER/F1 against an annotation");
  score->add_option("--scores", so.scores_path, "score file")->required();
  score->add_option("--annotation", so.annotation_path, "annotation file")->required();
  score->add_option("--threshold", so.threshold, "F1 decision threshold (genuineness)");
  score->add_option("--pooling", so.pooling, "anyfake|majority label pooling");

  ScoreOpts bo;
  auto* breakdown = app.add_subcommand("breakdown", "per-position fake-segment error report");
  breakdown->add_option("--scores", bo.scores_path, "score file")->required();
  breakdown->add_option("--annotation", bo.annotation_path, "annotation file")->required();
  breakdown->add_option("--threshold", bo.threshold, "decision threshold (genuineness)");
  breakdown->add_option("--pooling", bo.pooling, "anyfake|majority label pooling");

  GenSynthOpts go;
  auto* gen = app.add_subcommand("gen-synth", "generate a synthetic corpus");
  gen->add_option("--kind", go.kind, "feature|wav");
  gen->add_option("--count", go.count, "number of utterances");
  gen->add_option("--frames", go.frames, "frames per utterance (feature kind)");
  gen->add_option("--dim", go.dim, "feature dimension (feature kind)");
  gen->add_option("--margin", go.margin, "content mean separation (feature kind)");
  gen->add_option("--spike", go.spike, "boundary artifact magnitude (feature kind)");
  gen->add_option("--sigma", go.sigma, "noise standard deviation (feature kind)");
  gen->add_option("--min-run", go.min_run, "minimum run length (feature kind)");
  gen->add_option("--max-run", go.max_run, "maximum run length (feature kind)");
  gen->add_option("--continue-prob", go.continue_prob, "run continuation probability");
  gen->add_option("--real-dir", go.real_dir, "directory of genuine .wav files (wav kind)");
  gen->add_option("--fake-dir", go.fake_dir, "directory of fake .wav files (wav kind)");
  gen->add_option("--duration", go.duration_s, "utterance duration in seconds (wav kind)");
  gen->add_option("--crossfade-ms", go.crossfade_ms, "junction crossfade (wav kind)");
  gen->add_option("--min-segment", go.min_segment_s, "minimum segment seconds (wav kind)");
  gen->add_option("--max-segment", go.max_segment_s, "maximum segment seconds (wav kind)");
  gen->add_option("--fake-ratio", go.fake_ratio, "target fake time fraction (wav kind)");

  TrainOpts to;
  auto* train_cmd = app.add_subcommand("train", "train the per-frame multi-task classifier");
  train_cmd->add_option("--features", to.features_path, "feature file")->required();
  train_cmd->add_option("--labels", to.labels_path, "label file")->required();
  train_cmd->add_option("--loss-mode", to.loss_mode, "binary|spl|transition");
  train_cmd->add_option("--lambda", to.lambda, "auxiliary loss weight");
  train_cmd->add_option("--lr", to.learning_rate, "learning rate");
  train_cmd->add_option("--epochs", to.epochs, "training epochs");
  train_cmd->add_option("--batch-size", to.batch_size, "mini-batch size");
  train_cmd->add_option("--hidden", to.hidden, "hidden layer width");
  train_cmd->add_option("--context", to.context, "context frames per side");
  train_cmd->add_option("--optimizer", to.optimizer, "gd|adam");
  train_cmd->add_flag("--csm", to.csm, "enable cross-segment mixing augmentation");
  train_cmd->add_option("--probability", to.probability, "CSM selection probability");
  train_cmd->add_option("--rounds", to.rounds, "CSM mixing rounds");

  SaliencyOpts yo;
  auto* sal = app.add_subcommand("saliency", "per-frame input attribution for a trained model");
  sal->add_option("--model", yo.model_path, "model file")->required();
  sal->add_option("--features", yo.features_path, "feature file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    mo.lambda_c_given = lc->count() > 0;
    fs::create_directories(g.out_dir);
    if (*enc) run_spl_encode(g, enc_labels);
    else if (*mix) run_mix(g, mo);
    else if (*aug) run_augment(g, ao);
    else if (*score) run_score(g, so);
    else if (*breakdown) run_breakdown(g, bo);
    else if (*gen) run_gen_synth(g, go);
    else if (*train_cmd) run_train(g, to);
    else if (*sal) run_saliency(g, yo);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.get_name() << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
