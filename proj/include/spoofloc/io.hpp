// Bit-exact file formats.
//
// All text formats are line-oriented UTF-8 with '\n' terminators and
// locale-independent number formatting (std::to_chars/from_chars).
//
// Annotation files: one utterance per line,
//   <utt_id> <start>-<end>-<T|F>[ <start>-<end>-<T|F>]...
// times in seconds with exactly two decimals; T = genuine, F = fake;
// regions must tile [0, duration) contiguously.
//
// Score files: TSV with metadata lines
//   #polarity=<higher_is_genuine|higher_is_fake>
//   #resolution_ms=<number>
// a header row `utt_id\tframe\tscore`, then one row per frame with 0-based
// contiguous frame indices per utterance and scores at 9 significant digits.
//
// Label files: `#resolution_ms=<number>` followed by `<utt_id> <RF...>`
// with one character per frame.
//
// Feature files: `#dim=` and `#resolution_ms=` metadata, a header row
// `utt_id\tframe\tf0...`, then tab-separated feature rows.
//
// WAV: RIFF/WAVE, PCM16 mono only; anything else is rejected with a typed
// diagnostic. Parsers never crash: every input yields a value or a
// FormatError.
#pragma once

#include <charconv>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "spoofloc/errors.hpp"
#include "spoofloc/labelcore.hpp"
#include "spoofloc/metrics.hpp"
#include "spoofloc/toymodel.hpp"

namespace spoofloc {

namespace ioutil {

inline std::string format_general(double v, int significant = 9) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, significant);
  return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& where) {
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw FormatError(where + ": invalid number '" + std::string(text) + "'");
  return v;
}

inline std::size_t parse_size(std::string_view text, const std::string& where) {
  std::size_t v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw FormatError(where + ": invalid integer '" + std::string(text) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// Lines split on '\n'; a trailing terminator does not produce an empty line.
inline std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out = split(text, '\n');
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

inline bool is_fixed2_time(std::string_view s) {
  const std::size_t dot = s.find('.');
  if (dot == std::string_view::npos || dot == 0 || s.size() != dot + 3) return false;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (i != dot && (s[i] < '0' || s[i] > '9')) return false;
  return true;
}

}  // namespace ioutil

// ---------------------------------------------------------------------------
// Annotations

inline std::vector<TimeAnnotation> parse_annotation(std::string_view text) {
  std::vector<TimeAnnotation> out;
  const auto all_lines = ioutil::lines(text);
  for (std::size_t ln = 0; ln < all_lines.size(); ++ln) {
    const std::string_view line = all_lines[ln];
    if (line.empty()) continue;
    auto fail = [&](std::size_t col, const std::string& what) -> FormatError {
      return FormatError("annotation line " + std::to_string(ln + 1) + ", col " +
                         std::to_string(col + 1) + ": " + what);
    };
    const auto tokens = ioutil::split(line, ' ');
    if (tokens.size() < 2) throw fail(line.size(), "expected '<utt_id> <regions...>'");

    TimeAnnotation ann;
    ann.utt_id = std::string(tokens[0]);
    if (ann.utt_id.empty()) throw fail(0, "empty utterance id");
    std::size_t col = tokens[0].size() + 1;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const std::string_view tok = tokens[i];
      const auto parts = ioutil::split(tok, '-');
      if (parts.size() != 3) throw fail(col, "expected '<start>-<end>-<T|F>'");
      if (!ioutil::is_fixed2_time(parts[0]) || !ioutil::is_fixed2_time(parts[1]))
        throw fail(col, "times must have exactly two decimals");
      TimeRegion region;
      region.start_s = ioutil::parse_double(parts[0], "annotation");
      region.end_s = ioutil::parse_double(parts[1], "annotation");
      if (parts[2] == "T") region.cls = FrameClass::Real;
      else if (parts[2] == "F") region.cls = FrameClass::Fake;
      else throw fail(col + parts[0].size() + parts[1].size() + 2, "class must be T or F");
      ann.regions.push_back(region);
      col += tok.size() + 1;
    }
    ann.duration_s = ann.regions.back().end_s;
    ann.validate();  // throws on gaps/overlaps
    out.push_back(std::move(ann));
  }
  return out;
}

inline std::string serialize_annotation(const std::vector<TimeAnnotation>& annotations) {
  std::string out;
  for (const TimeAnnotation& ann : annotations) {
    ann.validate();
    out += ann.utt_id;
    for (const TimeRegion& r : ann.regions) {
      out += ' ';
      out += ioutil::format_fixed(r.start_s, 2);
      out += '-';
      out += ioutil::format_fixed(r.end_s, 2);
      out += '-';
      out += r.cls == FrameClass::Real ? 'T' : 'F';
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Score files

struct ScoreFile {
  Polarity polarity = Polarity::HigherIsGenuine;
  double resolution_ms = 20.0;
  std::vector<std::pair<std::string, std::vector<double>>> utterances;
};

inline ScoreFile parse_scores(std::string_view text) {
  ScoreFile out;
  const auto all_lines = ioutil::lines(text);
  bool saw_polarity = false, saw_resolution = false, saw_header = false;
  for (std::size_t ln = 0; ln < all_lines.size(); ++ln) {
    const std::string_view line = all_lines[ln];
    if (line.empty()) continue;
    const std::string where = "score file line " + std::to_string(ln + 1);
    if (line[0] == '#') {
      if (line.starts_with("#polarity=")) {
        const std::string_view v = line.substr(10);
        if (v == "higher_is_genuine") out.polarity = Polarity::HigherIsGenuine;
        else if (v == "higher_is_fake") out.polarity = Polarity::HigherIsFake;
        else throw FormatError(where + ": unknown polarity '" + std::string(v) + "'");
        saw_polarity = true;
      } else if (line.starts_with("#resolution_ms=")) {
        out.resolution_ms = ioutil::parse_double(line.substr(15), where);
        if (!(out.resolution_ms > 0.0)) throw FormatError(where + ": resolution_ms must be > 0");
        saw_resolution = true;
      } else {
        throw FormatError(where + ": unknown metadata line");
      }
      continue;
    }
    if (!saw_header) {
      if (line != "utt_id\tframe\tscore")
        throw FormatError(where + ": expected header 'utt_id\\tframe\\tscore'");
      saw_header = true;
      continue;
    }
    const auto cols = ioutil::split(line, '\t');
    if (cols.size() != 3) throw FormatError(where + ": expected 3 tab-separated columns");
    const std::string utt(cols[0]);
    const std::size_t frame = ioutil::parse_size(cols[1], where);
    const double score = ioutil::parse_double(cols[2], where);
    if (out.utterances.empty() || out.utterances.back().first != utt) {
      for (const auto& [seen, _] : out.utterances)
        if (seen == utt) throw FormatError(where + ": utterance '" + utt + "' rows must be contiguous");
      if (frame != 0) throw FormatError(where + ": frame indices must start at 0");
      out.utterances.emplace_back(utt, std::vector<double>{});
    } else if (frame != out.utterances.back().second.size()) {
      throw FormatError(where + ": frame indices must be contiguous and ascending");
    }
    out.utterances.back().second.push_back(score);
  }
  if (!saw_polarity || !saw_resolution || !saw_header)
    throw FormatError("score file: missing #polarity, #resolution_ms, or header line");
  return out;
}

inline std::string serialize_scores(const ScoreFile& scores) {
  std::string out = "#polarity=";
  out += scores.polarity == Polarity::HigherIsGenuine ? "higher_is_genuine" : "higher_is_fake";
  out += "\n#resolution_ms=" + ioutil::format_general(scores.resolution_ms) + "\n";
  out += "utt_id\tframe\tscore\n";
  for (const auto& [utt, values] : scores.utterances)
    for (std::size_t t = 0; t < values.size(); ++t)
      out += utt + "\t" + std::to_string(t) + "\t" + ioutil::format_general(values[t]) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Label files

struct LabelFile {
  double resolution_ms = 20.0;
  std::vector<std::pair<std::string, FrameClassSeq>> utterances;
};

inline LabelFile parse_labels(std::string_view text) {
  LabelFile out;
  bool saw_resolution = false;
  const auto all_lines = ioutil::lines(text);
  for (std::size_t ln = 0; ln < all_lines.size(); ++ln) {
    const std::string_view line = all_lines[ln];
    if (line.empty()) continue;
    const std::string where = "label file line " + std::to_string(ln + 1);
    if (line.starts_with("#resolution_ms=")) {
      out.resolution_ms = ioutil::parse_double(line.substr(15), where);
      if (!(out.resolution_ms > 0.0)) throw FormatError(where + ": resolution_ms must be > 0");
      saw_resolution = true;
      continue;
    }
    if (line[0] == '#') throw FormatError(where + ": unknown metadata line");
    const std::size_t sep = line.find(' ');
    if (sep == std::string_view::npos || sep == 0 || sep + 1 >= line.size())
      throw FormatError(where + ": expected '<utt_id> <RF...>'");
    FrameClassSeq seq;
    seq.resolution_ms = out.resolution_ms;
    for (const char c : line.substr(sep + 1)) {
      if (c == 'R') seq.classes.push_back(FrameClass::Real);
      else if (c == 'F') seq.classes.push_back(FrameClass::Fake);
      else throw FormatError(where + ": labels must be 'R' or 'F'");
    }
    out.utterances.emplace_back(std::string(line.substr(0, sep)), std::move(seq));
  }
  if (!saw_resolution) throw FormatError("label file: missing #resolution_ms");
  for (auto& [_, seq] : out.utterances) seq.resolution_ms = out.resolution_ms;
  return out;
}

inline std::string serialize_labels(const LabelFile& labels) {
  std::string out = "#resolution_ms=" + ioutil::format_general(labels.resolution_ms) + "\n";
  for (const auto& [utt, seq] : labels.utterances) {
    out += utt + " ";
    for (const FrameClass c : seq.classes) out += frame_class_char(c);
    out += '\n';
  }
  return out;
}

// Joint-label TSV, one row per frame (output format for positional encoding).
inline std::string serialize_joint_labels(
    const std::vector<std::pair<std::string, JointLabelSeq>>& utterances) {
  std::string out = "utt_id\tframe\tclass\tposition\n";
  for (const auto& [utt, joint] : utterances)
    for (std::size_t t = 0; t < joint.size(); ++t) {
      out += utt + "\t" + std::to_string(t) + "\t";
      out += frame_class_char(joint.labels[t].cls);
      out += "\t";
      out += positional_label_name(joint.labels[t].pos);
      out += "\n";
    }
  return out;
}

// ---------------------------------------------------------------------------
// Feature files

struct FeatureFile {
  std::size_t dim = 0;
  double resolution_ms = 20.0;
  std::vector<std::pair<std::string, FrameFeatureSeq>> utterances;
};

inline FeatureFile parse_features(std::string_view text) {
  FeatureFile out;
  bool saw_dim = false, saw_resolution = false, saw_header = false;
  const auto all_lines = ioutil::lines(text);
  for (std::size_t ln = 0; ln < all_lines.size(); ++ln) {
    const std::string_view line = all_lines[ln];
    if (line.empty()) continue;
    const std::string where = "feature file line " + std::to_string(ln + 1);
    if (line.starts_with("#dim=")) {
      out.dim = ioutil::parse_size(line.substr(5), where);
      if (out.dim == 0) throw FormatError(where + ": dim must be positive");
      saw_dim = true;
      continue;
    }
    if (line.starts_with("#resolution_ms=")) {
      out.resolution_ms = ioutil::parse_double(line.substr(15), where);
      saw_resolution = true;
      continue;
    }
    if (line[0] == '#') throw FormatError(where + ": unknown metadata line");
    if (!saw_header) {
      if (!line.starts_with("utt_id\tframe")) throw FormatError(where + ": expected header row");
      saw_header = true;
      continue;
    }
    if (!saw_dim) throw FormatError(where + ": #dim must precede data rows");
    const auto cols = ioutil::split(line, '\t');
    if (cols.size() != out.dim + 2)
      throw FormatError(where + ": expected " + std::to_string(out.dim + 2) + " columns");
    const std::string utt(cols[0]);
    const std::size_t frame = ioutil::parse_size(cols[1], where);
    if (out.utterances.empty() || out.utterances.back().first != utt) {
      if (frame != 0) throw FormatError(where + ": frame indices must start at 0");
      FrameFeatureSeq seq;
      seq.dim = out.dim;
      seq.resolution_ms = out.resolution_ms;
      out.utterances.emplace_back(utt, std::move(seq));
    } else if (frame != out.utterances.back().second.frames()) {
      throw FormatError(where + ": frame indices must be contiguous and ascending");
    }
    for (std::size_t k = 0; k < out.dim; ++k)
      out.utterances.back().second.values.push_back(ioutil::parse_double(cols[k + 2], where));
  }
  if (!saw_dim || !saw_resolution || !saw_header)
    throw FormatError("feature file: missing #dim, #resolution_ms, or header line");
  return out;
}

inline std::string serialize_features(const FeatureFile& features) {
  std::string out = "#dim=" + std::to_string(features.dim) + "\n";
  out += "#resolution_ms=" + ioutil::format_general(features.resolution_ms) + "\n";
  out += "utt_id\tframe";
  for (std::size_t k = 0; k < features.dim; ++k) out += "\tf" + std::to_string(k);
  out += "\n";
  for (const auto& [utt, seq] : features.utterances)
    for (std::size_t t = 0; t < seq.frames(); ++t) {
      out += utt + "\t" + std::to_string(t);
      for (std::size_t k = 0; k < features.dim; ++k)
        out += "\t" + ioutil::format_general(seq.values[t * seq.dim + k]);
      out += "\n";
    }
  return out;
}

// ---------------------------------------------------------------------------
// WAV (RIFF/WAVE, PCM16 mono)

struct WavAudio {
  std::uint32_t sample_rate = 16000;
  std::vector<std::int16_t> samples;

  std::vector<double> to_float() const {
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i] / 32768.0;
    return out;
  }

  static WavAudio from_float(const std::vector<double>& values, std::uint32_t sample_rate) {
    WavAudio out;
    out.sample_rate = sample_rate;
    out.samples.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double scaled = std::round(std::clamp(values[i], -1.0, 1.0) * 32767.0);
      out.samples[i] = static_cast<std::int16_t>(scaled);
    }
    return out;
  }
};

namespace ioutil {

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

inline void put_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace ioutil

inline WavAudio parse_wav(std::string_view bytes) {
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();
  if (size < 12 || std::memcmp(data, "RIFF", 4) != 0 || std::memcmp(data + 8, "WAVE", 4) != 0)
    throw FormatError("wav: not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  const unsigned char* pcm = nullptr;
  std::size_t pcm_bytes = 0;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const std::uint32_t chunk_size = ioutil::read_u32le(data + pos + 4);
    const unsigned char* chunk = data + pos + 8;
    if (pos + 8 + chunk_size > size) throw FormatError("wav: truncated chunk");
    if (std::memcmp(data + pos, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw FormatError("wav: fmt chunk too short");
      format = ioutil::read_u16le(chunk);
      channels = ioutil::read_u16le(chunk + 2);
      sample_rate = ioutil::read_u32le(chunk + 4);
      bits = ioutil::read_u16le(chunk + 14);
      have_fmt = true;
    } else if (std::memcmp(data + pos, "data", 4) == 0) {
      pcm = chunk;
      pcm_bytes = chunk_size;
    }
    pos += 8 + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }
  if (!have_fmt || pcm == nullptr) throw FormatError("wav: missing fmt or data chunk");
  if (format != 1) throw FormatError("wav: PCM16 required (non-PCM encoding)");
  if (channels != 1) throw FormatError("wav: mono required");
  if (bits != 16) throw FormatError("wav: PCM16 required (bad sample width)");
  if (sample_rate == 0) throw FormatError("wav: invalid sample rate");
  if (pcm_bytes % 2 != 0) throw FormatError("wav: odd data chunk length");

  WavAudio out;
  out.sample_rate = sample_rate;
  out.samples.resize(pcm_bytes / 2);
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] = static_cast<std::int16_t>(
        static_cast<std::uint16_t>(pcm[2 * i] | pcm[2 * i + 1] << 8));
  return out;
}

inline std::string serialize_wav(const WavAudio& audio) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  ioutil::put_u32le(out, 36 + data_bytes);
  out += "WAVEfmt ";
  ioutil::put_u32le(out, 16);
  ioutil::put_u16le(out, 1);  // PCM
  ioutil::put_u16le(out, 1);  // mono
  ioutil::put_u32le(out, audio.sample_rate);
  ioutil::put_u32le(out, audio.sample_rate * 2);  // byte rate
  ioutil::put_u16le(out, 2);                      // block align
  ioutil::put_u16le(out, 16);                     // bits per sample
  out += "data";
  ioutil::put_u32le(out, data_bytes);
  for (const std::int16_t s : audio.samples)
    ioutil::put_u16le(out, static_cast<std::uint16_t>(s));
  return out;
}

}  // namespace spoofloc
