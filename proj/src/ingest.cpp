#include "fogfair/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fogfair {

namespace fs = std::filesystem;
using nlohmann::json;

const char* body_location_name(BodyLocation loc) {
  switch (loc) {
    case BodyLocation::LowerBack: return "lowerback";
    case BodyLocation::Ankle: return "ankle";
    case BodyLocation::Shank: return "shank";
    case BodyLocation::Thigh: return "thigh";
  }
  return "?";
}

const char* axis_name(Axis axis) {
  switch (axis) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "?";
}

std::string channel_name(const ChannelDescriptor& ch) {
  return std::string(body_location_name(ch.body_location)) + "_" + axis_name(ch.axis);
}

namespace {

std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

BodyLocation parse_location(const std::string& s) {
  std::string t = to_lower(s);
  if (t == "lowerback" || t == "lower_back") return BodyLocation::LowerBack;
  if (t == "ankle") return BodyLocation::Ankle;
  if (t == "shank") return BodyLocation::Shank;
  if (t == "thigh") return BodyLocation::Thigh;
  throw Error(ErrorCode::MalformedRow, "unknown body location '" + s + "'");
}

Axis parse_axis(const std::string& s) {
  std::string t = to_lower(s);
  if (t == "x") return Axis::X;
  if (t == "y") return Axis::Y;
  if (t == "z") return Axis::Z;
  throw Error(ErrorCode::MalformedRow, "unknown axis '" + s + "'");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, const std::string& file, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::MalformedRow,
                file + ":" + std::to_string(line_no) + ": bad numeric field '" + s + "'");
  }
}

// '*' and '?' wildcards, no character classes.
bool glob_match(const std::string& pattern, const std::string& text) {
  std::size_t p = 0, t = 0, star = std::string::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::string subject_id_from_stem(const std::string& stem) {
  auto pos = stem.find("__");
  return pos == std::string::npos ? stem : stem.substr(0, pos);
}

std::string read_line_strip_cr(std::istream& in, bool& ok) {
  std::string line;
  ok = static_cast<bool>(std::getline(in, line));
  if (ok && !line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

ChannelDescriptor parse_channel_name(const std::string& name) {
  auto pos = name.rfind('_');
  if (pos == std::string::npos || pos == 0 || pos + 1 >= name.size())
    throw Error(ErrorCode::MalformedRow, "bad channel column '" + name + "'");
  return ChannelDescriptor{parse_location(name.substr(0, pos)), parse_axis(name.substr(pos + 1))};
}

DatasetManifest load_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open manifest " + manifest_path.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ConfigError, "manifest parse: " + std::string(e.what()));
  }
  DatasetManifest m;
  try {
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.sampling_rate_hz = j.at("sampling_rate_hz").get<double>();
    for (const auto& loc : j.at("sensor_locations")) m.sensor_locations.push_back(parse_location(loc.get<std::string>()));
    m.recordings_glob = j.at("recordings_glob").get<std::string>();
    m.metadata_file = j.at("metadata_file").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, "manifest field: " + std::string(e.what()));
  }
  if (m.sampling_rate_hz <= 0.0)
    throw Error(ErrorCode::ConfigError, "manifest sampling_rate_hz must be positive");
  return m;
}

namespace {

SensorRecording load_recording_csv(const fs::path& file, const DatasetManifest& manifest) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + file.string());

  bool ok = false;
  std::string header = read_line_strip_cr(in, ok);
  if (!ok) throw Error(ErrorCode::MalformedRow, file.string() + ":1: empty file");
  auto cols = split_csv_line(header);
  if (cols.size() < 3 || cols.front() != "time_s" || cols.back() != "fog_label")
    throw Error(ErrorCode::MalformedRow,
                file.string() + ":1: header must be time_s,<loc>_<axis>...,fog_label");

  SensorRecording rec;
  rec.subject_id = subject_id_from_stem(file.stem().string());
  rec.recording_id = file.stem().string();
  rec.dataset_id = manifest.dataset_id;
  rec.sampling_rate_hz = manifest.sampling_rate_hz;
  for (std::size_t c = 1; c + 1 < cols.size(); ++c) rec.channels.push_back(parse_channel_name(cols[c]));

  std::set<std::pair<int, int>> seen;
  for (const auto& ch : rec.channels) {
    auto key = std::make_pair(static_cast<int>(ch.body_location), static_cast<int>(ch.axis));
    if (!seen.insert(key).second)
      throw Error(ErrorCode::MalformedRow,
                  file.string() + ":1: duplicate channel " + channel_name(ch));
  }

  const std::size_t n_channels = rec.channels.size();
  std::vector<double> values;
  std::vector<std::uint8_t> labels;
  double prev_time = -std::numeric_limits<double>::infinity();
  std::size_t line_no = 1;
  for (;;) {
    std::string line = read_line_strip_cr(in, ok);
    if (!ok) break;
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != n_channels + 2)
      throw Error(ErrorCode::MalformedRow,
                  file.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(n_channels + 2) + " fields, got " + std::to_string(fields.size()));
    double t = parse_double(fields[0], file.string(), line_no);
    if (!(t > prev_time))
      throw Error(ErrorCode::NonMonotonicTimestamps,
                  file.string() + ":" + std::to_string(line_no) + ": time_s must be strictly increasing");
    prev_time = t;
    for (std::size_t c = 0; c < n_channels; ++c) {
      double v = parse_double(fields[c + 1], file.string(), line_no);
      if (!std::isfinite(v))
        throw Error(ErrorCode::MalformedRow,
                    file.string() + ":" + std::to_string(line_no) + ": non-finite sample value");
      values.push_back(v);
    }
    const std::string& lab = fields.back();
    if (lab == "0")
      labels.push_back(0);
    else if (lab == "1")
      labels.push_back(1);
    else
      throw Error(ErrorCode::MalformedRow,
                  file.string() + ":" + std::to_string(line_no) + ": fog_label must be 0 or 1, got '" + lab + "'");
  }

  rec.samples = Matrix(labels.size(), n_channels);
  std::copy(values.begin(), values.end(), rec.samples.data());
  rec.labels = std::move(labels);
  return rec;
}

std::vector<SubjectMetadata> load_metadata_csv(const fs::path& file, const std::string& dataset_id) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::IoError, "cannot open metadata " + file.string());
  bool ok = false;
  std::string header = read_line_strip_cr(in, ok);
  if (!ok || split_csv_line(header) !=
                 std::vector<std::string>{"subject_id", "sex", "age_years", "disease_duration_years"})
    throw Error(ErrorCode::MalformedRow,
                file.string() + ":1: header must be subject_id,sex,age_years,disease_duration_years");

  std::vector<SubjectMetadata> rows;
  std::set<std::string> seen;
  std::size_t line_no = 1;
  for (;;) {
    std::string line = read_line_strip_cr(in, ok);
    if (!ok) break;
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 4)
      throw Error(ErrorCode::MalformedRow, file.string() + ":" + std::to_string(line_no) + ": expected 4 fields");
    SubjectMetadata md;
    md.subject_id = fields[0];
    md.dataset_id = dataset_id;
    if (fields[1] == "M")
      md.sex = Sex::Male;
    else if (fields[1] == "F")
      md.sex = Sex::Female;
    else
      throw Error(ErrorCode::MalformedRow,
                  file.string() + ":" + std::to_string(line_no) + ": sex must be M or F");
    md.age_years = parse_double(fields[2], file.string(), line_no);
    md.disease_duration_years = parse_double(fields[3], file.string(), line_no);
    if (md.age_years <= 0.0)
      throw Error(ErrorCode::MalformedRow, file.string() + ":" + std::to_string(line_no) + ": age_years must be positive");
    if (md.disease_duration_years < 0.0)
      throw Error(ErrorCode::MalformedRow,
                  file.string() + ":" + std::to_string(line_no) + ": disease_duration_years must be non-negative");
    if (!seen.insert(md.subject_id).second)
      throw Error(ErrorCode::MalformedRow,
                  file.string() + ":" + std::to_string(line_no) + ": duplicate subject_id " + md.subject_id);
    rows.push_back(std::move(md));
  }
  return rows;
}

}  // namespace

Dataset load_dataset(const fs::path& dir, const DatasetManifest& manifest) {
  // Resolve the glob against the dataset directory. Paths are sorted so the
  // load order (and everything derived from it) is deterministic.
  std::vector<fs::path> files;
  fs::path pattern_path = dir / manifest.recordings_glob;
  fs::path parent = pattern_path.parent_path();
  std::string pattern = pattern_path.filename().string();
  if (fs::exists(parent) && fs::is_directory(parent)) {
    for (const auto& entry : fs::directory_iterator(parent)) {
      if (entry.is_regular_file() && glob_match(pattern, entry.path().filename().string()))
        files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw Error(ErrorCode::IoError,
                "no recordings match " + manifest.recordings_glob + " under " + dir.string());

  Dataset ds;
  ds.dataset_id = manifest.dataset_id;
  for (const auto& f : files) ds.recordings.push_back(load_recording_csv(f, manifest));
  ds.metadata = load_metadata_csv(dir / manifest.metadata_file, manifest.dataset_id);

  std::set<std::string> recorded, described;
  for (const auto& r : ds.recordings) recorded.insert(r.subject_id);
  for (const auto& m : ds.metadata) described.insert(m.subject_id);
  for (const auto& s : recorded)
    if (!described.count(s)) throw Error(ErrorCode::MissingMetadata, "subject " + s + " has recordings but no metadata row");
  for (const auto& s : described)
    if (!recorded.count(s)) throw Error(ErrorCode::UnmatchedMetadata, "subject " + s + " has metadata but no recordings");
  return ds;
}

Dataset load_dataset(const fs::path& dir) { return load_dataset(dir, load_manifest(dir / "manifest.json")); }

SensorRecording resample(const SensorRecording& rec, double target_hz) {
  if (target_hz > rec.sampling_rate_hz)
    throw Error(ErrorCode::UpsampleRequested,
                "target " + std::to_string(target_hz) + " Hz > source " + std::to_string(rec.sampling_rate_hz) + " Hz");
  if (target_hz == rec.sampling_rate_hz) return rec;

  const std::size_t n_src = rec.samples.rows();
  const std::size_t n_ch = rec.samples.cols();
  const double ratio = rec.sampling_rate_hz / target_hz;
  const auto n_out = static_cast<std::size_t>(
      std::floor(static_cast<double>(n_src) * target_hz / rec.sampling_rate_hz + 1e-9));

  SensorRecording out;
  out.subject_id = rec.subject_id;
  out.recording_id = rec.recording_id;
  out.dataset_id = rec.dataset_id;
  out.sampling_rate_hz = target_hz;
  out.channels = rec.channels;
  out.samples = Matrix(n_out, n_ch);
  out.labels.resize(n_out);

  const std::size_t width = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
  // centered moving average; window clamps at the edges
  Matrix smooth(n_src, n_ch);
  if (width <= 1) {
    smooth = rec.samples;
  } else {
    const std::size_t half_lo = (width - 1) / 2;
    const std::size_t half_hi = width - 1 - half_lo;
    for (std::size_t i = 0; i < n_src; ++i) {
      std::size_t lo = i >= half_lo ? i - half_lo : 0;
      std::size_t hi = std::min(n_src - 1, i + half_hi);
      double inv = 1.0 / static_cast<double>(hi - lo + 1);
      for (std::size_t c = 0; c < n_ch; ++c) {
        double acc = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) acc += rec.samples(k, c);
        smooth(i, c) = acc * inv;
      }
    }
  }

  for (std::size_t k = 0; k < n_out; ++k) {
    double pos = static_cast<double>(k) * ratio;
    auto i0 = static_cast<std::size_t>(std::floor(pos));
    if (i0 >= n_src - 1) i0 = n_src - 1;
    double frac = pos - static_cast<double>(i0);
    std::size_t i1 = std::min(i0 + 1, n_src - 1);
    for (std::size_t c = 0; c < n_ch; ++c)
      out.samples(k, c) = smooth(i0, c) + frac * (smooth(i1, c) - smooth(i0, c));
    auto nearest = static_cast<std::size_t>(std::llround(pos));
    if (nearest >= n_src) nearest = n_src - 1;
    out.labels[k] = rec.labels[nearest];
  }
  return out;
}

ScalingParams fit_scaling(const std::vector<const SensorRecording*>& recordings, FitScope scope) {
  if (recordings.empty()) throw Error(ErrorCode::ChannelMismatch, "fit_scaling on empty recording list");
  ScalingParams params;
  params.fit_scope = scope;
  params.channels = recordings.front()->channels;
  const std::size_t n_ch = params.channels.size();
  params.ch_min.assign(n_ch, std::numeric_limits<double>::infinity());
  params.ch_max.assign(n_ch, -std::numeric_limits<double>::infinity());
  for (const SensorRecording* rec : recordings) {
    if (rec->channels != params.channels)
      throw Error(ErrorCode::ChannelMismatch, "recordings disagree on channel layout");
    for (std::size_t i = 0; i < rec->samples.rows(); ++i)
      for (std::size_t c = 0; c < n_ch; ++c) {
        double v = rec->samples(i, c);
        params.ch_min[c] = std::min(params.ch_min[c], v);
        params.ch_max[c] = std::max(params.ch_max[c], v);
      }
  }
  return params;
}

ScalingParams fit_scaling(const std::vector<SensorRecording>& recordings, FitScope scope) {
  std::vector<const SensorRecording*> ptrs;
  ptrs.reserve(recordings.size());
  for (const auto& rec : recordings) ptrs.push_back(&rec);
  return fit_scaling(ptrs, scope);
}

Matrix apply_scaling(const Matrix& samples, const ScalingParams& params) {
  if (samples.cols() != params.channels.size())
    throw Error(ErrorCode::ChannelMismatch, "sample columns do not match scaling channels");
  Matrix out(samples.rows(), samples.cols());
  for (std::size_t c = 0; c < samples.cols(); ++c) {
    double lo = params.ch_min[c], hi = params.ch_max[c];
    if (hi > lo) {
      double inv = 1.0 / (hi - lo);
      for (std::size_t i = 0; i < samples.rows(); ++i) out(i, c) = (samples(i, c) - lo) * inv;
    } else {
      for (std::size_t i = 0; i < samples.rows(); ++i) out(i, c) = 0.5;
    }
  }
  return out;
}

SensorRecording apply_scaling(const SensorRecording& rec, const ScalingParams& params) {
  if (rec.channels != params.channels)
    throw Error(ErrorCode::ChannelMismatch, "recording channels do not match scaling channels");
  SensorRecording out = rec;
  out.samples = apply_scaling(rec.samples, params);
  return out;
}

namespace {

bool is_lower_extremity(BodyLocation loc) { return loc != BodyLocation::LowerBack; }

std::set<BodyLocation> locations_of(const std::vector<SensorRecording>& recs) {
  std::set<BodyLocation> out;
  for (const auto& r : recs)
    for (const auto& ch : r.channels) out.insert(ch.body_location);
  return out;
}

// Picks the side's sensor within the matched class: lower back itself, or the
// first lower-extremity location in canonical order (ankle < shank < thigh).
BodyLocation pick_location(const std::set<BodyLocation>& locs, bool lower_back_class) {
  if (lower_back_class) return BodyLocation::LowerBack;
  for (BodyLocation cand : {BodyLocation::Ankle, BodyLocation::Shank, BodyLocation::Thigh})
    if (locs.count(cand)) return cand;
  throw Error(ErrorCode::NoCompatiblePlacement, "no lower-extremity sensor");
}

std::set<Axis> axes_at(const std::vector<SensorRecording>& recs, BodyLocation loc) {
  std::set<Axis> axes;
  for (const auto& r : recs)
    for (const auto& ch : r.channels)
      if (ch.body_location == loc) axes.insert(ch.axis);
  return axes;
}

SensorRecording restrict_channels(const SensorRecording& rec, BodyLocation loc,
                                  const std::set<Axis>& axes) {
  SensorRecording out;
  out.subject_id = rec.subject_id;
  out.recording_id = rec.recording_id;
  out.dataset_id = rec.dataset_id;
  out.sampling_rate_hz = rec.sampling_rate_hz;
  out.labels = rec.labels;
  std::vector<std::size_t> keep;
  for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
    if (!axes.count(axis)) continue;
    for (std::size_t c = 0; c < rec.channels.size(); ++c)
      if (rec.channels[c].body_location == loc && rec.channels[c].axis == axis) {
        keep.push_back(c);
        out.channels.push_back(rec.channels[c]);
      }
  }
  out.samples = Matrix(rec.samples.rows(), keep.size());
  for (std::size_t i = 0; i < rec.samples.rows(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) out.samples(i, j) = rec.samples(i, keep[j]);
  return out;
}

}  // namespace

std::pair<std::vector<SensorRecording>, std::vector<SensorRecording>> harmonize_pair(
    const std::vector<SensorRecording>& source, const std::vector<SensorRecording>& target) {
  if (source.empty() || target.empty())
    throw Error(ErrorCode::NoCompatiblePlacement, "harmonize_pair on empty recording list");

  auto src_locs = locations_of(source);
  auto tgt_locs = locations_of(target);
  bool src_lb = src_locs.count(BodyLocation::LowerBack) > 0;
  bool tgt_lb = tgt_locs.count(BodyLocation::LowerBack) > 0;
  bool src_le = std::any_of(src_locs.begin(), src_locs.end(), is_lower_extremity);
  bool tgt_le = std::any_of(tgt_locs.begin(), tgt_locs.end(), is_lower_extremity);

  bool use_lower_back;
  if (src_lb && tgt_lb)
    use_lower_back = true;  // lower back preferred when both sides carry it
  else if (src_le && tgt_le)
    use_lower_back = false;
  else
    throw Error(ErrorCode::NoCompatiblePlacement,
                "source and target share no comparable sensor placement class");

  BodyLocation src_loc = pick_location(src_locs, use_lower_back);
  BodyLocation tgt_loc = pick_location(tgt_locs, use_lower_back);

  std::set<Axis> axes;
  auto src_axes = axes_at(source, src_loc);
  auto tgt_axes = axes_at(target, tgt_loc);
  std::set_intersection(src_axes.begin(), src_axes.end(), tgt_axes.begin(), tgt_axes.end(),
                        std::inserter(axes, axes.begin()));
  if (axes.empty()) throw Error(ErrorCode::NoCompatiblePlacement, "no shared axes at matched placement");

  double min_rate = std::numeric_limits<double>::infinity();
  for (const auto& r : source) min_rate = std::min(min_rate, r.sampling_rate_hz);
  for (const auto& r : target) min_rate = std::min(min_rate, r.sampling_rate_hz);

  auto convert = [&](const std::vector<SensorRecording>& recs, BodyLocation loc) {
    std::vector<SensorRecording> out;
    out.reserve(recs.size());
    for (const auto& r : recs) out.push_back(resample(restrict_channels(r, loc, axes), min_rate));
    return out;
  };
  return {convert(source, src_loc), convert(target, tgt_loc)};
}

}  // namespace fogfair
