#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "fogfair/core.hpp"

namespace fogfair {

enum class BodyLocation { LowerBack, Ankle, Shank, Thigh };
enum class Axis { X, Y, Z };

const char* body_location_name(BodyLocation loc);
const char* axis_name(Axis axis);

struct ChannelDescriptor {
  BodyLocation body_location;
  Axis axis;

  bool operator==(const ChannelDescriptor&) const = default;
};

/// Column name of the form "<loc>_<axis>", e.g. "ankle_x".
std::string channel_name(const ChannelDescriptor& ch);
ChannelDescriptor parse_channel_name(const std::string& name);

/// One subject's multi-channel IMU time series with per-sample FOG labels.
/// A subject may contribute several recordings; recording_id stays unique.
struct SensorRecording {
  std::string subject_id;
  std::string recording_id;
  std::string dataset_id;
  double sampling_rate_hz = 0.0;
  std::vector<ChannelDescriptor> channels;
  Matrix samples;                   // [n_samples x n_channels]
  std::vector<std::uint8_t> labels; // 0 = no FOG, 1 = FOG
};

enum class Sex { Male, Female };

struct SubjectMetadata {
  std::string subject_id;
  Sex sex = Sex::Male;
  double age_years = 0.0;
  double disease_duration_years = 0.0;
  std::string dataset_id;
};

enum class FitScope { TrainOnly, Global };

/// Per-channel Min-Max parameters. Channels must match the recording the
/// params are applied to.
struct ScalingParams {
  std::vector<ChannelDescriptor> channels;
  std::vector<double> ch_min;
  std::vector<double> ch_max;
  FitScope fit_scope = FitScope::TrainOnly;
};

/// Parsed dataset manifest. Recording files are resolved relative to the
/// dataset directory via the glob pattern (supports '*' and '?').
struct DatasetManifest {
  std::string dataset_id;
  double sampling_rate_hz = 0.0;
  std::vector<BodyLocation> sensor_locations;
  std::string recordings_glob;
  std::string metadata_file;
};

DatasetManifest load_manifest(const std::filesystem::path& manifest_path);

struct Dataset {
  std::string dataset_id;
  std::vector<SensorRecording> recordings;
  std::vector<SubjectMetadata> metadata;
};

/// Loads every recording matched by the manifest glob plus the metadata
/// table. Subject coverage between the two must be exact.
Dataset load_dataset(const std::filesystem::path& dir, const DatasetManifest& manifest);

/// Convenience overload: reads `<dir>/manifest.json` first.
Dataset load_dataset(const std::filesystem::path& dir);

/// Downsamples to target_hz: moving-average low-pass of width
/// ceil(source/target), then linear interpolation onto the target grid.
/// Labels take the nearest original sample's label.
SensorRecording resample(const SensorRecording& rec, double target_hz);

ScalingParams fit_scaling(const std::vector<SensorRecording>& recordings, FitScope scope);
ScalingParams fit_scaling(const std::vector<const SensorRecording*>& recordings, FitScope scope);

/// (x - min) / (max - min) per channel; constant channels map to 0.5.
/// Values outside the fit range are not clipped.
SensorRecording apply_scaling(const SensorRecording& rec, const ScalingParams& params);
Matrix apply_scaling(const Matrix& samples, const ScalingParams& params);

/// Restricts both sides to a shared body-location class (lower back, or one
/// lower-extremity sensor per side) and resamples everything to the lowest
/// sampling rate present. Outputs have equal channel counts.
std::pair<std::vector<SensorRecording>, std::vector<SensorRecording>> harmonize_pair(
    const std::vector<SensorRecording>& source, const std::vector<SensorRecording>& target);

}  // namespace fogfair
