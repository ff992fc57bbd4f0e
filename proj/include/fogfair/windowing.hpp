#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fogfair/core.hpp"
#include "fogfair/ingest.hpp"

namespace fogfair {

struct Window {
  std::string subject_id;
  std::string recording_id;
  std::size_t start_index = 0;
  Matrix data;  // window_len x n_channels
  std::uint8_t label = 0;

  /// Stable unit id for prediction sets and fairness grouping.
  std::string unit_id() const { return recording_id + "#" + std::to_string(start_index); }
};

struct WindowSet {
  std::vector<Window> windows;
  double window_seconds = 0.0;
  double sampling_rate_hz = 0.0;
  std::string dataset_id;
  std::vector<ChannelDescriptor> channels;
};

struct Episode {
  std::string subject_id;
  std::string recording_id;
  std::size_t start_index = 0;  // inclusive
  std::size_t end_index = 0;    // exclusive
  Matrix data;
  std::vector<ChannelDescriptor> channels;
  double sampling_rate_hz = 0.0;

  std::string unit_id() const { return recording_id + "#" + std::to_string(start_index); }
};

constexpr double kDefaultMinEpisodeSeconds = 0.5;

// Tiles from sample 0 with stride = window length; the trailing partial
// window is dropped. Window label = the recording label at its last sample.
WindowSet segment(const SensorRecording& rec, double window_seconds);

// Maximal runs of label 1 lasting at least min_duration_s, in temporal order.
std::vector<Episode> extract_episodes(const SensorRecording& rec,
                                      double min_duration_s = kDefaultMinEpisodeSeconds);

}  // namespace fogfair
