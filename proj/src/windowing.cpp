#include "fogfair/windowing.hpp"

#include <cmath>

namespace fogfair {

WindowSet segment(const SensorRecording& rec, double window_seconds) {
  if (window_seconds <= 0.0) throw Error(ErrorCode::ConfigError, "window_seconds must be positive");
  const auto window_len =
      static_cast<std::size_t>(std::llround(window_seconds * rec.sampling_rate_hz));
  if (window_len == 0) throw Error(ErrorCode::ConfigError, "window shorter than one sample");

  const std::size_t n = rec.samples.rows();
  if (n < window_len)
    throw Error(ErrorCode::RecordingTooShort,
                "recording " + rec.subject_id + " has " + std::to_string(n) + " samples, window needs " +
                    std::to_string(window_len));

  WindowSet ws;
  ws.window_seconds = window_seconds;
  ws.sampling_rate_hz = rec.sampling_rate_hz;
  ws.dataset_id = rec.dataset_id;
  ws.channels = rec.channels;

  const std::size_t n_ch = rec.samples.cols();
  for (std::size_t start = 0; start + window_len <= n; start += window_len) {
    Window w;
    w.subject_id = rec.subject_id;
    w.recording_id = rec.recording_id;
    w.start_index = start;
    w.data = Matrix(window_len, n_ch);
    for (std::size_t i = 0; i < window_len; ++i)
      for (std::size_t c = 0; c < n_ch; ++c) w.data(i, c) = rec.samples(start + i, c);
    w.label = rec.labels[start + window_len - 1];
    ws.windows.push_back(std::move(w));
  }
  return ws;
}

std::vector<Episode> extract_episodes(const SensorRecording& rec, double min_duration_s) {
  const auto min_len =
      static_cast<std::size_t>(std::ceil(min_duration_s * rec.sampling_rate_hz - 1e-9));
  const std::size_t n = rec.labels.size();
  std::vector<Episode> out;
  std::size_t i = 0;
  while (i < n) {
    if (rec.labels[i] != 1) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < n && rec.labels[i] == 1) ++i;
    if (i - start < std::max<std::size_t>(min_len, 1)) continue;
    Episode ep;
    ep.subject_id = rec.subject_id;
    ep.recording_id = rec.recording_id;
    ep.start_index = start;
    ep.end_index = i;
    ep.channels = rec.channels;
    ep.sampling_rate_hz = rec.sampling_rate_hz;
    const std::size_t n_ch = rec.samples.cols();
    ep.data = Matrix(i - start, n_ch);
    for (std::size_t r = start; r < i; ++r)
      for (std::size_t c = 0; c < n_ch; ++c) ep.data(r - start, c) = rec.samples(r, c);
    out.push_back(std::move(ep));
  }
  return out;
}

}  // namespace fogfair
