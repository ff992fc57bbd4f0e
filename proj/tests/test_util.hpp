#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fogfair/ingest.hpp"

namespace fogfair::testutil {

/// Unique temp directory removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("fogfair_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  out << content;
}

/// In-memory recording with the given per-sample values (single channel
/// unless more columns are supplied).
inline SensorRecording make_recording(const std::string& subject, const std::string& rec_id,
                                      double rate, const std::vector<double>& x,
                                      const std::vector<std::uint8_t>& labels) {
  SensorRecording rec;
  rec.subject_id = subject;
  rec.recording_id = rec_id;
  rec.dataset_id = "test";
  rec.sampling_rate_hz = rate;
  rec.channels = {{BodyLocation::LowerBack, Axis::X}};
  rec.samples = Matrix(x.size(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) rec.samples(i, 0) = x[i];
  rec.labels = labels;
  return rec;
}

/// Writes a loadable dataset: manifest + metadata + one CSV per recording.
struct DatasetBuilder {
  std::filesystem::path dir;
  double rate;
  std::string metadata = "subject_id,sex,age_years,disease_duration_years\n";
  explicit DatasetBuilder(std::filesystem::path d, double sampling_rate = 64.0)
      : dir(std::move(d)), rate(sampling_rate) {}

  void add_subject(const std::string& id, char sex, int age, int duration) {
    metadata += id + "," + sex + "," + std::to_string(age) + "," + std::to_string(duration) + "\n";
  }

  void add_recording_csv(const std::string& name, const std::string& body) {
    write_file(dir / "recordings" / name, body);
  }

  void finish(const std::string& locations = "[\"lowerback\"]") {
    write_file(dir / "metadata.csv", metadata);
    write_file(dir / "manifest.json",
               std::string("{\"dataset_id\":\"test\",\"sampling_rate_hz\":") +
                   std::to_string(rate) +
                   ",\"sensor_locations\":" + locations +
                   ",\"recordings_glob\":\"recordings/*.csv\"," +
                   "\"metadata_file\":\"metadata.csv\"}");
  }
};

/// CSV body for a single-channel lowerback recording.
inline std::string csv_body(double rate, const std::vector<double>& x,
                            const std::vector<std::uint8_t>& labels) {
  std::string body = "time_s,lowerback_x,fog_label\n";
  char line[96];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.6f,%.9g,%d\n", static_cast<double>(i) / rate, x[i],
                  static_cast<int>(labels[i]));
    body += line;
  }
  return body;
}

}  // namespace fogfair::testutil
