#pragma once

#include <cstdint>
#include <filesystem>

namespace fogfair {

/// Parameters of the synthetic biased dataset. Subjects fill a balanced
/// sex x age-group x duration-group grid (hence the multiple-of-8 count).
/// The injected bias: male tremor-type FOG is a distinct 5.3 Hz oscillation
/// at bias_ratio times the walking amplitude, while female tremor-type FOG
/// mimics walking exactly (same amplitude and frequency) and is therefore
/// invisible to any distribution-based detector. Akinetic-type FOG (a slow
/// low-band sway) is identical across groups. Episode boundaries align to
/// the 3 s window grid and every subject carries the same episode-duration
/// multiset, so group differences in detection rates come from the signal
/// alone, not from exposure.
struct SynthConfig {
  std::size_t n_subjects = 24;       // multiple of 8
  double seconds_per_subject = 240.0;
  double sampling_rate_hz = 64.0;
  double bias_ratio = 2.0;           // strong-group tremor amplitude multiplier
  double phenotype_mix = 0.85;       // fraction of tremulous episodes
  std::uint64_t seed = 7;
};

/// Window length the fixture's episodes are aligned to; audits of the
/// fixture should segment with the same value.
constexpr double kSynthWindowSeconds = 3.0;

/// Writes manifest.json, metadata.csv, recordings/*.csv, and a ready-to-run
/// audit_config.json into out_dir (created if missing).
void generate_synth_dataset(const std::filesystem::path& out_dir, const SynthConfig& cfg);

}  // namespace fogfair
