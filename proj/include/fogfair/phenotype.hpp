#pragma once

#include <vector>

#include "fogfair/windowing.hpp"

namespace fogfair {

enum class PhenotypeLabel { Tremulous, Akinetic };

const char* phenotype_label_name(PhenotypeLabel label);

struct BandPowerPair {
  double freeze_band_power = 0.0;      // (3, 8] Hz
  double locomotion_band_power = 0.0;  // (0, 3] Hz
};

// Hann-windowed periodogram power summed over bins f with band_lo < f <= band_hi.
// The signal mean is removed first, so the DC bin never contributes.
double band_power(const std::vector<double>& signal, double sampling_rate_hz, double band_lo_hz,
                  double band_hi_hz);

BandPowerPair episode_band_powers(const Episode& ep, double sampling_rate_hz);

// Tremulous iff freeze-band power exceeds locomotion-band power on the
// acceleration magnitude of the primary sensor (lower back when present,
// else the first lower-extremity placement). Episodes shorter than 1 s are
// zero-padded to 1 s before the spectral comparison.
PhenotypeLabel classify_episode(const Episode& ep, double sampling_rate_hz);

}  // namespace fogfair
