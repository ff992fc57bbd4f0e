#include "fogfair/phenotype.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace fogfair {

const char* phenotype_label_name(PhenotypeLabel label) {
  return label == PhenotypeLabel::Tremulous ? "tremulous" : "akinetic";
}

namespace {

// In-place iterative radix-2 FFT; n must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

double band_power(const std::vector<double>& signal, double sampling_rate_hz, double band_lo_hz,
                  double band_hi_hz) {
  if (sampling_rate_hz <= 0.0) throw Error(ErrorCode::ConfigError, "sampling rate must be positive");
  const std::size_t n = signal.size();
  if (static_cast<double>(n) < sampling_rate_hz)
    throw Error(ErrorCode::SignalTooShort,
                "band_power needs at least 1 s of samples, got " + std::to_string(n));
  const double nyquist = sampling_rate_hz / 2.0;
  if (band_lo_hz < 0.0 || band_hi_hz > nyquist || band_lo_hz >= band_hi_hz)
    throw Error(ErrorCode::BandOutOfRange, "band must satisfy 0 <= lo < hi <= Nyquist");

  double mean = 0.0;
  for (double v : signal) mean += v;
  mean /= static_cast<double>(n);

  const std::size_t n_fft = next_pow2(n);
  std::vector<std::complex<double>> buf(n_fft, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    double hann =
        0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                              static_cast<double>(n - 1 > 0 ? n - 1 : 1)));
    buf[i] = {(signal[i] - mean) * hann, 0.0};
  }
  fft_pow2(buf);

  const double bin_hz = sampling_rate_hz / static_cast<double>(n_fft);
  double power = 0.0;
  for (std::size_t k = 0; k <= n_fft / 2; ++k) {
    double f = static_cast<double>(k) * bin_hz;
    if (f > band_lo_hz && f <= band_hi_hz) power += std::norm(buf[k]);
  }
  return power;
}

namespace {

// Primary sensor: lower back when present, else the first lower-extremity
// placement in channel order. Returns indices of its tri-axial channels.
std::vector<std::size_t> primary_sensor_channels(const std::vector<ChannelDescriptor>& channels) {
  bool has_lower_back = false;
  for (const auto& ch : channels)
    if (ch.body_location == BodyLocation::LowerBack) has_lower_back = true;
  BodyLocation target = BodyLocation::LowerBack;
  if (!has_lower_back) {
    bool found = false;
    for (const auto& ch : channels)
      if (ch.body_location != BodyLocation::LowerBack) {
        target = ch.body_location;
        found = true;
        break;
      }
    if (!found) throw Error(ErrorCode::ChannelMismatch, "episode has no usable sensor channels");
  }
  std::vector<std::size_t> idx;
  for (std::size_t c = 0; c < channels.size(); ++c)
    if (channels[c].body_location == target) idx.push_back(c);
  return idx;
}

std::vector<double> magnitude_signal(const Episode& ep) {
  auto idx = primary_sensor_channels(ep.channels);
  std::vector<double> mag(ep.data.rows());
  for (std::size_t i = 0; i < ep.data.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t c : idx) acc += ep.data(i, c) * ep.data(i, c);
    mag[i] = std::sqrt(acc);
  }
  return mag;
}

}  // namespace

BandPowerPair episode_band_powers(const Episode& ep, double sampling_rate_hz) {
  std::vector<double> mag = magnitude_signal(ep);
  const auto one_second = static_cast<std::size_t>(std::ceil(sampling_rate_hz - 1e-9));
  if (mag.size() < one_second) mag.resize(one_second, 0.0);
  BandPowerPair bp;
  bp.locomotion_band_power = band_power(mag, sampling_rate_hz, 0.0, 3.0);
  bp.freeze_band_power = band_power(mag, sampling_rate_hz, 3.0, std::min(8.0, sampling_rate_hz / 2.0));
  return bp;
}

PhenotypeLabel classify_episode(const Episode& ep, double sampling_rate_hz) {
  BandPowerPair bp = episode_band_powers(ep, sampling_rate_hz);
  return bp.freeze_band_power > bp.locomotion_band_power ? PhenotypeLabel::Tremulous
                                                         : PhenotypeLabel::Akinetic;
}

}  // namespace fogfair
