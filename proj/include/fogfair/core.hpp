#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace fogfair {

inline constexpr char kToolVersion[] = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

enum class ErrorCode {
  MissingMetadata,
  UnmatchedMetadata,
  MalformedRow,
  NonMonotonicTimestamps,
  UpsampleRequested,
  ChannelMismatch,
  NoCompatiblePlacement,
  RecordingTooShort,
  SignalTooShort,
  BandOutOfRange,
  WindowTooShort,
  SingleClassTraining,
  DivergedLoss,
  ShapeIncompatible,
  DimensionMismatch,
  EmptyGroup,
  AllIdenticalValues,
  NoEpisodes,
  MissingGroupLabels,
  UnknownGroupMember,
  LengthMismatch,
  TooFewSamples,
  InfeasibleCoverage,
  InvalidMetricForAttribute,
  ConfigError,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Dense row-major matrix of doubles. Rows are time steps, columns channels.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

/// Deterministic xorshift* RNG with explicit output mappings so streams do
/// not depend on standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {
    // splitmix warm-up decorrelates small seeds
    for (int i = 0; i < 4; ++i) next_u64();
  }

  std::uint64_t next_u64() {
    // xorshift* keeps the stream portable and cheap
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dULL;
  }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * bound) >> 64);
  }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller, one spare cached.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    if (u1 < 1e-300) u1 = 1e-300;
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Deterministically derives a child seed from a base seed and salts.
/// Folds, iterations and models each get their own stream.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> salts);

/// Labeled variant: the label is hashed so distinct purposes (init, shuffle,
/// per-tree bootstraps) never share a stream.
std::uint64_t derive_seed(std::uint64_t base, const std::string& label, std::uint64_t index = 0);

/// FNV-1a over a byte string; stable across runs and platforms.
std::uint64_t fnv1a_hash(const std::string& bytes);

}  // namespace fogfair
