#include "fogfair/core.hpp"

namespace fogfair {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingMetadata: return "MissingMetadata";
    case ErrorCode::UnmatchedMetadata: return "UnmatchedMetadata";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::UpsampleRequested: return "UpsampleRequested";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::NoCompatiblePlacement: return "NoCompatiblePlacement";
    case ErrorCode::RecordingTooShort: return "RecordingTooShort";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::BandOutOfRange: return "BandOutOfRange";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::SingleClassTraining: return "SingleClassTraining";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::ShapeIncompatible: return "ShapeIncompatible";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::AllIdenticalValues: return "AllIdenticalValues";
    case ErrorCode::NoEpisodes: return "NoEpisodes";
    case ErrorCode::MissingGroupLabels: return "MissingGroupLabels";
    case ErrorCode::UnknownGroupMember: return "UnknownGroupMember";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::InfeasibleCoverage: return "InfeasibleCoverage";
    case ErrorCode::InvalidMetricForAttribute: return "InvalidMetricForAttribute";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> salts) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t s : salts) h = splitmix64(h ^ splitmix64(s));
  return h;
}

std::uint64_t derive_seed(std::uint64_t base, const std::string& label, std::uint64_t index) {
  return derive_seed(base, {fnv1a_hash(label), index});
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace fogfair
