#pragma once

#include <filesystem>

#include "fogfair/forest.hpp"
#include "fogfair/mitigation.hpp"
#include "fogfair/neural.hpp"

namespace fogfair {

/// Versioned JSON model files. Doubles are written in shortest round-trip
/// form, so a reloaded model reproduces predictions bitwise.
void save_forest(const ForestModel& model, const std::filesystem::path& path);
ForestModel load_forest(const std::filesystem::path& path);

void save_neural(const NeuralModel& model, const std::filesystem::path& path);
NeuralModel load_neural(const std::filesystem::path& path);

/// Threshold policies ride along with model artifacts so a frozen policy can
/// be re-applied in later audits.
void save_threshold_policy(const ThresholdPolicy& policy, const std::filesystem::path& path);
ThresholdPolicy load_threshold_policy(const std::filesystem::path& path);

}  // namespace fogfair
