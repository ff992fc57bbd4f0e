#include "fogfair/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "fogfair/core.hpp"

namespace fogfair {
namespace {

constexpr double kWalkAmplitude = 0.35;
constexpr double kWalkHz = 1.1;
constexpr double kTremorHz = 5.3;     // freeze band (3, 8]
constexpr double kSwayAmplitude = 0.08;
constexpr double kSwayHz = 0.7;       // locomotion band (0, 3]
constexpr double kLateralAmplitude = 0.1;
constexpr double kNoiseSigma = 0.02;
constexpr double kGravity = 1.0;      // DC offset on the longitudinal axis

// Per-subject episode plan: slot counts on the window grid. The multiset is
// identical for every subject so FOG window counts cannot differ by group.
constexpr std::size_t kEpisodeSlots[] = {1, 2, 1, 2, 1, 2, 1, 2, 2, 2};
constexpr std::size_t kNEpisodes = std::size(kEpisodeSlots);

struct EpisodePlan {
  std::size_t slots = 0;
  bool tremulous = true;
};

struct Segment {
  std::size_t start_slot = 0;
  std::size_t n_slots = 0;
  int kind = 0;  // 0 walk, 1 tremulous episode, 2 akinetic episode
};

std::string subject_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "S%02zu", i + 1);
  return buf;
}

void validate(const SynthConfig& cfg, std::size_t n_slots) {
  if (cfg.n_subjects == 0 || cfg.n_subjects % 8 != 0)
    throw Error(ErrorCode::ConfigError, "n_subjects must be a positive multiple of 8");
  if (cfg.sampling_rate_hz < 16.0)
    throw Error(ErrorCode::ConfigError, "sampling_rate_hz must be at least 16");
  if (cfg.bias_ratio < 1.0)
    throw Error(ErrorCode::ConfigError, "bias_ratio must be at least 1");
  if (cfg.phenotype_mix < 0.0 || cfg.phenotype_mix > 1.0)
    throw Error(ErrorCode::ConfigError, "phenotype_mix must lie in [0, 1]");
  std::size_t episode_slots = 0;
  for (std::size_t s : kEpisodeSlots) episode_slots += s;
  if (n_slots < episode_slots + kNEpisodes + 1)
    throw Error(ErrorCode::ConfigError, "seconds_per_subject too short for the episode plan");
}

std::vector<Segment> plan_segments(Rng& rng, std::size_t n_slots, double phenotype_mix) {
  std::vector<EpisodePlan> episodes(kNEpisodes);
  auto n_tremulous = static_cast<std::size_t>(
      std::llround(phenotype_mix * static_cast<double>(kNEpisodes)));
  for (std::size_t i = 0; i < kNEpisodes; ++i) {
    episodes[i].slots = kEpisodeSlots[i];
    episodes[i].tremulous = i < n_tremulous;
  }
  rng.shuffle(episodes);

  std::size_t used = 0;
  for (const EpisodePlan& ep : episodes) used += ep.slots;
  // Gap g0 before the first episode, g1..g_{n-1} between episodes (>= 1 slot
  // so label runs stay separate), g_n after the last.
  std::size_t spare = n_slots - used - (kNEpisodes - 1);
  std::vector<std::size_t> gaps(kNEpisodes + 1, 0);
  for (std::size_t i = 1; i < kNEpisodes; ++i) gaps[i] = 1;
  for (std::size_t i = 0; i <= kNEpisodes; ++i) {
    std::size_t take = rng.next_below(spare / (kNEpisodes + 1 - i) + 1);
    gaps[i] += take;
    spare -= take;
  }
  gaps[kNEpisodes] += spare;

  std::vector<Segment> segments;
  std::size_t slot = 0;
  for (std::size_t i = 0; i < kNEpisodes; ++i) {
    if (gaps[i] > 0) segments.push_back({slot, gaps[i], 0});
    slot += gaps[i];
    segments.push_back({slot, episodes[i].slots, episodes[i].tremulous ? 1 : 2});
    slot += episodes[i].slots;
  }
  if (gaps[kNEpisodes] > 0) segments.push_back({slot, gaps[kNEpisodes], 0});
  return segments;
}

void write_recording(const std::filesystem::path& file, const SynthConfig& cfg,
                     const std::vector<Segment>& segments, bool strong, Rng& rng) {
  const double rate = cfg.sampling_rate_hz;
  const auto slot_len = static_cast<std::size_t>(std::llround(kSynthWindowSeconds * rate));
  constexpr double tau = 2.0 * std::numbers::pi;

  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + file.string());
  out << "time_s,lowerback_x,lowerback_y,lowerback_z,fog_label\n";

  const double lateral_phase = rng.next_double() * tau;
  char line[160];
  for (const Segment& seg : segments) {
    const double phase = rng.next_double() * tau;
    double amp = kWalkAmplitude, hz = kWalkHz;
    if (seg.kind == 1) {
      // The injected bias: strong-group FOG is a distinct tremor at
      // bias_ratio times the walking amplitude, while weak-group FOG mimics
      // walking exactly (same amplitude and frequency), so a distribution
      // detector can only see the strong group's episodes.
      if (strong) {
        amp = kWalkAmplitude * cfg.bias_ratio;
        hz = kTremorHz;
      }
    } else if (seg.kind == 2) {
      amp = kSwayAmplitude;
      hz = kSwayHz;
    }
    const std::size_t start = seg.start_slot * slot_len;
    const std::size_t end = start + seg.n_slots * slot_len;
    const int label = seg.kind == 0 ? 0 : 1;
    for (std::size_t k = start; k < end; ++k) {
      const double t = static_cast<double>(k) / rate;
      const double x = kGravity + amp * std::sin(tau * hz * t + phase) +
                       kNoiseSigma * rng.next_normal();
      const double y = kLateralAmplitude * std::sin(tau * kWalkHz * t + lateral_phase) +
                       kNoiseSigma * rng.next_normal();
      const double z = kNoiseSigma * rng.next_normal();
      std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f,%.6f,%d\n", t, x, y, z, label);
      out << line;
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "short write to " + file.string());
}

}  // namespace

void generate_synth_dataset(const std::filesystem::path& out_dir, const SynthConfig& cfg) {
  const double rate = cfg.sampling_rate_hz;
  const auto slot_len = static_cast<std::size_t>(std::llround(kSynthWindowSeconds * rate));
  const auto n_slots = static_cast<std::size_t>(
      std::floor(cfg.seconds_per_subject / kSynthWindowSeconds + 1e-9));
  validate(cfg, n_slots);
  (void)slot_len;

  std::filesystem::create_directories(out_dir / "recordings");

  std::ofstream meta(out_dir / "metadata.csv");
  if (!meta) throw Error(ErrorCode::IoError, "cannot write metadata.csv");
  meta << "subject_id,sex,age_years,disease_duration_years\n";

  for (std::size_t i = 0; i < cfg.n_subjects; ++i) {
    // Balanced cells: bit0 sex (1 = male, the amplified group), bit1 age
    // band, bit2 duration band. Within-band jitter keeps values realistic
    // without moving anyone across the median split.
    const std::size_t cell = i % 8;
    const bool male = (cell & 1) != 0;
    const bool old_age = (cell & 2) != 0;
    const bool long_duration = (cell & 4) != 0;
    const int age = (old_age ? 70 : 55) + static_cast<int>(i % 7);
    const int duration = (long_duration ? 12 : 3) + static_cast<int>(i % 5);

    const std::string sid = subject_name(i);
    meta << sid << ',' << (male ? 'M' : 'F') << ',' << age << ',' << duration << '\n';

    Rng rng(derive_seed(cfg.seed, "synth-subject", i));
    std::vector<Segment> segments = plan_segments(rng, n_slots, cfg.phenotype_mix);
    write_recording(out_dir / "recordings" / (sid + "__walk.csv"), cfg, segments, male, rng);
  }
  if (!meta) throw Error(ErrorCode::IoError, "short write to metadata.csv");
  meta.close();

  nlohmann::json manifest;
  manifest["dataset_id"] = "synth";
  manifest["sampling_rate_hz"] = rate;
  manifest["sensor_locations"] = {"lowerback"};
  manifest["recordings_glob"] = "recordings/*.csv";
  manifest["metadata_file"] = "metadata.csv";
  std::ofstream mf(out_dir / "manifest.json");
  mf << manifest.dump(2) << '\n';
  if (!mf) throw Error(ErrorCode::IoError, "cannot write manifest.json");

  nlohmann::json audit;
  audit["dataset_dir"] = ".";
  audit["model"] = "forest";
  audit["window_seconds"] = kSynthWindowSeconds;
  audit["k_folds"] = 3;
  audit["n_iterations"] = 10;
  audit["master_seed"] = cfg.seed;
  audit["attributes"] = {"sex", "age", "disease_duration", "fog_phenotype"};
  std::ofstream af(out_dir / "audit_config.json");
  af << audit.dump(2) << '\n';
  if (!af) throw Error(ErrorCode::IoError, "cannot write audit_config.json");
}

}  // namespace fogfair
