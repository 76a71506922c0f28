#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "densemem/basin.hpp"
#include "densemem/detection.hpp"
#include "densemem/likelihood.hpp"
#include "densemem/schedule.hpp"

namespace densemem::cli {

struct DatasetConfig {
  std::string kind = "circle";  // "circle" or "file"
  std::size_t full_size = 60000;
  std::filesystem::path path;   // kind == "file"
  std::uint64_t split_seed = 3407;
};

struct BasinCommandConfig {
  CriticalTimeConfig critical;
  std::size_t per_type_cap = 512;
  std::vector<std::string> groups{"training", "memorized", "spurious", "generalized"};
};

struct EnergyGapConfig {
  std::size_t intervals = 19;
  std::vector<std::size_t> reference_indices{0};
  std::size_t per_type_cap = 2048;
};

struct FieldConfig {
  std::optional<double> t;     // diffusion time; mutually exclusive with beta
  std::optional<double> beta;  // inverse temperature, t = 1 / (2 sigma^2 beta)
  GridSpec grid;
};

struct LikelihoodConfig {
  std::string source = "training";  // "training" or "synthetic"
  std::size_t max_points = 256;
  RkConfig rk;
  LikelihoodPrior prior = LikelihoodPrior::kExactMarginal;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 0;
  DatasetConfig dataset;
  std::vector<std::size_t> k_list;
  VESchedule ve;
  double vp_beta_min = 1e-4;
  double vp_beta_max = 2e-2;
  std::size_t vp_T = 1000;
  std::size_t synthetic_multiplier = 4;
  Thresholds thresholds{0.05, 0.02};
  BasinCommandConfig basin;
  EnergyGapConfig energy_gap;
  FieldConfig field;
  LikelihoodConfig likelihood;

  VPSchedule vp_schedule() const { return VPSchedule(vp_beta_min, vp_beta_max, vp_T); }
  double field_time() const;

  // Throws ConfigError naming the offending field.
  void validate() const;
  // Canonical JSON of every effective value (defaults filled in).
  nlohmann::json to_json() const;
  // 16 hex digits of the FNV-1a hash of to_json().dump().
  std::string hash() const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string fnv1a_hex(std::string_view bytes);

}  // namespace densemem::cli
