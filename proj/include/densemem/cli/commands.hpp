#pragma once

#include <filesystem>

#include "densemem/cli/config.hpp"

namespace densemem::cli {

// Each command reads inputs under `out` produced by earlier commands and writes its
// products plus manifest entries. None of them modify existing input files.
void cmd_gen_data(const ExperimentConfig& config, const std::filesystem::path& out);
void cmd_sweep(const ExperimentConfig& config, const std::filesystem::path& out);
void cmd_basin(const ExperimentConfig& config, const std::filesystem::path& out);
void cmd_energy_gap(const ExperimentConfig& config, const std::filesystem::path& out);
void cmd_field(const ExperimentConfig& config, const std::filesystem::path& out);
void cmd_likelihood(const ExperimentConfig& config, const std::filesystem::path& out);

}  // namespace densemem::cli
