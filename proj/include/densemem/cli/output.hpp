#pragma once

#include <filesystem>
#include <string>

#include "densemem/cli/config.hpp"

namespace densemem::cli {

// Directory layout: <out>/<experiment>/<K>/...
class OutputTree {
 public:
  OutputTree(std::filesystem::path root, const ExperimentConfig& config);

  const std::filesystem::path& experiment_dir() const noexcept { return dir_; }
  std::filesystem::path k_dir(std::size_t k) const;
  // `config_hash=<hash> seed=<seed>` for CSV header lines.
  std::string provenance() const;

  // Records `path` (relative to the experiment dir) with the hash of its bytes in
  // manifest.json, replacing any previous entry for the same path.
  void record(const std::filesystem::path& path, const std::string& command) const;

 private:
  std::filesystem::path dir_;
  std::string config_hash_;
  std::uint64_t seed_;
  nlohmann::json config_json_;
};

std::string file_hash(const std::filesystem::path& path);

}  // namespace densemem::cli
