#include "densemem/cli/output.hpp"

#include <fstream>
#include <sstream>

#include "densemem/error.hpp"

namespace densemem::cli {

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a_hex(buf.str());
}

OutputTree::OutputTree(std::filesystem::path root, const ExperimentConfig& config)
    : dir_(std::move(root) / config.name),
      config_hash_(config.hash()),
      seed_(config.seed),
      config_json_(config.to_json()) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path OutputTree::k_dir(std::size_t k) const { return dir_ / std::to_string(k); }

std::string OutputTree::provenance() const {
  return "config_hash=" + config_hash_ + " seed=" + std::to_string(seed_);
}

void OutputTree::record(const std::filesystem::path& path, const std::string& command) const {
  const auto manifest_path = dir_ / "manifest.json";
  nlohmann::json manifest;
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    try {
      in >> manifest;
    } catch (const nlohmann::json::exception&) {
      manifest = nlohmann::json::object();
    }
  }
  manifest["config_hash"] = config_hash_;
  manifest["seed"] = seed_;
  manifest["config"] = config_json_;
  const auto relative = std::filesystem::relative(path, dir_).generic_string();
  manifest["products"][relative] = {{"hash", file_hash(path)}, {"command", command}};
  const auto tmp = manifest_path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp + "'");
    out << manifest.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, manifest_path);
}

}  // namespace densemem::cli
