#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "densemem/cli/commands.hpp"
#include "densemem/cli/config.hpp"
#include "densemem/error.hpp"

namespace {

using Command = std::function<void(const densemem::cli::ExperimentConfig&, const std::filesystem::path&)>;

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const densemem::ConfigError*>(&e)) return "config";
  if (dynamic_cast<const densemem::ParseError*>(&e)) return "parse";
  if (dynamic_cast<const densemem::IoError*>(&e)) return "io";
  if (dynamic_cast<const densemem::InvalidArgument*>(&e)) return "invalid_argument";
  if (dynamic_cast<const densemem::StiffnessError*>(&e)) return "stiffness";
  if (dynamic_cast<const densemem::IntegrationError*>(&e)) return "integration";
  return "error";
}

int report(const std::string& command, const std::string& kind, const std::string& message) {
  nlohmann::json line{{"error", kind}, {"command", command}, {"message", message}};
  std::cerr << line.dump() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dense associative memory view of diffusion models: experiment runner"};
  app.require_subcommand(1);

  const std::map<std::string, std::pair<std::string, Command>> commands{
      {"gen-data", {"write nested training subsets for every K", densemem::cli::cmd_gen_data}},
      {"sweep", {"generate, classify and tabulate synthetic samples per K", densemem::cli::cmd_sweep}},
      {"basin", {"critical-time basin sizes per sample group", densemem::cli::cmd_basin}},
      {"energy-gap", {"relative energies against training references", densemem::cli::cmd_energy_gap}},
      {"field", {"energy landscape on a 2D grid", densemem::cli::cmd_field}},
      {"likelihood", {"probability-flow log-likelihoods", densemem::cli::cmd_likelihood}},
  };

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output root directory")->required();
    sub->add_option("--seed", seed, "override the config master seed");
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("", "usage", e.what());
  }

  std::string chosen;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) chosen = name;
  }
  try {
    auto config = densemem::cli::load_config(config_path);
    if (seed) config.seed = *seed;
    commands.at(chosen).second(config, out_dir);
  } catch (const std::exception& e) {
    return report(chosen, error_kind(e), e.what());
  }
  return 0;
}
