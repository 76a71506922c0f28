#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "densemem/cli/commands.hpp"
#include "densemem/cli/config.hpp"
#include "densemem/cli/output.hpp"
#include "densemem/error.hpp"
#include "densemem/patterns.hpp"

using namespace densemem;
using namespace densemem::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "densemem_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Relative path -> bytes for every regular file below root.
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  }
  return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

json small_config() {
  return json::parse(R"({
    "name": "small", "seed": 11,
    "dataset": {"kind": "circle", "full_size": 200},
    "k_list": [2, 5, 20],
    "schedule": {"ve": {"sigma": 0.25, "steps": 300}},
    "basin": {"m_trials": 4, "per_type_cap": 3},
    "energy_gap": {"intervals": 9, "per_type_cap": 8},
    "field": {"beta": 20, "grid": {"nx": 31, "ny": 31}},
    "likelihood": {"max_points": 3}
  })");
}

}  // namespace

TEST_CASE("config defaults, canonical form and hash") {
  const auto c = parse_config(json{{"k_list", {2, 9}}});
  CHECK(c.synthetic_multiplier == 4);
  CHECK(c.thresholds.delta_m == 0.05);
  CHECK(c.basin.critical.m_trials == 20);
  CHECK(c.basin.critical.stride == 10);
  CHECK(c.basin.critical.ddim_steps == 10);
  CHECK(c.basin.critical.delta_p == 0.8);
  CHECK(c.energy_gap.intervals == 19);
  CHECK(c.dataset.split_seed == 3407);
  // Round trip through the canonical JSON preserves the hash.
  CHECK(parse_config(c.to_json()).hash() == c.hash());
  auto j = c.to_json();
  j["seed"] = 1;
  CHECK(parse_config(j).hash() != c.hash());
  CHECK(c.hash().size() == 16);

  json inf = small_config();
  inf["thresholds"]["delta_d"] = "inf";
  const auto ci = parse_config(inf);
  CHECK(std::isinf(ci.basin.critical.delta_d));
  CHECK(parse_config(ci.to_json()).hash() == ci.hash());
}

TEST_CASE("config errors name the offending field") {
  auto expect = [](json j, const std::string& field) {
    try {
      parse_config(j);
      FAIL("expected ConfigError for " << field);
    } catch (const ConfigError& e) {
      CHECK_MESSAGE(std::string(e.what()).rfind(field, 0) == 0, e.what());
    }
  };
  auto base = small_config();
  auto j = base;
  j["k_list"] = {9, 2};
  expect(j, "k_list");
  j = base;
  j["k_list"] = {2, 500};
  expect(j, "k_list");
  j = base;
  j["schedule"]["ve"]["sigma"] = -1;
  expect(j, "schedule.ve");
  j = base;
  j["thresholds"]["delta_p"] = 0;
  expect(j, "thresholds.delta_p");
  j = base;
  j["thresholds"]["delta_m"] = "big";
  expect(j, "thresholds.delta_m");
  j = base;
  j["basin"]["m_trials"] = -3;
  expect(j, "basin.m_trials");
  j = base;
  j["likelihood"]["prior"] = "flat";
  expect(j, "likelihood.prior");
  j = base;
  j["field"]["t"] = 0.1;
  expect(j, "field");
  j = base;
  j["energy_gap"]["reference_indices"] = {2};
  expect(j, "energy_gap.reference_indices[0]");
  j = base;
  j["basin"]["groups"] = {"training", "weird"};
  expect(j, "basin.groups");
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("gen-data writes nested prefixes and is idempotent") {
  const auto out = fresh_dir("gen");
  auto j = small_config();
  j["k_list"] = {2, 9, 200};
  const auto cfg = parse_config(j);
  cmd_gen_data(cfg, out);
  const auto root = out / "small";
  const auto p2 = load_patterns(root / "2" / "patterns.csv");
  const auto p9 = load_patterns(root / "9" / "patterns.csv");
  const auto p200 = load_patterns(root / "200" / "patterns.csv");
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::equal(p2.row(i).begin(), p2.row(i).end(), p9.row(i).begin()));
  for (std::size_t i = 0; i < 9; ++i) CHECK(std::equal(p9.row(i).begin(), p9.row(i).end(), p200.row(i).begin()));
  const auto before = snapshot(root);
  cmd_gen_data(cfg, out);
  CHECK(snapshot(root) == before);
  CHECK(slurp(root / "2" / "patterns.csv").find("config_hash=" + cfg.hash()) != std::string::npos);
  const auto manifest = json::parse(slurp(root / "manifest.json"));
  CHECK(manifest["config_hash"] == cfg.hash());
  CHECK(manifest["products"]["9/patterns.csv"]["hash"] == file_hash(root / "9" / "patterns.csv"));
}

TEST_CASE("invalid K order fails before anything is written") {
  const auto out = fresh_dir("badk");
  auto cfg = parse_config(small_config());
  cfg.k_list = {9, 2};
  CHECK_THROWS_AS(cmd_gen_data(cfg, out), ConfigError);
  CHECK_FALSE(fs::exists(out / "small"));
}

TEST_CASE("sweep tabulates fractions and resumes to an identical tree") {
  const auto cfg = parse_config(small_config());
  const auto a = fresh_dir("sweep_a");
  cmd_gen_data(cfg, a);
  const auto inputs = slurp(a / "small" / "5" / "patterns.csv");
  cmd_sweep(cfg, a);
  CHECK(slurp(a / "small" / "5" / "patterns.csv") == inputs);

  const auto rows = read_csv(a / "small" / "fractions.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"K", "f_mem", "f_spur", "f_gen"});
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double sum = std::stod(rows[r][1]) + std::stod(rows[r][2]) + std::stod(rows[r][3]);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  CHECK(rows[1][0] == "2");
  CHECK(std::stod(rows[1][1]) >= 0.99);  // two patterns at low temperature are memorized
  const auto cls = read_csv(a / "small" / "20" / "classification.csv");
  CHECK(cls.size() == 81);
  CHECK(cls[0] == std::vector<std::string>{"index", "label", "d_train", "d_synth"});

  // Interrupt: drop the last K's marker and products, and leave a stale partial file.
  const auto b = fresh_dir("sweep_b");
  fs::copy(a, b, fs::copy_options::recursive);
  fs::remove(b / "small" / "20" / "DONE");
  fs::remove(b / "small" / "20" / "classification.csv");
  fs::remove(b / "small" / "fractions.csv");
  std::ofstream(b / "small" / "20" / "samples.csv") << "# truncated\n0.1,";
  cmd_sweep(cfg, b);
  CHECK(snapshot(b / "small") == snapshot(a / "small"));

  // A completed K is skipped: its files are not rewritten.
  const auto stamp = fs::last_write_time(a / "small" / "2" / "samples.csv");
  cmd_sweep(cfg, a);
  CHECK(fs::last_write_time(a / "small" / "2" / "samples.csv") == stamp);
}

TEST_CASE("sweep without patterns reports the missing input") {
  const auto out = fresh_dir("sweep_missing");
  CHECK_THROWS_AS(cmd_sweep(parse_config(small_config()), out), IoError);
}

TEST_CASE("energy gap of the training set against itself is zero") {
  const auto out = fresh_dir("gap");
  const auto cfg = parse_config(small_config());
  cmd_gen_data(cfg, out);
  cmd_sweep(cfg, out);
  cmd_energy_gap(cfg, out);
  const auto rows = read_csv(out / "small" / "energy_gaps.csv");
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"K", "reference_id", "group", "count", "gap", "target_std"});
  std::size_t training_rows = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r][2] != "training") continue;
    ++training_rows;
    CHECK(std::stod(rows[r][4]) == 0.0);
  }
  CHECK(training_rows == 3);
  const auto detail = read_csv(out / "small" / "5" / "energy.csv");
  CHECK(detail[0] == std::vector<std::string>{"target_index", "label", "u_rel", "reference_id"});
  // Row 1 is the reference itself; its value is zero only up to quadrature error.
  CHECK(detail[1][0] == "0");
  CHECK(detail[1][1] == "training");
}

TEST_CASE("basin with infinite recovery distance ends every trial at T - s - 1") {
  const auto out = fresh_dir("basin");
  auto j = small_config();
  j["thresholds"]["delta_d"] = "inf";
  j["basin"]["groups"] = {"training"};
  const auto cfg = parse_config(j);
  cmd_gen_data(cfg, out);
  cmd_basin(cfg, out);  // training-only runs need no sweep
  for (std::size_t k : cfg.k_list) {
    const auto rows = read_csv(out / "small" / std::to_string(k) / "basin.csv");
    CHECK(rows[0] == std::vector<std::string>{"group", "sample_index", "trial", "t_c", "radius", "log_volume"});
    CHECK(rows.size() == 1 + std::min<std::size_t>(k, 3) * 4);
    for (std::size_t r = 1; r < rows.size(); ++r) CHECK(rows[r][3] == "989");
  }
  const auto summary = read_csv(out / "small" / "basin_summary.csv");
  CHECK(summary.size() == 4);
  CHECK(std::stod(summary[1][8]) == 989.0);
}

TEST_CASE("field at beta = 20 has its ridge on the unit circle") {
  const auto out = fresh_dir("field");
  json j = small_config();
  j["dataset"]["full_size"] = 1000;
  j["k_list"] = {1000};
  j["field"]["grid"] = {{"nx", 301}, {"ny", 301}};
  const auto cfg = parse_config(j);
  cmd_gen_data(cfg, out);
  cmd_field(cfg, out);
  const auto path = out / "small" / "1000" / "field.csv";
  CHECK(slurp(path).find("beta=20") != std::string::npos);
  const auto rows = read_csv(path);
  REQUIRE(rows.size() == 1 + 301 * 301);
  // Argmin over each of 24 angular sectors.
  std::vector<double> best(24, INFINITY), best_r(24, 0.0);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double x = std::stod(rows[r][0]), y = std::stod(rows[r][1]), v = std::stod(rows[r][2]);
    const double radius = std::hypot(x, y);
    if (radius < 0.2 || radius > 1.45) continue;
    const auto sector = static_cast<std::size_t>((std::atan2(y, x) + M_PI) / (2 * M_PI) * 24) % 24;
    if (v < best[sector]) best[sector] = v, best_r[sector] = radius;
  }
  for (double r : best_r) CHECK(std::abs(r - 1.0) <= 0.02);
}

TEST_CASE("likelihood command writes one value per point") {
  const auto out = fresh_dir("lik");
  const auto cfg = parse_config(small_config());
  cmd_gen_data(cfg, out);
  cmd_likelihood(cfg, out);
  const auto rows = read_csv(out / "small" / "20" / "likelihood.csv");
  REQUIRE(rows.size() == 4);
  for (std::size_t r = 1; r < rows.size(); ++r) CHECK(std::isfinite(std::stod(rows[r][1])));
  CHECK(slurp(out / "small" / "20" / "likelihood.csv").rfind("# config_hash=" + cfg.hash() + " seed=11", 0) == 0);
}

TEST_CASE("command-line tool: exit codes, error lines and seed override") {
  const auto dir = fresh_dir("tool");
  const auto cfg_path = dir / "config.json";
  std::ofstream(cfg_path) << small_config().dump();
  const std::string tool = DENSEMEM_TOOL_PATH;
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + tool + "\" " + args + " 2> \"" + (dir / "stderr.txt").string() + "\"";
    return std::system(cmd.c_str());
  };
  CHECK(run("gen-data --config " + cfg_path.string() + " --out " + (dir / "out").string() + " --seed 5") == 0);
  const auto header = slurp(dir / "out" / "small" / "2" / "patterns.csv");
  CHECK(header.find("seed=5") != std::string::npos);

  CHECK(run("sweep --config " + (dir / "missing.json").string() + " --out " + (dir / "out").string()) != 0);
  auto line = slurp(dir / "stderr.txt");
  const auto err = json::parse(line.substr(0, line.find('\n')));
  CHECK(err["error"] == "config");
  CHECK(err["command"] == "sweep");

  CHECK(run("basin --config " + cfg_path.string() + " --out " + (dir / "empty").string()) != 0);
  line = slurp(dir / "stderr.txt");
  CHECK(json::parse(line.substr(0, line.find('\n')))["error"] == "io");

  CHECK(run("frobnicate --config x --out y") != 0);
  CHECK(run("") != 0);
}
