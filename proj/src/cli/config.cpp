#include "densemem/cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "densemem/error.hpp"

namespace densemem::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ConfigError(field + ": " + message);
}

template <typename T>
T read(const json& obj, const std::string& key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  const std::string field = path.empty() ? key : path + "." + key;
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) {
        return std::numeric_limits<double>::infinity();
      }
      if (!v.is_number()) fail(field, "expected a number");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(field, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) fail(field, "must be >= 0");
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(field, "expected a string");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    fail(field, e.what());
  }
}

std::vector<std::size_t> read_size_list(const json& obj, const std::string& key, const std::string& path,
                                        std::vector<std::size_t> fallback) {
  if (!obj.contains(key)) return fallback;
  const std::string field = path.empty() ? key : path + "." + key;
  const auto& v = obj.at(key);
  if (!v.is_array()) fail(field, "expected an array of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer() || v[i].get<long long>() < 0) {
      fail(field + "[" + std::to_string(i) + "]", "expected a nonnegative integer");
    }
    out.push_back(v[i].get<std::size_t>());
  }
  return out;
}

const json& section(const json& doc, const std::string& key) {
  static const json empty = json::object();
  if (!doc.contains(key)) return empty;
  if (!doc.at(key).is_object()) fail(key, "expected an object");
  return doc.at(key);
}

json double_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double ExperimentConfig::field_time() const {
  if (field.t) return *field.t;
  if (field.beta) return 1.0 / (2.0 * ve.sigma * ve.sigma * *field.beta);
  return 0.15;
}

void ExperimentConfig::validate() const {
  if (name.empty() || name.find('/') != std::string::npos) fail("name", "must be a nonempty path component");
  if (dataset.kind != "circle" && dataset.kind != "file") fail("dataset.kind", "must be \"circle\" or \"file\"");
  if (dataset.kind == "circle" && dataset.full_size < 1) fail("dataset.full_size", "must be >= 1");
  if (dataset.kind == "file" && dataset.path.empty()) fail("dataset.path", "required when kind is \"file\"");
  if (k_list.empty()) fail("k_list", "must list at least one training size");
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    if (k_list[i] < 1) fail("k_list[" + std::to_string(i) + "]", "must be >= 1");
    if (i > 0 && k_list[i] <= k_list[i - 1]) fail("k_list", "must be strictly ascending");
  }
  if (dataset.kind == "circle" && k_list.back() > dataset.full_size) {
    fail("k_list", "largest K exceeds dataset.full_size");
  }
  try {
    ve.validate();
  } catch (const InvalidArgument& e) {
    fail("schedule.ve", e.what());
  }
  try {
    (void)vp_schedule();
  } catch (const InvalidArgument& e) {
    fail("schedule.vp", e.what());
  }
  if (synthetic_multiplier < 1) fail("synthetic_multiplier", "must be >= 1");
  if (!(thresholds.delta_m >= 0.0) || !std::isfinite(thresholds.delta_m)) fail("thresholds.delta_m", "must be finite and >= 0");
  if (!(thresholds.delta_s >= 0.0) || !std::isfinite(thresholds.delta_s)) fail("thresholds.delta_s", "must be finite and >= 0");
  if (!(basin.critical.delta_d >= 0.0)) fail("thresholds.delta_d", "must be >= 0");
  if (!(basin.critical.delta_p > 0.0 && basin.critical.delta_p <= 1.0)) fail("thresholds.delta_p", "must lie in (0, 1]");
  if (basin.critical.m_trials < 1) fail("basin.m_trials", "must be >= 1");
  if (basin.critical.stride < 1) fail("basin.stride", "must be >= 1");
  if (basin.critical.ddim_steps < 1) fail("basin.ddim_steps", "must be >= 1");
  if (vp_T < basin.critical.stride + 2) fail("basin.stride", "too large for schedule.vp.T");
  if (basin.per_type_cap < 1) fail("basin.per_type_cap", "must be >= 1");
  for (const auto& g : basin.groups) {
    if (g != "training" && g != "memorized" && g != "spurious" && g != "generalized") {
      fail("basin.groups", "unknown group \"" + g + "\"");
    }
  }
  if (energy_gap.intervals < 1) fail("energy_gap.intervals", "must be >= 1");
  if (energy_gap.reference_indices.empty()) fail("energy_gap.reference_indices", "must not be empty");
  for (std::size_t i = 0; i < energy_gap.reference_indices.size(); ++i) {
    if (energy_gap.reference_indices[i] >= k_list.front()) {
      fail("energy_gap.reference_indices[" + std::to_string(i) + "]", "must be < smallest K");
    }
  }
  if (energy_gap.per_type_cap < 1) fail("energy_gap.per_type_cap", "must be >= 1");
  if (field.t && field.beta) fail("field", "set either t or beta, not both");
  if (field.t && !(*field.t > 0.0)) fail("field.t", "must be > 0");
  if (field.beta && !(*field.beta > 0.0)) fail("field.beta", "must be > 0");
  try {
    field.grid.validate();
  } catch (const InvalidArgument& e) {
    fail("field.grid", e.what());
  }
  if (likelihood.source != "training" && likelihood.source != "synthetic") {
    fail("likelihood.source", "must be \"training\" or \"synthetic\"");
  }
  if (likelihood.max_points < 1) fail("likelihood.max_points", "must be >= 1");
  if (!(likelihood.rk.abs_tol > 0.0)) fail("likelihood.abs_tol", "must be > 0");
  if (!(likelihood.rk.rel_tol > 0.0)) fail("likelihood.rel_tol", "must be > 0");
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) fail("<root>", "config must be a JSON object");
  ExperimentConfig c;
  c.name = read<std::string>(doc, "name", "", c.name);
  c.seed = read<std::uint64_t>(doc, "seed", "", c.seed);
  c.k_list = read_size_list(doc, "k_list", "", {});
  c.synthetic_multiplier = read<std::size_t>(doc, "synthetic_multiplier", "", c.synthetic_multiplier);

  const auto& ds = section(doc, "dataset");
  c.dataset.kind = read<std::string>(ds, "kind", "dataset", c.dataset.kind);
  c.dataset.full_size = read<std::size_t>(ds, "full_size", "dataset", c.dataset.full_size);
  c.dataset.path = read<std::string>(ds, "path", "dataset", "");
  c.dataset.split_seed = read<std::uint64_t>(ds, "split_seed", "dataset", c.dataset.split_seed);

  const auto& sched = section(doc, "schedule");
  const auto& ve = section(sched, "ve");
  c.ve.sigma = read<double>(ve, "sigma", "schedule.ve", c.ve.sigma);
  c.ve.t_min = read<double>(ve, "t_min", "schedule.ve", c.ve.t_min);
  c.ve.t_max = read<double>(ve, "t_max", "schedule.ve", c.ve.t_max);
  c.ve.steps = read<std::size_t>(ve, "steps", "schedule.ve", c.ve.steps);
  const auto& vp = section(sched, "vp");
  c.vp_beta_min = read<double>(vp, "beta_min", "schedule.vp", c.vp_beta_min);
  c.vp_beta_max = read<double>(vp, "beta_max", "schedule.vp", c.vp_beta_max);
  c.vp_T = read<std::size_t>(vp, "T", "schedule.vp", c.vp_T);

  const auto& th = section(doc, "thresholds");
  c.thresholds.delta_m = read<double>(th, "delta_m", "thresholds", c.thresholds.delta_m);
  c.thresholds.delta_s = read<double>(th, "delta_s", "thresholds", c.thresholds.delta_s);
  c.basin.critical.delta_d = read<double>(th, "delta_d", "thresholds", c.basin.critical.delta_d);
  c.basin.critical.delta_p = read<double>(th, "delta_p", "thresholds", c.basin.critical.delta_p);

  const auto& b = section(doc, "basin");
  c.basin.critical.m_trials = read<std::size_t>(b, "m_trials", "basin", c.basin.critical.m_trials);
  c.basin.critical.stride = read<std::size_t>(b, "stride", "basin", c.basin.critical.stride);
  c.basin.critical.ddim_steps = read<std::size_t>(b, "ddim_steps", "basin", c.basin.critical.ddim_steps);
  c.basin.per_type_cap = read<std::size_t>(b, "per_type_cap", "basin", c.basin.per_type_cap);
  if (b.contains("groups")) {
    if (!b.at("groups").is_array()) fail("basin.groups", "expected an array of strings");
    c.basin.groups.clear();
    for (const auto& g : b.at("groups")) {
      if (!g.is_string()) fail("basin.groups", "expected an array of strings");
      c.basin.groups.push_back(g.get<std::string>());
    }
  }

  const auto& eg = section(doc, "energy_gap");
  c.energy_gap.intervals = read<std::size_t>(eg, "intervals", "energy_gap", c.energy_gap.intervals);
  c.energy_gap.reference_indices =
      read_size_list(eg, "reference_indices", "energy_gap", c.energy_gap.reference_indices);
  c.energy_gap.per_type_cap = read<std::size_t>(eg, "per_type_cap", "energy_gap", c.energy_gap.per_type_cap);

  const auto& f = section(doc, "field");
  if (f.contains("t")) c.field.t = read<double>(f, "t", "field", 0.0);
  if (f.contains("beta")) c.field.beta = read<double>(f, "beta", "field", 0.0);
  const auto& g = section(f, "grid");
  c.field.grid.x_min = read<double>(g, "x_min", "field.grid", c.field.grid.x_min);
  c.field.grid.x_max = read<double>(g, "x_max", "field.grid", c.field.grid.x_max);
  c.field.grid.nx = read<std::size_t>(g, "nx", "field.grid", c.field.grid.nx);
  c.field.grid.y_min = read<double>(g, "y_min", "field.grid", c.field.grid.y_min);
  c.field.grid.y_max = read<double>(g, "y_max", "field.grid", c.field.grid.y_max);
  c.field.grid.ny = read<std::size_t>(g, "ny", "field.grid", c.field.grid.ny);

  const auto& lk = section(doc, "likelihood");
  c.likelihood.source = read<std::string>(lk, "source", "likelihood", c.likelihood.source);
  c.likelihood.max_points = read<std::size_t>(lk, "max_points", "likelihood", c.likelihood.max_points);
  c.likelihood.rk.abs_tol = read<double>(lk, "abs_tol", "likelihood", c.likelihood.rk.abs_tol);
  c.likelihood.rk.rel_tol = read<double>(lk, "rel_tol", "likelihood", c.likelihood.rk.rel_tol);
  const auto prior = read<std::string>(lk, "prior", "likelihood", "exact_marginal");
  if (prior == "exact_marginal") {
    c.likelihood.prior = LikelihoodPrior::kExactMarginal;
  } else if (prior == "standard_normal") {
    c.likelihood.prior = LikelihoodPrior::kStandardNormal;
  } else {
    fail("likelihood.prior", "must be \"exact_marginal\" or \"standard_normal\"");
  }

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json ExperimentConfig::to_json() const {
  json j;
  j["name"] = name;
  j["seed"] = seed;
  j["dataset"] = {{"kind", dataset.kind},
                  {"full_size", dataset.full_size},
                  {"path", dataset.path.string()},
                  {"split_seed", dataset.split_seed}};
  j["k_list"] = k_list;
  j["schedule"] = {{"ve", {{"sigma", ve.sigma}, {"t_min", ve.t_min}, {"t_max", ve.t_max}, {"steps", ve.steps}}},
                   {"vp", {{"beta_min", vp_beta_min}, {"beta_max", vp_beta_max}, {"T", vp_T}}}};
  j["synthetic_multiplier"] = synthetic_multiplier;
  j["thresholds"] = {{"delta_m", thresholds.delta_m},
                     {"delta_s", thresholds.delta_s},
                     {"delta_d", double_json(basin.critical.delta_d)},
                     {"delta_p", basin.critical.delta_p}};
  j["basin"] = {{"m_trials", basin.critical.m_trials},
                {"stride", basin.critical.stride},
                {"ddim_steps", basin.critical.ddim_steps},
                {"per_type_cap", basin.per_type_cap},
                {"groups", basin.groups}};
  j["energy_gap"] = {{"intervals", energy_gap.intervals},
                     {"reference_indices", energy_gap.reference_indices},
                     {"per_type_cap", energy_gap.per_type_cap}};
  j["field"] = {{"t", field_time()},
                {"grid",
                 {{"x_min", field.grid.x_min},
                  {"x_max", field.grid.x_max},
                  {"nx", field.grid.nx},
                  {"y_min", field.grid.y_min},
                  {"y_max", field.grid.y_max},
                  {"ny", field.grid.ny}}}};
  j["likelihood"] = {{"source", likelihood.source},
                     {"max_points", likelihood.max_points},
                     {"abs_tol", likelihood.rk.abs_tol},
                     {"rel_tol", likelihood.rk.rel_tol},
                     {"prior", likelihood.prior == LikelihoodPrior::kExactMarginal ? "exact_marginal" : "standard_normal"}};
  return j;
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(to_json().dump()); }

}  // namespace densemem::cli
