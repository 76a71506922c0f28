#include "densemem/cli/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "densemem/basin.hpp"
#include "densemem/cli/output.hpp"
#include "densemem/detection.hpp"
#include "densemem/error.hpp"
#include "densemem/likelihood.hpp"
#include "densemem/parallel.hpp"
#include "densemem/patterns.hpp"
#include "densemem/relenergy.hpp"
#include "densemem/rng.hpp"
#include "densemem/samplers.hpp"

namespace densemem::cli {
namespace fs = std::filesystem;

namespace {

constexpr const char* kDoneMarker = "DONE";

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

// Writes text to path via a temporary file so an interrupted run never leaves a
// truncated product behind under the final name.
void write_atomic(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

class CsvText {
 public:
  CsvText(const std::string& provenance, const std::string& columns) {
    buf_ << "# " << provenance << '\n' << columns << '\n';
  }
  template <typename... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    ((buf_ << (first ? "" : ",") << cell(fields), first = false), ...);
    buf_ << '\n';
  }
  std::string str() const { return buf_.str(); }

 private:
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(std::string_view v) { return std::string(v); }
  static std::string cell(const char* v) { return v; }
  std::ostringstream buf_;
};

PatternSet full_dataset(const ExperimentConfig& config) {
  if (config.dataset.kind == "circle") return sample_unit_circle(config.dataset.full_size, config.seed);
  return load_patterns(config.dataset.path);
}

PatternSet load_training(const OutputTree& tree, std::size_t k) {
  const auto path = tree.k_dir(k) / "patterns.csv";
  if (!fs::exists(path)) throw IoError("missing '" + path.string() + "'; run gen-data first");
  auto patterns = load_patterns(path);
  if (patterns.k() != k) throw IoError("'" + path.string() + "' holds " + std::to_string(patterns.k()) + " patterns");
  return patterns;
}

SampleSet load_synthetic(const OutputTree& tree, std::size_t k) {
  const auto dir = tree.k_dir(k);
  if (!fs::exists(dir / kDoneMarker)) {
    throw IoError("no completed sweep for K=" + std::to_string(k) + " under '" + dir.string() + "'; run sweep first");
  }
  return load_samples(dir / "samples.csv");
}

// Indices of each label in sample order.
std::map<std::string, std::vector<std::size_t>> group_indices(std::span<const Classification> labels) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < labels.size(); ++i) out[std::string(label_name(labels[i].label))].push_back(i);
  return out;
}

bool needs_samples(const std::vector<std::string>& groups) {
  for (const auto& g : groups) {
    if (g != "training") return true;
  }
  return false;
}

// Wraps module errors with the K they occurred at, keeping the error category.
template <typename Fn>
void with_k_context(std::size_t k, Fn&& fn) {
  const std::string prefix = "K=" + std::to_string(k) + ": ";
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const IoError& e) {
    throw IoError(prefix + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(prefix + e.what());
  } catch (const Error& e) {
    throw Error(prefix + e.what());
  }
}

}  // namespace

void cmd_gen_data(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  const auto full = full_dataset(config);
  if (config.k_list.back() > full.k()) {
    throw ConfigError("k_list: largest K exceeds the dataset size " + std::to_string(full.k()));
  }
  const auto subsets = nested_subsets(full, config.k_list, config.dataset.split_seed);
  OutputTree tree(out, config);
  for (const auto& subset : subsets) {
    const auto path = tree.k_dir(subset.k()) / "patterns.csv";
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    save_patterns(tmp, subset, tree.provenance() + " label=" + config.dataset.kind);
    fs::rename(tmp, path);
    tree.record(path, "gen-data");
  }
}

void cmd_sweep(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  OutputTree tree(out, config);
  for (std::size_t k : config.k_list) {
    with_k_context(k, [&] {
      const auto dir = tree.k_dir(k);
      if (fs::exists(dir / kDoneMarker)) return;
      if (fs::exists(dir / "samples.csv") || fs::exists(dir / "classification.csv")) {
        std::cerr << "sweep: K=" << k << " has partial results without a completion marker; recomputing\n";
      }
      const auto patterns = load_training(tree, k);
      const auto seed = mix_seed(config.seed, k);
      const auto synth = generate_synthetic_set(patterns, config.ve, config.synthetic_multiplier * k, seed);
      const fs::path samples_tmp = (dir / "samples.csv").string() + ".tmp";
      save_samples(samples_tmp, synth, tree.provenance());
      fs::rename(samples_tmp, dir / "samples.csv");

      const auto labels = classify_all(patterns, synth, config.thresholds);
      CsvText cls(tree.provenance(), "index,label,d_train,d_synth");
      for (std::size_t i = 0; i < labels.size(); ++i) {
        cls.row(i, label_name(labels[i].label), labels[i].d_train, labels[i].d_synth);
      }
      write_atomic(dir / "classification.csv", cls.str());

      const auto f = fractions(labels);
      CsvText frac(tree.provenance(), "K,f_mem,f_spur,f_gen");
      frac.row(k, f.memorized, f.spurious, f.generalized);
      write_atomic(dir / "fractions.csv", frac.str());

      tree.record(dir / "samples.csv", "sweep");
      tree.record(dir / "classification.csv", "sweep");
      tree.record(dir / "fractions.csv", "sweep");
      write_atomic(dir / kDoneMarker, tree.provenance() + "\n");
    });
  }

  // Aggregate from the per-K rows so resumed and uninterrupted runs agree byte for byte.
  std::string text = "# " + tree.provenance() + "\nK,f_mem,f_spur,f_gen\n";
  for (std::size_t k : config.k_list) {
    std::ifstream in(tree.k_dir(k) / "fractions.csv");
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    if (!std::getline(in, line) || line.empty()) {
      throw IoError("K=" + std::to_string(k) + ": fractions.csv has no data row");
    }
    text += line + '\n';
  }
  const auto path = tree.experiment_dir() / "fractions.csv";
  write_atomic(path, text);
  tree.record(path, "sweep");
}

void cmd_basin(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  OutputTree tree(out, config);
  const auto schedule = config.vp_schedule();
  BasinSweepConfig sweep_cfg;
  sweep_cfg.critical = config.basin.critical;
  sweep_cfg.per_type_cap = config.basin.per_type_cap;

  CsvText summary(tree.provenance(),
                  "K,group,available,used,excluded,mean_log_volume,std_log_volume,zero_volume,mean_t_c");
  for (std::size_t k : config.k_list) {
    with_k_context(k, [&] {
      const auto patterns = load_training(tree, k);
      std::vector<SampleGroup> groups;
      std::vector<std::vector<std::size_t>> source_index;
      std::size_t synthetic_size = config.synthetic_multiplier * k;
      std::map<std::string, std::vector<std::size_t>> by_label;
      std::optional<SampleSet> synth;
      if (needs_samples(config.basin.groups)) {
        synth.emplace(load_synthetic(tree, k));
        synthetic_size = synth->m();
        by_label = group_indices(classify_all(patterns, *synth, config.thresholds));
      }
      for (const auto& name : config.basin.groups) {
        SampleGroup g{name, {}, name == "training"};
        std::vector<std::size_t> idx;
        if (name == "training") {
          for (std::size_t i = 0; i < patterns.k(); ++i) idx.push_back(i);
        } else {
          idx = by_label[name];
        }
        for (std::size_t i : idx) {
          const auto row = name == "training" ? patterns.row(i) : synth->row(i);
          g.points.emplace_back(row.begin(), row.end());
        }
        groups.push_back(std::move(g));
        source_index.push_back(std::move(idx));
      }

      const auto stats = sweep_basins(groups, synthetic_size, make_vp_score(patterns, schedule), schedule, sweep_cfg,
                                      mix_seed(config.seed, k));
      CsvText detail(tree.provenance(), "group,sample_index,trial,t_c,radius,log_volume");
      for (std::size_t gi = 0; gi < stats.size(); ++gi) {
        const auto& s = stats[gi];
        summary.row(k, s.name, s.available, s.used, std::size_t{s.excluded}, s.mean_log_volume, s.std_log_volume,
                    s.zero_volume, s.mean_t_c);
        for (std::size_t p = 0; p < s.results.size(); ++p) {
          const auto& r = s.results[p];
          for (std::size_t trial = 0; trial < r.t_c.size(); ++trial) {
            detail.row(s.name, source_index[gi][p], trial, r.t_c[trial], r.radii[trial], r.log_volume[trial]);
          }
        }
      }
      const auto path = tree.k_dir(k) / "basin.csv";
      write_atomic(path, detail.str());
      tree.record(path, "basin");
    });
  }
  const auto path = tree.experiment_dir() / "basin_summary.csv";
  write_atomic(path, summary.str());
  tree.record(path, "basin");
}

void cmd_energy_gap(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  OutputTree tree(out, config);
  const auto schedule = config.vp_schedule();
  const auto grid = InterpolationGrid::uniform(config.energy_gap.intervals);
  const double beta0 = schedule.beta(1);
  const std::size_t cap = config.energy_gap.per_type_cap;

  CsvText summary(tree.provenance(), "K,reference_id,group,count,gap,target_std");
  for (std::size_t k : config.k_list) {
    with_k_context(k, [&] {
      const auto patterns = load_training(tree, k);
      const auto score0 = make_vp_score0(patterns, schedule);
      std::map<std::string, std::vector<std::size_t>> by_label;
      std::optional<SampleSet> synth;
      if (needs_samples(config.basin.groups)) {
        synth.emplace(load_synthetic(tree, k));
        by_label = group_indices(classify_all(patterns, *synth, config.thresholds));
      }

      struct Target {
        std::string group;
        std::size_t index;
        std::span<const double> x;
      };
      std::vector<Target> targets;
      // Training targets always come first: they are the baseline every gap is taken against.
      for (std::size_t i = 0; i < std::min(cap, patterns.k()); ++i) targets.push_back({"training", i, patterns.row(i)});
      for (const auto& name : config.basin.groups) {
        if (name == "training") continue;
        const auto& idx = by_label[name];
        for (std::size_t j = 0; j < std::min(cap, idx.size()); ++j) targets.push_back({name, idx[j], synth->row(idx[j])});
      }

      CsvText detail(tree.provenance(), "target_index,label,u_rel,reference_id");
      for (std::size_t ref : config.energy_gap.reference_indices) {
        const auto x_ref = patterns.row(ref);
        std::vector<double> u(targets.size());
        // Energy of the target relative to the reference: u(x_ref) - u(x_target).
        parallel_for(targets.size(),
                     [&](std::size_t i) { u[i] = relative_energy(targets[i].x, x_ref, score0, beta0, grid); });
        std::map<std::string, std::vector<double>> per_group;
        for (std::size_t i = 0; i < targets.size(); ++i) {
          detail.row(targets[i].index, targets[i].group, u[i], ref);
          per_group[targets[i].group].push_back(u[i]);
        }
        const auto& baseline = per_group["training"];
        std::vector<std::string> order{"training"};
        for (const auto& g : config.basin.groups) {
          if (g != "training") order.push_back(g);
        }
        for (const auto& g : order) {
          const auto& vals = per_group[g];
          if (vals.empty()) {
            summary.row(k, ref, g, std::size_t{0}, std::nan(""), std::nan(""));
            continue;
          }
          const auto gap = energy_gap(vals, baseline);
          summary.row(k, ref, g, vals.size(), gap.gap, gap.target_std);
        }
      }
      const auto path = tree.k_dir(k) / "energy.csv";
      write_atomic(path, detail.str());
      tree.record(path, "energy-gap");
    });
  }
  const auto path = tree.experiment_dir() / "energy_gaps.csv";
  write_atomic(path, summary.str());
  tree.record(path, "energy-gap");
}

void cmd_field(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  OutputTree tree(out, config);
  const double t = config.field_time();
  const double beta = 1.0 / (2.0 * config.ve.sigma * config.ve.sigma * t);
  for (std::size_t k : config.k_list) {
    with_k_context(k, [&] {
      const auto patterns = load_training(tree, k);
      const auto field = energy_field(patterns, t, config.ve.sigma, config.field.grid);
      const auto path = tree.k_dir(k) / "field.csv";
      const fs::path tmp = path.string() + ".tmp";
      save_field_csv(tmp, field, tree.provenance() + " t=" + fmt(t) + " beta=" + fmt(beta));
      fs::rename(tmp, path);
      tree.record(path, "field");
    });
  }
}

void cmd_likelihood(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  OutputTree tree(out, config);
  LikelihoodOptions options;
  options.rk = config.likelihood.rk;
  options.prior = config.likelihood.prior;
  for (std::size_t k : config.k_list) {
    with_k_context(k, [&] {
      const auto patterns = load_training(tree, k);
      std::optional<SampleSet> synth;
      const PointSet* source = &patterns;
      if (config.likelihood.source == "synthetic") {
        synth.emplace(load_synthetic(tree, k));
        source = &*synth;
      }
      const std::size_t count = std::min(config.likelihood.max_points, source->rows());
      std::vector<double> ll(count);
      parallel_for(count, [&](std::size_t i) {
        try {
          ll[i] = log_likelihood(source->row(i), patterns, config.ve, options);
        } catch (const Error& e) {
          throw Error("point " + std::to_string(i) + ": " + e.what());
        }
      });
      CsvText csv(tree.provenance() + " source=" + config.likelihood.source, "index,log_likelihood");
      for (std::size_t i = 0; i < count; ++i) csv.row(i, ll[i]);
      const auto path = tree.k_dir(k) / "likelihood.csv";
      write_atomic(path, csv.str());
      tree.record(path, "likelihood");
    });
  }
}

}  // namespace densemem::cli
