#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "densemem/patterns.hpp"

namespace densemem {

enum class SampleLabel { kMemorized, kSpurious, kGeneralized };

std::string_view label_name(SampleLabel label);

struct Thresholds {
  double delta_m = 0.0;  // memorization: d(x, nearest training point) <= delta_m
  double delta_s = 0.0;  // spurious: d(x, nearest other synthetic sample) <= delta_s

  void validate() const;
};

struct Classification {
  SampleLabel label = SampleLabel::kGeneralized;
  double d_train = 0.0;
  double d_synth = 0.0;
  std::size_t nn_train = 0;
  std::size_t nn_synth = 0;
};

struct Neighbor {
  double distance = 0.0;
  std::size_t index = 0;
};

// Euclidean nearest neighbor of x in `set`, skipping `exclude` when given. Ties resolve
// to the lowest index. Throws InvalidArgument when nothing is left to search.
Neighbor nn_distance(std::span<const double> x, const PointSet& set, std::optional<std::size_t> exclude = {});

// Memorized iff d_train <= delta_m; otherwise spurious iff the nearest *other* synthetic
// sample is within delta_s; otherwise generalized. x_hat is row self_index of synth.
Classification classify(std::span<const double> x_hat, const PatternSet& train, const SampleSet& synth,
                        std::size_t self_index, const Thresholds& th);

// Classifies every row of synth (parallel, order independent).
std::vector<Classification> classify_all(const PatternSet& train, const SampleSet& synth, const Thresholds& th);

struct Fractions {
  double memorized = 0.0;
  double spurious = 0.0;
  double generalized = 0.0;
};

Fractions fractions(const PatternSet& train, const SampleSet& synth, const Thresholds& th);
Fractions fractions(std::span<const Classification> labels);

// Equal-width bins spanning [0, max(distances)].
struct Histogram {
  double bin_width = 0.0;
  std::vector<std::size_t> counts;

  double bin_center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * bin_width; }
  std::size_t total() const;
};

Histogram distance_histogram(std::span<const double> distances, std::size_t bins);

// Center of the deepest valley between the two highest well-separated peaks, or nullopt
// when the histogram has no such pair (unimodal or degenerate). Advisory only.
std::optional<double> suggest_threshold(const Histogram& h);

}  // namespace densemem
