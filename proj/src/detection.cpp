#include "densemem/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "densemem/error.hpp"
#include "densemem/parallel.hpp"
#include "densemem/simd/kernels.hpp"

namespace densemem {

std::string_view label_name(SampleLabel label) {
  switch (label) {
    case SampleLabel::kMemorized: return "memorized";
    case SampleLabel::kSpurious: return "spurious";
    case SampleLabel::kGeneralized: return "generalized";
  }
  return "unknown";
}

void Thresholds::validate() const {
  if (!(delta_m >= 0.0) || !std::isfinite(delta_m)) throw InvalidArgument("delta_m must be finite and >= 0");
  if (!(delta_s >= 0.0) || !std::isfinite(delta_s)) throw InvalidArgument("delta_s must be finite and >= 0");
}

Neighbor nn_distance(std::span<const double> x, const PointSet& set, std::optional<std::size_t> exclude) {
  if (x.size() != set.dim()) throw InvalidArgument("nn_distance: dimension mismatch");
  const bool excluding = exclude.has_value() && *exclude < set.rows();
  if (excluding && set.rows() == 1) throw InvalidArgument("nn_distance: set is empty after exclusion");
  const auto& kern = simd::kernels();
  std::vector<double> d2(set.rows());
  kern.squared_distances(x, set.columns(), d2);
  if (excluding) d2[*exclude] = std::numeric_limits<double>::infinity();
  const std::size_t best = kern.argmin(d2);
  return {std::sqrt(d2[best]), best};
}

Classification classify(std::span<const double> x_hat, const PatternSet& train, const SampleSet& synth,
                        std::size_t self_index, const Thresholds& th) {
  if (self_index >= synth.rows()) {
    throw InvalidArgument("classify: index " + std::to_string(self_index) + " outside synthetic set of size " +
                          std::to_string(synth.rows()));
  }
  Classification c;
  const auto train_nn = nn_distance(x_hat, train);
  c.d_train = train_nn.distance;
  c.nn_train = train_nn.index;
  if (synth.rows() > 1) {
    const auto synth_nn = nn_distance(x_hat, synth, self_index);
    c.d_synth = synth_nn.distance;
    c.nn_synth = synth_nn.index;
  } else {
    c.d_synth = std::numeric_limits<double>::infinity();
    c.nn_synth = self_index;
  }
  if (c.d_train <= th.delta_m) {
    c.label = SampleLabel::kMemorized;
  } else if (c.d_synth <= th.delta_s) {
    c.label = SampleLabel::kSpurious;
  } else {
    c.label = SampleLabel::kGeneralized;
  }
  return c;
}

std::vector<Classification> classify_all(const PatternSet& train, const SampleSet& synth, const Thresholds& th) {
  th.validate();
  std::vector<Classification> out(synth.rows());
  parallel_for(synth.rows(), [&](std::size_t i) { out[i] = classify(synth.row(i), train, synth, i, th); });
  return out;
}

Fractions fractions(std::span<const Classification> labels) {
  if (labels.empty()) throw InvalidArgument("fractions: no samples");
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& c : labels) ++counts[static_cast<int>(c.label)];
  const double m = static_cast<double>(labels.size());
  return {static_cast<double>(counts[0]) / m, static_cast<double>(counts[1]) / m,
          static_cast<double>(counts[2]) / m};
}

Fractions fractions(const PatternSet& train, const SampleSet& synth, const Thresholds& th) {
  const auto labels = classify_all(train, synth, th);
  return fractions(labels);
}

std::size_t Histogram::total() const {
  std::size_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

Histogram distance_histogram(std::span<const double> distances, std::size_t bins) {
  if (distances.empty()) throw InvalidArgument("distance_histogram: no distances");
  if (bins < 2) throw InvalidArgument("distance_histogram: need at least 2 bins");
  double max_value = 0.0;
  for (double d : distances) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidArgument("distance_histogram: distances must be finite and >= 0");
    max_value = std::max(max_value, d);
  }
  Histogram h;
  h.counts.assign(bins, 0);
  h.bin_width = max_value / static_cast<double>(bins);
  for (double d : distances) {
    std::size_t bin = h.bin_width > 0.0 ? static_cast<std::size_t>(d / h.bin_width) : 0;
    ++h.counts[std::min(bin, bins - 1)];
  }
  return h;
}

std::optional<double> suggest_threshold(const Histogram& h) {
  const auto& c = h.counts;
  const std::size_t n = c.size();
  if (n < 3 || h.bin_width <= 0.0) return std::nullopt;

  // Local maxima, one representative (the middle) per plateau.
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && c[j + 1] == c[i]) ++j;
    const std::size_t left = i == 0 ? 0 : c[i - 1];
    const std::size_t right = j + 1 == n ? 0 : c[j + 1];
    if (c[i] > 0 && c[i] > left && c[i] > right) peaks.push_back((i + j) / 2);
    i = j + 1;
  }
  if (peaks.size() < 2) return std::nullopt;
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) {
    return c[a] != c[b] ? c[a] > c[b] : a < b;
  });

  const std::size_t first = peaks[0];
  for (std::size_t p = 1; p < peaks.size(); ++p) {
    const std::size_t lo = std::min(first, peaks[p]);
    const std::size_t hi = std::max(first, peaks[p]);
    if (hi - lo < 2) continue;
    std::size_t valley = lo + 1;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      if (c[i] < c[valley]) valley = i;
    }
    if (c[valley] >= std::min(c[lo], c[hi])) continue;
    std::size_t run_end = valley;
    while (run_end + 1 < hi && c[run_end + 1] == c[valley]) ++run_end;
    return 0.5 * (h.bin_center(valley) + h.bin_center(run_end));
  }
  return std::nullopt;
}

}  // namespace densemem
