#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "densemem/simd/kernels.hpp"

namespace densemem {

// Immutable row-major set of points with a column-major copy for the SIMD kernels.
class PointSet {
 public:
  // Throws InvalidArgument unless rows >= 1, dim >= 1, values.size() == rows * dim and all
  // entries are finite.
  PointSet(std::vector<double> values, std::size_t rows, std::size_t dim);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> values() const noexcept { return values_; }
  simd::ColumnView columns() const noexcept { return {columns_, rows_, dim_}; }

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.rows_ == b.rows_ && a.dim_ == b.dim_ && a.values_ == b.values_;
  }

 private:
  std::vector<double> values_;
  std::vector<double> columns_;
  std::size_t rows_;
  std::size_t dim_;
};

// Stored memories / training set.
class PatternSet : public PointSet {
 public:
  PatternSet(std::vector<double> values, std::size_t k, std::size_t n, std::string label = {},
             std::uint64_t seed = 0)
      : PointSet(std::move(values), k, n), label_(std::move(label)), seed_(seed) {}

  std::size_t k() const noexcept { return rows(); }
  std::size_t n() const noexcept { return dim(); }
  const std::string& label() const noexcept { return label_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::string label_;
  std::uint64_t seed_;
};

// Generated samples with their provenance.
class SampleSet : public PointSet {
 public:
  SampleSet(std::vector<double> values, std::size_t m, std::size_t n, std::size_t source_k,
            std::string schedule_id, std::uint64_t seed)
      : PointSet(std::move(values), m, n),
        source_k_(source_k),
        schedule_id_(std::move(schedule_id)),
        seed_(seed) {}

  std::size_t m() const noexcept { return rows(); }
  std::size_t n() const noexcept { return dim(); }
  std::size_t source_k() const noexcept { return source_k_; }
  const std::string& schedule_id() const noexcept { return schedule_id_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::size_t source_k_;
  std::string schedule_id_;
  std::uint64_t seed_;
};

// k points (cos phi, sin phi) with phi ~ U[0, 2 pi).
PatternSet sample_unit_circle(std::size_t k, std::uint64_t seed);

// One seed-determined permutation of `full`, then prefixes of the requested sizes, so
// every subset is a prefix of the next. sizes must be strictly ascending and <= full.k().
std::vector<PatternSet> nested_subsets(const PatternSet& full, std::span<const std::size_t> sizes,
                                       std::uint64_t seed);

// CSV with a `# k=<K> n=<N> seed=<seed>` header and shortest round-trip decimal rendering.
// Extra `key=value` tokens (e.g. config_hash) are appended to the header verbatim.
void save_patterns(const std::filesystem::path& path, const PatternSet& patterns,
                   const std::string& extra_header = {});
PatternSet load_patterns(const std::filesystem::path& path);

// Same layout; header adds `schedule_id=<id> source_k=<K>` and k is the sample count.
void save_samples(const std::filesystem::path& path, const SampleSet& samples,
                  const std::string& extra_header = {});
SampleSet load_samples(const std::filesystem::path& path);

}  // namespace densemem
