#pragma once

// Data-parallel inner loops over a set of stored points.
//
// Points are passed column-major ("dimension-major"): coordinate d of point j lives at
// cols[d * count + j]. This lets every kernel stream over points with contiguous loads
// regardless of the dimension, which is what matters for the 2D toy problems where a
// row-major layout would leave vector lanes idle.
//
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2+FMA variant.
// The variant is chosen once at startup from CPUID and can be overridden with the
// DENSEMEM_SIMD environment variable ("scalar" or "avx2") or set_backend().

#include <cstddef>
#include <span>
#include <string_view>

namespace densemem::simd {

enum class Backend { kScalar, kAvx2 };

struct ColumnView {
  std::span<const double> cols;  // n * count values
  std::size_t count = 0;
  std::size_t dim = 0;

  std::span<const double> column(std::size_t d) const { return cols.subspan(d * count, count); }
};

struct KernelTable {
  // out[j] = ||x - p_j||^2
  void (*squared_distances)(std::span<const double> x, const ColumnView& points,
                            std::span<double> out);
  // out[j] = exp(-scale * (values[j] - shift)); returns sum(out).
  double (*exp_shifted)(std::span<const double> values, double shift, double scale,
                        std::span<double> out);
  double (*dot)(std::span<const double> a, std::span<const double> b);
  // Minimum value and its lowest index. values must be nonempty.
  std::size_t (*argmin)(std::span<const double> values);
};

const KernelTable& scalar_kernels();
// Returns nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_kernels();

bool cpu_supports_avx2();

Backend active_backend();
// Throws InvalidArgument when the backend is unavailable on this machine.
void set_backend(Backend backend);
std::string_view backend_name(Backend backend);

const KernelTable& kernels();

}  // namespace densemem::simd
