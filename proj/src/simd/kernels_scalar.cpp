#include "densemem/simd/kernels.hpp"

#include <cmath>

namespace densemem::simd {
namespace {

void squared_distances_scalar(std::span<const double> x, const ColumnView& points,
                              std::span<double> out) {
  const std::size_t k = points.count;
  for (std::size_t j = 0; j < k; ++j) out[j] = 0.0;
  for (std::size_t d = 0; d < points.dim; ++d) {
    const double xd = x[d];
    const double* col = points.cols.data() + d * k;
    for (std::size_t j = 0; j < k; ++j) {
      const double diff = xd - col[j];
      out[j] += diff * diff;
    }
  }
}

double exp_shifted_scalar(std::span<const double> values, double shift, double scale,
                          std::span<double> out) {
  double sum = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    out[j] = std::exp(-scale * (values[j] - shift));
    sum += out[j];
  }
  return sum;
}

double dot_scalar(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += a[j] * b[j];
  return sum;
}

std::size_t argmin_scalar(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < values.size(); ++j) {
    if (values[j] < values[best]) best = j;
  }
  return best;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{squared_distances_scalar, exp_shifted_scalar, dot_scalar,
                                 argmin_scalar};
  return table;
}

}  // namespace densemem::simd
