// Compiled with -mavx2 -mfma. Nothing in this file may run before cpu_supports_avx2().

#include "densemem/simd/kernels.hpp"

#if defined(DENSEMEM_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace densemem::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Cephes-style exp: n = round(x / ln 2), r = x - n ln 2 split in two parts, then a (3,4)
// rational approximation of exp(r) on |r| <= ln2 / 2 and a 2^n scale built from the
// exponent bits. Inputs below -708 flush to zero (the scalar path would return a
// subnormal there).
inline __m256d exp_pd(__m256d x) {
  const __m256d lo_limit = _mm256_set1_pd(-708.0);
  const __m256d hi_limit = _mm256_set1_pd(709.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo_limit, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo_limit), hi_limit);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125E-1), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212E-6), r);
  const __m256d rr = _mm256_mul_pd(r, r);

  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, r);

  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.00000000000000000009E0));

  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_fmadd_pd(e, _mm256_set1_pd(2.0), _mm256_set1_pd(1.0));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(n32);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d scaled = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, scaled);
}

void squared_distances_avx2(std::span<const double> x, const ColumnView& points,
                            std::span<double> out) {
  const std::size_t k = points.count;
  const std::size_t vec_end = k - k % 4;
  const double* base = points.cols.data();
  for (std::size_t j = 0; j < vec_end; j += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t d = 0; d < points.dim; ++d) {
      const __m256d diff = _mm256_sub_pd(_mm256_set1_pd(x[d]), _mm256_loadu_pd(base + d * k + j));
      acc = _mm256_fmadd_pd(diff, diff, acc);
    }
    _mm256_storeu_pd(out.data() + j, acc);
  }
  for (std::size_t j = vec_end; j < k; ++j) {
    double acc = 0.0;
    for (std::size_t d = 0; d < points.dim; ++d) {
      const double diff = x[d] - base[d * k + j];
      acc = std::fma(diff, diff, acc);
    }
    out[j] = acc;
  }
}

double exp_shifted_avx2(std::span<const double> values, double shift, double scale,
                        std::span<double> out) {
  const std::size_t k = values.size();
  const std::size_t vec_end = k - k % 4;
  const __m256d vshift = _mm256_set1_pd(shift);
  const __m256d vneg = _mm256_set1_pd(-scale);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t j = 0; j < vec_end; j += 4) {
    const __m256d arg = _mm256_mul_pd(vneg, _mm256_sub_pd(_mm256_loadu_pd(values.data() + j), vshift));
    const __m256d e = exp_pd(arg);
    _mm256_storeu_pd(out.data() + j, e);
    acc = _mm256_add_pd(acc, e);
  }
  double sum = hsum(acc);
  for (std::size_t j = vec_end; j < k; ++j) {
    out[j] = std::exp(-scale * (values[j] - shift));
    sum += out[j];
  }
  return sum;
}

double dot_avx2(std::span<const double> a, std::span<const double> b) {
  const std::size_t k = a.size();
  const std::size_t vec_end = k - k % 8;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  for (std::size_t j = 0; j < vec_end; j += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + j), _mm256_loadu_pd(b.data() + j), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + j + 4), _mm256_loadu_pd(b.data() + j + 4), acc1);
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (std::size_t j = vec_end; j < k; ++j) sum = std::fma(a[j], b[j], sum);
  return sum;
}

std::size_t argmin_avx2(std::span<const double> values) {
  const std::size_t k = values.size();
  const std::size_t vec_end = k - k % 4;
  double best = values[0];
  if (vec_end >= 4) {
    __m256d vmin = _mm256_loadu_pd(values.data());
    for (std::size_t j = 4; j < vec_end; j += 4) vmin = _mm256_min_pd(vmin, _mm256_loadu_pd(values.data() + j));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vmin);
    for (double lane : lanes) best = lane < best ? lane : best;
  }
  for (std::size_t j = vec_end; j < k; ++j) best = values[j] < best ? values[j] : best;
  // First occurrence keeps the lowest-index tie rule of the scalar path.
  for (std::size_t j = 0; j < k; ++j) {
    if (values[j] == best) return j;
  }
  return 0;  // only reachable with NaN input
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{squared_distances_avx2, exp_shifted_avx2, dot_avx2, argmin_avx2};
  return &table;
}

}  // namespace densemem::simd

#else

namespace densemem::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace densemem::simd

#endif
