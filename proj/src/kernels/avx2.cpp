#include "gdm/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#include <cmath>

namespace gdm::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d pair = _mm_add_pd(lo, hi);  // (a0+a2, a1+a3)
  __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, prod);
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double best = lanes[0];
  for (int l = 1; l < 4; ++l) best = lanes[l] > best ? lanes[l] : best;
  for (; i < n; ++i) {
    double d = std::fabs(a[i] - b[i]);
    if (d > best) best = d;
  }
  return best;
}

void scale_avx2(double* x, std::size_t n, double factor) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), f));
  for (; i < n; ++i) x[i] *= factor;
}

void hermite_avx2(const HermiteGather& g, const double* v, const double* s, double* out) {
  std::size_t j = 0;
  for (; j + 4 <= g.count; j += 4) {
    __m128i k = _mm_loadu_si128(reinterpret_cast<const __m128i*>(g.index + j));
    __m128i k1 = _mm_add_epi32(k, _mm_set1_epi32(1));
    __m256d v0 = _mm256_i32gather_pd(v, k, 8);
    __m256d s0 = _mm256_i32gather_pd(s, k, 8);
    __m256d v1 = _mm256_i32gather_pd(v, k1, 8);
    __m256d s1 = _mm256_i32gather_pd(s, k1, 8);
    __m256d t = _mm256_mul_pd(_mm256_loadu_pd(g.w_value_left + j), v0);
    t = _mm256_add_pd(t, _mm256_mul_pd(_mm256_loadu_pd(g.w_slope_left + j), s0));
    t = _mm256_add_pd(t, _mm256_mul_pd(_mm256_loadu_pd(g.w_value_right + j), v1));
    t = _mm256_add_pd(t, _mm256_mul_pd(_mm256_loadu_pd(g.w_slope_right + j), s1));
    _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j), t));
  }
  for (; j < g.count; ++j) {
    std::int32_t k = g.index[j];
    double t = g.w_value_left[j] * v[k];
    t = t + g.w_slope_left[j] * s[k];
    t = t + g.w_value_right[j] * v[k + 1];
    t = t + g.w_slope_right[j] * s[k + 1];
    out[j] += t;
  }
}

void lft_avx2(double* z, std::size_t n, double a, double b, double c, double d) {
  const __m256d va = _mm256_set1_pd(a), vb = _mm256_set1_pd(b), vc = _mm256_set1_pd(c), vd = _mm256_set1_pd(d);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(z + i);
    __m256d num = _mm256_add_pd(_mm256_mul_pd(va, x), vb);
    __m256d den = _mm256_add_pd(_mm256_mul_pd(vc, x), vd);
    _mm256_storeu_pd(z + i, _mm256_div_pd(num, den));
  }
  for (; i < n; ++i) {
    double num = a * z[i] + b;
    double den = c * z[i] + d;
    z[i] = num / den;
  }
}

void lft_select_avx2(double* z, const std::int32_t* sym, std::size_t n, const double* a, const double* b,
                     const double* c, const double* d) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m128i k = _mm_loadu_si128(reinterpret_cast<const __m128i*>(sym + i));
    __m256d x = _mm256_loadu_pd(z + i);
    __m256d num = _mm256_add_pd(_mm256_mul_pd(_mm256_i32gather_pd(a, k, 8), x), _mm256_i32gather_pd(b, k, 8));
    __m256d den = _mm256_add_pd(_mm256_mul_pd(_mm256_i32gather_pd(c, k, 8), x), _mm256_i32gather_pd(d, k, 8));
    _mm256_storeu_pd(z + i, _mm256_div_pd(num, den));
  }
  for (; i < n; ++i) {
    std::int32_t s = sym[i];
    double num = a[s] * z[i] + b[s];
    double den = c[s] * z[i] + d[s];
    z[i] = num / den;
  }
}

}  // namespace

const Table* avx2_table_ptr() {
  static const Table table{Isa::Avx2,   "avx2",   dot_avx2,       max_abs_diff_avx2, scale_avx2,
                           hermite_avx2, lft_avx2, lft_select_avx2};
  return &table;
}

}  // namespace gdm::kernels

#else

namespace gdm::kernels {
const Table* avx2_table_ptr() { return nullptr; }
}  // namespace gdm::kernels

#endif
