#include <cmath>

#include "gdm/kernels.hpp"

namespace gdm::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  // Four interleaved partial sums, matching the AVX2 lane layout.
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) acc[l] += a[i + l] * b[i + l];
  }
  double total = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = std::fabs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

void scale_scalar(double* x, std::size_t n, double factor) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= factor;
}

void hermite_scalar(const HermiteGather& g, const double* v, const double* s, double* out) {
  for (std::size_t j = 0; j < g.count; ++j) {
    std::int32_t k = g.index[j];
    double t = g.w_value_left[j] * v[k];
    t = t + g.w_slope_left[j] * s[k];
    t = t + g.w_value_right[j] * v[k + 1];
    t = t + g.w_slope_right[j] * s[k + 1];
    out[j] += t;
  }
}

void lft_scalar(double* z, std::size_t n, double a, double b, double c, double d) {
  for (std::size_t i = 0; i < n; ++i) {
    double num = a * z[i] + b;
    double den = c * z[i] + d;
    z[i] = num / den;
  }
}

void lft_select_scalar(double* z, const std::int32_t* sym, std::size_t n, const double* a, const double* b,
                       const double* c, const double* d) {
  for (std::size_t i = 0; i < n; ++i) {
    std::int32_t s = sym[i];
    double num = a[s] * z[i] + b[s];
    double den = c[s] * z[i] + d[s];
    z[i] = num / den;
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table table{Isa::Scalar,       "scalar",      dot_scalar, max_abs_diff_scalar, scale_scalar,
                           hermite_scalar,    lft_scalar,    lft_select_scalar};
  return table;
}

}  // namespace gdm::kernels
