#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
// Elementwise kernels are bit-identical across variants (no FMA contraction,
// same operation order); reductions agree to rounding.

namespace gdm::kernels {

enum class Isa { Scalar, Avx2 };

struct HermiteGather {
  std::size_t count = 0;
  const std::int32_t* index = nullptr;  // left node of the bracketing cell
  const double* w_value_left = nullptr;
  const double* w_slope_left = nullptr;
  const double* w_value_right = nullptr;
  const double* w_slope_right = nullptr;
};

struct Table {
  Isa isa;
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  void (*scale)(double* x, std::size_t n, double factor);
  // out[j] += wv0[j]*v[k] + ws0[j]*s[k] + wv1[j]*v[k+1] + ws1[j]*s[k+1], k = index[j]
  void (*hermite_accumulate)(const HermiteGather& g, const double* values, const double* slopes, double* out);
  // z[j] <- (a z[j] + b) / (c z[j] + d)
  void (*lft_apply)(double* z, std::size_t n, double a, double b, double c, double d);
  // z[j] <- (a[s] z[j] + b[s]) / (c[s] z[j] + d[s]), s = symbol[j]
  void (*lft_apply_select)(double* z, const std::int32_t* symbol, std::size_t n, const double* a, const double* b,
                           const double* c, const double* d);
};

const Table& scalar_table();
bool avx2_available();
/// Throws when the CPU lacks AVX2 or the build omitted it.
const Table& avx2_table();

/// Runtime-selected table. GDM_SIMD=scalar|avx2 overrides detection.
const Table& active();
void force(Isa isa);
void reset_selection();

}  // namespace gdm::kernels
