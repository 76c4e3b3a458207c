#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gdm/derham.hpp"

namespace gdm {

struct SmoothVerdict {
  bool holds = false;
  // [min, max] of g_i' over [0,1], attained at the endpoints.
  std::vector<std::pair<Rational, Rational>> derivative_range;
  std::string reason;
};

/// Every g_i is C^2 on [0,1] with 0 < g_i' < 1 there.
SmoothVerdict check_smooth_contracting(const DeRhamSystem& system);

struct DensityOptions {
  int nodes = 2049;
  double tolerance = 1e-10;
  int max_sweeps = 100000;
};

struct DensityGrid {
  std::vector<double> nodes;
  std::vector<double> values;
  double residual = 0.0;            // sup |L h - h| at the last sweep
  double tolerance = 0.0;
  double normalization_error = 0.0; // |Simpson integral - 1| before the last renormalization
  int sweeps = 0;
  std::vector<double> residual_history;
};

/// Fixed point of (L h)(y) = sum_i g_i'(y) h(g_i(y)) on a uniform grid,
/// with monotone cubic interpolation between nodes and unit integral.
DensityGrid solve_density(const DeRhamSystem& system, const DensityOptions& options = {});

/// Monotone cubic (Fritsch-Carlson) evaluation of the grid function at x.
double interpolate_density(const DensityGrid& grid, double x);

/// sum_i int_0^1 h(g_i(y)) g_i'(y) log(1/g_i'(y)) dy / log N by composite
/// Simpson. Refuses when the density residual exceeds 10 * tolerance.
double dim_fanlau(const DeRhamSystem& system, const DensityGrid& grid);

}  // namespace gdm
