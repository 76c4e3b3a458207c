#include "gdm/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "gdm/error.hpp"
#include "gdm/kernels.hpp"

namespace gdm {

SmoothVerdict check_smooth_contracting(const DeRhamSystem& system) {
  SmoothVerdict v;
  v.holds = true;
  for (int i = 0; i < system.N; ++i) {
    const LftMatrix& m = system.matrices[static_cast<std::size_t>(i)];
    // The pole -1/c must stay off [0,1]: c + 1 > 0 with d = 1.
    if (!(m.c + 1 > 0)) {
      v.holds = false;
      v.reason = "g_" + std::to_string(i) + " has a pole in [0,1]";
      v.derivative_range.emplace_back(Rational(0), Rational(0));
      continue;
    }
    Rational at0 = m.det();
    Rational at1 = m.det() / ((m.c + 1) * (m.c + 1));
    Rational lo = std::min(at0, at1), hi = std::max(at0, at1);
    v.derivative_range.emplace_back(lo, hi);
    if (v.holds && !(lo > 0 && hi < 1)) {
      v.holds = false;
      v.reason = "g_" + std::to_string(i) + "' ranges over [" + to_string(lo) + ", " + to_string(hi) + "], not inside (0,1)";
    }
  }
  return v;
}

namespace {

void fritsch_carlson(const std::vector<double>& v, double h, std::vector<double>& m) {
  const std::size_t n = v.size();
  std::vector<double> delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) delta[k] = (v[k + 1] - v[k]) / h;
  // Three-point one-sided end slopes, clipped to keep the shape.
  auto end_slope = [](double d0, double d1) {
    double e = 0.5 * (3.0 * d0 - d1);
    if (e * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::fabs(e) > 3.0 * std::fabs(d0)) return 3.0 * d0;
    return e;
  };
  m[0] = n > 2 ? end_slope(delta[0], delta[1]) : delta[0];
  m[n - 1] = n > 2 ? end_slope(delta[n - 2], delta[n - 3]) : delta[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    m[k] = (delta[k - 1] * delta[k] <= 0.0) ? 0.0 : 0.5 * (delta[k - 1] + delta[k]);
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (delta[k] == 0.0) {
      m[k] = 0.0;
      m[k + 1] = 0.0;
      continue;
    }
    double a = m[k] / delta[k], b = m[k + 1] / delta[k];
    double s = a * a + b * b;
    if (s > 9.0) {
      double t = 3.0 / std::sqrt(s);
      m[k] = t * a * delta[k];
      m[k + 1] = t * b * delta[k];
    }
  }
}

struct Gather {
  std::vector<std::int32_t> index;
  std::vector<double> wv0, ws0, wv1, ws1;

  void add(double x, double scale, std::size_t nodes, double h) {
    double pos = std::clamp(x, 0.0, 1.0) / h;
    auto k = static_cast<std::int32_t>(std::min(static_cast<double>(nodes - 2), std::floor(pos)));
    double t = pos - k;
    double t2 = t * t, t3 = t2 * t;
    index.push_back(k);
    wv0.push_back(scale * (2 * t3 - 3 * t2 + 1));
    ws0.push_back(scale * h * (t3 - 2 * t2 + t));
    wv1.push_back(scale * (-2 * t3 + 3 * t2));
    ws1.push_back(scale * h * (t3 - t2));
  }

  kernels::HermiteGather view() const {
    return {index.size(), index.data(), wv0.data(), ws0.data(), wv1.data(), ws1.data()};
  }
};

// Composite Simpson weights on an odd number of uniform nodes.
std::vector<double> simpson_weights(std::size_t m, double h) {
  std::vector<double> w(m);
  for (std::size_t j = 0; j < m; ++j) {
    w[j] = (j == 0 || j + 1 == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    w[j] *= h / 3.0;
  }
  return w;
}

}  // namespace

DensityGrid solve_density(const DeRhamSystem& system, const DensityOptions& opt) {
  if (opt.nodes < 5 || opt.nodes % 2 == 0) throw Error(ErrorKind::Config, "density grid needs an odd node count >= 5");
  if (!(opt.tolerance > 0.0)) throw Error(ErrorKind::Config, "tolerance must be positive");
  SmoothVerdict smooth = check_smooth_contracting(system);
  if (!smooth.holds) throw Error(ErrorKind::Domain, "transfer operator requires smooth contracting maps: " + smooth.reason);

  const auto m = static_cast<std::size_t>(opt.nodes);
  const double h = 1.0 / static_cast<double>(m - 1);
  DensityGrid grid;
  grid.tolerance = opt.tolerance;
  grid.nodes.resize(m);
  for (std::size_t j = 0; j < m; ++j) grid.nodes[j] = static_cast<double>(j) * h;

  // One gather per map: out[j] += g_i'(y_j) * h(g_i(y_j)).
  std::vector<Gather> gathers(static_cast<std::size_t>(system.N));
  for (int i = 0; i < system.N; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double y = grid.nodes[j];
      gathers[static_cast<std::size_t>(i)].add(system.g(i, y), system.g_prime(i, y), m, h);
    }
  }

  const kernels::Table& k = kernels::active();
  const std::vector<double> quad = simpson_weights(m, h);
  std::vector<double> cur(m, 1.0), next(m), slopes(m);
  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    fritsch_carlson(cur, h, slopes);
    std::fill(next.begin(), next.end(), 0.0);
    for (const Gather& g : gathers) k.hermite_accumulate(g.view(), cur.data(), slopes.data(), next.data());
    double integral = k.dot(quad.data(), next.data(), m);
    if (!(integral > 0.0) || !std::isfinite(integral)) throw Error(ErrorKind::Convergence, "density iteration lost mass");
    grid.normalization_error = std::fabs(integral - 1.0);
    k.scale(next.data(), m, 1.0 / integral);
    double residual = k.max_abs_diff(next.data(), cur.data(), m);
    grid.residual_history.push_back(residual);
    cur.swap(next);
    grid.sweeps = sweep;
    grid.residual = residual;
    if (residual < opt.tolerance) {
      grid.values = cur;
      return grid;
    }
  }
  throw Error(ErrorKind::Convergence, "density iteration did not reach tolerance " + format_real(opt.tolerance) +
                                          " in " + std::to_string(opt.max_sweeps) + " sweeps (residual " +
                                          format_real(grid.residual) + ")");
}

double interpolate_density(const DensityGrid& grid, double x) {
  const std::size_t m = grid.values.size();
  if (m < 2) throw Error(ErrorKind::Domain, "empty density grid");
  const double h = 1.0 / static_cast<double>(m - 1);
  std::vector<double> slopes(m);
  fritsch_carlson(grid.values, h, slopes);
  Gather g;
  g.add(x, 1.0, m, h);
  double out = 0.0;
  kernels::scalar_table().hermite_accumulate(g.view(), grid.values.data(), slopes.data(), &out);
  return out;
}

double dim_fanlau(const DeRhamSystem& system, const DensityGrid& grid) {
  if (grid.residual > 10.0 * grid.tolerance) {
    throw Error(ErrorKind::Convergence, "density residual " + format_real(grid.residual) + " exceeds 10 * tolerance");
  }
  const std::size_t m = grid.values.size();
  const double h = 1.0 / static_cast<double>(m - 1);
  std::vector<double> slopes(m);
  fritsch_carlson(grid.values, h, slopes);
  std::vector<double> weights = simpson_weights(m, h);
  const kernels::Table& k = kernels::active();
  std::vector<double> integrand(m, 0.0);
  for (int i = 0; i < system.N; ++i) {
    Gather g;
    for (std::size_t j = 0; j < m; ++j) {
      double y = grid.nodes[j];
      double d = system.g_prime(i, y);
      g.add(system.g(i, y), d * std::log(1.0 / d), m, h);
    }
    k.hermite_accumulate(g.view(), grid.values.data(), slopes.data(), integrand.data());
  }
  return k.dot(weights.data(), integrand.data(), m) / std::log(static_cast<double>(system.N));
}

}  // namespace gdm
