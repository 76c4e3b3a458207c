#include "gdm/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gdm/error.hpp"
#include "gdm/kernels.hpp"
#include "gdm/parallel.hpp"
#include "gdm/rng.hpp"

namespace gdm {

namespace {

double path_entropy_average(const DrivenSystem& system, const State& y0, int n, std::uint64_t seed, std::uint64_t stream) {
  StreamRng rng(seed, stream);
  std::vector<double> p(static_cast<std::size_t>(system.N));
  State y = y0;
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    system.probabilities(y, p.data());
    total += entropy_unchecked(p);
    int sym = rng.categorical(p);
    y = system.next(sym, y);
  }
  return total / n;
}

}  // namespace

EntropyAverage entropy_average_mc(const DrivenSystem& system, const State& y0, int n, int paths, std::uint64_t seed,
                                  int threads) {
  if (n < 1 || paths < 2) throw Error(ErrorKind::Domain, "entropy_average_mc needs n >= 1 and paths >= 2");
  EntropyAverage out;
  out.n = n;
  out.paths = paths;
  out.seed = seed;
  out.per_path.assign(static_cast<std::size_t>(paths), 0.0);
  parallel_for(static_cast<std::size_t>(paths), threads, [&](std::size_t i) {
    out.per_path[i] = path_entropy_average(system, y0, n, seed, i);
  });
  double sum = 0.0;
  for (double v : out.per_path) sum += v;
  out.mean = sum / paths;
  double ss = 0.0;
  for (double v : out.per_path) ss += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(ss / (paths - 1));
  out.ci_halfwidth = 1.96 * out.sd / std::sqrt(static_cast<double>(paths));
  return out;
}

double entropy_average_exact(const DrivenSystem& system, const State& y0, int n) {
  if (n < 1) throw Error(ErrorKind::Domain, "n must be >= 1");
  double leaves = std::pow(static_cast<double>(system.N), n);
  if (leaves > 1e7) throw Error(ErrorKind::Budget, "N^n = " + format_real(leaves) + " exceeds the 1e7 enumeration budget");
  const int N = system.N;
  std::function<double(const State&, int)> walk = [&](const State& y, int remaining) -> double {
    std::vector<double> p = system.probabilities(y);
    double value = entropy_unchecked(p);
    if (remaining == 1) return value;
    for (int i = 0; i < N; ++i) {
      if (p[i] <= 0.0) continue;
      value += p[i] * walk(system.next(i, y), remaining - 1);
    }
    return value;
  };
  return walk(y0, n) / n;
}

double max_block_entropy(const DrivenSystem& system, const State& y0, int depth, int l) {
  if (l < 1 || depth < 0) throw Error(ErrorKind::Domain, "max_block_entropy needs l >= 1 and depth >= 0");
  const int N = system.N;
  std::function<double(const State&, int)> block = [&](const State& y, int remaining) -> double {
    std::vector<double> p = system.probabilities(y);
    double s = entropy_unchecked(p);
    if (remaining == 1) return s;
    double best = 0.0;
    for (int i = 0; i < N; ++i) {
      if (p[i] <= 0.0) continue;
      best = std::max(best, block(system.next(i, y), remaining - 1));
    }
    return s + best;
  };
  std::function<double(const State&, int)> walk = [&](const State& y, int remaining) -> double {
    double best = block(y, l);
    if (remaining == 0) return best;
    std::vector<double> p = system.probabilities(y);
    for (int i = 0; i < N; ++i) {
      if (p[i] <= 0.0) continue;
      best = std::max(best, walk(system.next(i, y), remaining - 1));
    }
    return best;
  };
  return walk(y0, depth);
}

DimBounds dim_bounds(double mean, double ci, const IfsGeometry& g, std::optional<double> wA_constant) {
  double scale = std::log(1.0 / g.r);
  DimBounds b;
  b.upper = (mean + ci) / scale;
  b.lower = std::max(0.0, (mean - ci) / scale);
  if (wA_constant) b.wA_floor = wA_floor(*wA_constant, g);
  return b;
}

double wA_floor(double c, const IfsGeometry& g) {
  if (!(c > 0.0 && c <= 0.5)) throw Error(ErrorKind::Domain, "(wA) constant must lie in (0, 1/2]");
  double p[2] = {c, 1.0 - c};
  return entropy_unchecked(p) / std::log(1.0 / g.r);
}

KeyDeficit key_deficit(int N, double eps0, int l, std::optional<double> c_tilde) {
  if (N < 2) throw Error(ErrorKind::Domain, "N must be >= 2");
  if (l < 1) throw Error(ErrorKind::Domain, "l must be >= 1");
  double max_eps = 2.0 * (N - 1) / N;
  if (!(eps0 > 0.0 && eps0 < max_eps)) {
    throw Error(ErrorKind::Domain, "eps0 must lie in (0, " + format_real(max_eps) + ")");
  }
  KeyDeficit out;
  out.sup_term = -1.0;
  const double u = 1.0 / N;
  for (int k = 1; k < N; ++k) {
    for (int m = 1; k + m <= N; ++m) {
      double up = u + eps0 / (2.0 * k);
      double down = u - eps0 / (2.0 * m);
      if (down < 0.0 || up > 1.0) continue;
      double s = -k * up * std::log(up) - (N - k - m) * u * std::log(u);
      if (down > 0.0) s -= m * down * std::log(down);
      if (s > out.sup_term) {
        out.sup_term = s;
        out.up = k;
        out.down = m;
      }
    }
  }
  double logN = std::log(static_cast<double>(N));
  out.cap = (l - 1) * logN + out.sup_term;
  out.block_deficit = l * logN - out.cap;
  if (c_tilde) out.eps1 = out.block_deficit * frequency_floor(*c_tilde, l) / l;
  return out;
}

double pattern_frequency(const Word& word, const Word& pattern) {
  if (pattern.empty()) return 1.0;
  const std::size_t n = word.size(), l = pattern.size();
  if (n < 10 * l) throw Error(ErrorKind::Domain, "trace shorter than 10 times the pattern length");
  std::size_t hits = 0;
  for (std::size_t i = 0; i + l <= n; ++i) {
    if (std::equal(pattern.symbols.begin(), pattern.symbols.end(), word.symbols.begin() + static_cast<std::ptrdiff_t>(i))) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n - l + 1);
}

double pattern_frequency(const MassTrace& trace, const Word& pattern) { return pattern_frequency(trace.word, pattern); }

double frequency_floor(double c_tilde, int l) { return std::pow(c_tilde, l) / 2.0; }

DimReport dim_linear(const std::vector<double>& w) {
  double total = 0.0;
  for (double v : w) {
    if (!(v > 0.0)) throw Error(ErrorKind::Domain, "weights must be strictly positive");
    total += v;
  }
  if (w.size() < 2 || std::fabs(total - 1.0) > 1e-12) throw Error(ErrorKind::Domain, "weights must sum to 1");
  DimReport r;
  r.method = "closed_form_linear";
  r.estimate = entropy_unchecked(w) / std::log(static_cast<double>(w.size()));
  r.upper_bound = r.estimate;
  r.lower_bound = r.estimate;
  r.upper_source = r.lower_source = "closed form s_N(a)/log N";
  return r;
}

DimReport dim_hata(double h_sq, double alpha_sq) {
  if (!(h_sq > 1.0)) throw Error(ErrorKind::Domain, "|h|^2 must exceed 1");
  if (!(alpha_sq > 0.0 && alpha_sq < 1.0)) throw Error(ErrorKind::Domain, "|alpha|^2 must lie in (0,1)");
  double w = 1.0 / h_sq;
  double p[2] = {w, 1.0 - w};
  DimReport r;
  r.method = "hata";
  r.estimate = entropy_unchecked(p) / (-w * std::log(alpha_sq) - (1.0 - w) * std::log(1.0 - alpha_sq));
  r.params["h_modulus_sq"] = h_sq;
  r.params["alpha_modulus_sq"] = alpha_sq;
  return r;
}

std::vector<double> kinney_samples(std::size_t samples, std::uint64_t seed, int threads) {
  const DeRhamSystem mk = minkowski_system();
  double a[2], b[2], c[2], d[2];
  for (int i = 0; i < 2; ++i) {
    a[i] = to_double(mk.matrices[i].a);
    b[i] = to_double(mk.matrices[i].b);
    c[i] = to_double(mk.matrices[i].c);
    d[i] = 1.0;
  }
  constexpr std::size_t kBatch = 1024;
  std::vector<double> x(samples, 0.0);
  std::size_t batches = (samples + kBatch - 1) / kBatch;
  const kernels::Table& k = kernels::active();
  parallel_for(batches, threads, [&](std::size_t batch) {
    std::size_t begin = batch * kBatch;
    std::size_t count = std::min(kBatch, samples - begin);
    std::vector<std::uint64_t> bits(count);
    for (std::size_t j = 0; j < count; ++j) bits[j] = StreamRng(seed, begin + j).next_u64();
    std::vector<std::int32_t> sym(count);
    double* z = x.data() + begin;
    // Innermost map is the last symbol (bit 0); the first symbol is bit 63.
    for (int t = 0; t < 64; ++t) {
      for (std::size_t j = 0; j < count; ++j) sym[j] = static_cast<std::int32_t>((bits[j] >> t) & 1U);
      k.lft_apply_select(z, sym.data(), count, a, b, c, d);
    }
  });
  return x;
}

DimReport dim_kinney_from_samples(const std::vector<double>& x) {
  if (x.size() < 2) throw Error(ErrorKind::Domain, "need at least 2 samples");
  double sum = 0.0;
  for (double v : x) sum += std::log1p(v);
  double mean = sum / static_cast<double>(x.size());
  if (!(mean > 0.0)) throw Error(ErrorKind::Domain, "mean of log(1+x) is zero: divergent Kinney estimate");
  double ss = 0.0;
  for (double v : x) {
    double dlt = std::log1p(v) - mean;
    ss += dlt * dlt;
  }
  double se = std::sqrt(ss / static_cast<double>(x.size() - 1)) / std::sqrt(static_cast<double>(x.size()));
  DimReport r;
  r.method = "kinney";
  r.estimate = std::log(2.0) / (2.0 * mean);
  r.ci_halfwidth = r.estimate * 1.96 * se / mean;
  r.params["samples"] = static_cast<double>(x.size());
  r.params["mean_log1p"] = mean;
  return r;
}

DimReport dim_kinney(std::size_t samples, std::uint64_t seed, int threads) {
  if (samples < 1000) throw Error(ErrorKind::Domain, "dim_kinney needs at least 1000 samples");
  DimReport r = dim_kinney_from_samples(kinney_samples(samples, seed, threads));
  r.params["seed"] = static_cast<double>(seed);
  return r;
}

DimReport dim_entropy_mc(const DrivenSystem& system, const State& y0, int n, int paths, std::uint64_t seed,
                         const IfsGeometry& geometry, int threads, std::optional<double> wA_constant) {
  if (n < 100 || paths < 10) throw Error(ErrorKind::Domain, "entropy_mc needs n >= 100 and paths >= 10");
  EntropyAverage avg = entropy_average_mc(system, y0, n, paths, seed, threads);
  DimBounds b = dim_bounds(avg.mean, avg.ci_halfwidth, geometry, wA_constant);
  DimReport r;
  r.method = "entropy_mc";
  double scale = std::log(1.0 / geometry.r);
  r.estimate = avg.mean / scale;
  r.ci_halfwidth = avg.ci_halfwidth / scale;
  r.upper_bound = b.upper;
  r.upper_source = "covering bound a/log(1/r), a = mean + ci";
  if (b.wA_floor) {
    r.lower_bound = std::max(b.lower, *b.wA_floor);
    r.lower_source = "max of entropy average and (wA) floor";
  } else {
    r.lower_bound = b.lower;
    r.lower_source = "mass distribution bound a/log(1/r), a = mean - ci";
  }
  r.params["n"] = n;
  r.params["paths"] = paths;
  r.params["seed"] = static_cast<double>(seed);
  r.params["r"] = geometry.r;
  r.params["mean_entropy"] = avg.mean;
  return r;
}

DimReport dim_entropy_exact(const DrivenSystem& system, const State& y0, int n, const IfsGeometry& geometry) {
  double mean = entropy_average_exact(system, y0, n);
  DimReport r;
  r.method = "entropy_exact";
  r.estimate = mean / std::log(1.0 / geometry.r);
  r.params["n"] = n;
  r.params["r"] = geometry.r;
  r.params["mean_entropy"] = mean;
  r.note = "finite-n expectation; not a certified bound";
  return r;
}

}  // namespace gdm
