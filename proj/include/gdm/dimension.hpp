#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gdm/derham.hpp"
#include "gdm/measure.hpp"
#include "gdm/symbolic.hpp"
#include "gdm/systems.hpp"

namespace gdm {

struct DimReport {
  std::string method;  // entropy_mc, entropy_exact, closed_form_linear, kinney, hata, fan_lau
  double estimate = 0.0;
  double ci_halfwidth = 0.0;
  std::optional<double> upper_bound;
  std::optional<double> lower_bound;
  std::string upper_source;
  std::string lower_source;
  std::map<std::string, double> params;
  std::string note;
};

struct EntropyAverage {
  double mean = 0.0;
  double ci_halfwidth = 0.0;  // 1.96 * sd / sqrt(paths)
  double sd = 0.0;
  int n = 0;
  int paths = 0;
  std::uint64_t seed = 0;
  std::vector<double> per_path;
};

/// Cesaro average (1/n) sum_{k<n} s_N(p_k) along nu_y-sampled paths. Path i
/// draws from stream i of `seed`, so the result is independent of `threads`.
EntropyAverage entropy_average_mc(const DrivenSystem& system, const State& y0, int n, int paths, std::uint64_t seed,
                                  int threads = 1);
/// E[(1/n) sum_{k<n} s_N(p_k)] by full-tree enumeration; N^n <= 1e7.
double entropy_average_exact(const DrivenSystem& system, const State& y0, int n);
/// Largest sum of l consecutive step entropies over every state reachable
/// within `depth` steps (deterministic block check for (sB)).
double max_block_entropy(const DrivenSystem& system, const State& y0, int depth, int l);

struct DimBounds {
  double upper = 0.0;
  double lower = 0.0;
  std::optional<double> wA_floor;
};

DimBounds dim_bounds(double mean_entropy, double ci_halfwidth, const IfsGeometry& geometry,
                     std::optional<double> wA_constant = std::nullopt);
/// s_2(c, 1-c) / log(1/r).
double wA_floor(double c, const IfsGeometry& geometry);

struct KeyDeficit {
  double sup_term = 0.0;        // sup { s_N(p) : sum |p_j - 1/N| >= eps0 }
  int up = 0, down = 0;         // maximizer support: coordinates raised / lowered
  double cap = 0.0;             // (l-1) log N + sup_term
  double block_deficit = 0.0;   // l log N - cap
  std::optional<double> eps1;   // block_deficit * c^l / (2 l) when c is supplied
};

/// Valid for eps0 in (0, 2(N-1)/N); the paper's lemma uses eps0 < 1/N.
KeyDeficit key_deficit(int N, double eps0, int l, std::optional<double> c_tilde = std::nullopt);

/// Fraction of positions where `pattern` starts, over n - l + 1 positions.
double pattern_frequency(const Word& word, const Word& pattern);
double pattern_frequency(const MassTrace& trace, const Word& pattern);
double frequency_floor(double c_tilde, int l);

DimReport dim_linear(const std::vector<double>& weights);
DimReport dim_hata(double h_modulus_sq, double alpha_modulus_sq);

/// Draws x = g_{i1}(...g_{i64}(0)) on the Minkowski system with uniform bits.
std::vector<double> kinney_samples(std::size_t samples, std::uint64_t seed, int threads = 1);
DimReport dim_kinney_from_samples(const std::vector<double>& x);
DimReport dim_kinney(std::size_t samples, std::uint64_t seed, int threads = 1);

/// entropy_mc estimate with Lemma 2.5/2.8 style bounds on the given geometry.
DimReport dim_entropy_mc(const DrivenSystem& system, const State& y0, int n, int paths, std::uint64_t seed,
                         const IfsGeometry& geometry, int threads = 1, std::optional<double> wA_constant = std::nullopt);
DimReport dim_entropy_exact(const DrivenSystem& system, const State& y0, int n, const IfsGeometry& geometry);

}  // namespace gdm
