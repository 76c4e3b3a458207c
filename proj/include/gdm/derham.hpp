#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gdm/rational.hpp"
#include "gdm/symbolic.hpp"
#include "gdm/systems.hpp"

namespace gdm {

/// Phi(A; z) = (a z + b) / (c z + d).
struct LftMatrix {
  Rational a, b, c, d;

  Rational det() const { return a * d - b * c; }
  LftMatrix operator*(const LftMatrix& rhs) const;
  friend bool operator==(const LftMatrix&, const LftMatrix&) = default;
};

/// Extended real endpoint; `exact` is present when the value is rational.
struct Endpoint {
  double value = 0.0;
  bool infinite = false;
  std::optional<Rational> exact;
};

struct DeRhamSystem {
  std::string label;
  int N = 2;
  std::vector<LftMatrix> matrices;  // normalized to d = 1
  bool A1 = false, A2 = false, A3 = false, sA3 = false;
  std::vector<bool> weak_contraction;
  std::vector<int> zero_b_plus_c;  // indices i < N-1 with b_i + c_i = 0
  Endpoint alpha, beta;

  bool a0_is_one() const { return matrices[0].a == 1; }

  /// Defining form of G_k; y may be +infinity.
  double G(int k, double y, bool infinite = false) const;
  /// Telescoped form (y+1)(b_{k+1}-b_k) / ((b_{k+1} y + 1)(b_k y + 1)), b_N := 1.
  double G_telescoped(int k, double y, bool infinite = false) const;
  State H(int k, const State& y) const;
  Rational G_exact(int k, const Rational& y) const;
  ExactState G_exact_ext(int k, const ExactState& y) const;
  ExactState H_exact(int k, const ExactState& y) const;
  /// g_i(x) = Phi(A_i; x) in floating point.
  double g(int i, double x) const;
  /// g_i'(x) = det / (c x + 1)^2.
  double g_prime(int i, double x) const;
};

ExactState phi_transform(const LftMatrix& A, const ExactState& z);
Rational phi_transform(const LftMatrix& A, const Rational& z);

/// Checks (A1)-(A3), normalizes d = 1, computes (sA3), weak contraction
/// flags and the state interval. Throws Validation naming the failed
/// condition and index.
DeRhamSystem validate(const std::vector<LftMatrix>& matrices, const std::string& label = "derham_lft");

std::pair<Endpoint, Endpoint> state_interval(const DeRhamSystem& system);

/// DrivenSystem on Y = [alpha, beta] with y0 = 0.
DrivenSystem derived_system(const DeRhamSystem& system);
DrivenSystem derived_system(std::shared_ptr<const DeRhamSystem> system);

struct CurveValues {
  Rational left;   // phi at the left endpoint of the cylinder
  Rational right;  // phi at the right endpoint
  Rational mass;   // (ps - qr) / (s (r + s))
};

/// Exact curve evaluation through the matrix product A_{i1}...A_{ik}.
CurveValues curve_eval(const DeRhamSystem& system, const Word& word, std::size_t bit_budget = 4096);
/// phi(t) for an N-adic rational t in [0, 1].
Rational curve_at(const DeRhamSystem& system, const Rational& t, std::size_t bit_budget = 4096);

std::optional<Rational> detect_moebius_case(const DeRhamSystem& system);
/// (1 + c0 - a0 N) / (a0 (N - 1)), the unique zero of G_0 - 1/N when a0 != 0.
std::optional<Rational> moebius_unique_point(const DeRhamSystem& system);
Rational moebius_closed_form(const Rational& C, const Rational& x);
std::vector<LftMatrix> moebius_matrices(const Rational& C, int N);

std::vector<LftMatrix> bernoulli_equivalence_params(const std::vector<Rational>& p, const Rational& e0);
std::optional<std::vector<Rational>> is_ac_with_bernoulli(const DeRhamSystem& system);
/// c0 / (1 - a0) when a0 < 1.
std::optional<Rational> fixed_point_H0(const DeRhamSystem& system);

std::vector<LftMatrix> minkowski_matrices();
DeRhamSystem minkowski_system();
std::vector<LftMatrix> linear_matrices(const std::vector<Rational>& weights);

}  // namespace gdm
