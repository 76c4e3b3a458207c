#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gdm/rational.hpp"

namespace gdm {

struct DeRhamSystem;

/// Scalar states use x; S^1 states use (x, y); finite-set states store the
/// index in x. `infinite` marks the +infinity endpoint of an extended interval.
struct State {
  double x = 0.0;
  double y = 0.0;
  bool infinite = false;
};

struct ExactState {
  Rational value;
  bool infinite = false;
};

enum class SpaceKind { Interval, Circle, FiniteSet, RealLine };

struct StateSpace {
  SpaceKind kind = SpaceKind::Interval;
  double lo = 0.0;
  double hi = 1.0;
  bool hi_infinite = false;
  int size = 0;  // FiniteSet cardinality

  bool contains(const State& s, double tol = 1e-10) const;
  std::string describe() const;
  bool scalar() const { return kind != SpaceKind::Circle; }
};

struct StepResult {
  std::vector<double> probs;
  State next;
};

/// The driving data (N, Y, G, H) of a family of measures. Immutable after
/// construction; evaluators are pure and may be shared across threads.
struct DrivenSystem {
  std::string kind;
  std::string label;
  int N = 2;
  StateSpace space;
  State initial;
  std::optional<ExactState> exact_initial;

  std::function<void(const State&, double*)> probs_fn;
  std::function<State(int, const State&)> map_fn;
  std::function<void(const ExactState&, Rational*)> exact_probs_fn;
  std::function<ExactState(int, const ExactState&)> exact_map_fn;

  std::shared_ptr<const DeRhamSystem> derham;     // set for de Rham kinds
  std::vector<double> constant_weights;            // set when G does not depend on y
  std::map<std::string, std::string> parameters;   // canonical echo of the config

  void check_state(const State& y) const;
  /// Checked G vector (state membership, entries in [0,1], sum 1 within 1e-10).
  void probabilities(const State& y, double* out) const;
  std::vector<double> probabilities(const State& y) const;
  /// Checked H_i(y).
  State next(int i, const State& y) const;
  StepResult evaluate_step(const State& y, int i) const;

  bool has_exact() const { return static_cast<bool>(exact_probs_fn) && static_cast<bool>(exact_map_fn); }
  std::vector<Rational> exact_probabilities(const ExactState& y) const;
  ExactState exact_next(int i, const ExactState& y) const;

  State to_state(const ExactState& y) const;
  std::string repr(const State& y) const;
};

using Mat2 = std::array<double, 4>;  // row-major

std::array<Mat2, 3> kusuoka_matrices();

DrivenSystem make_adf(double y0);
DrivenSystem make_adf_exact(const Rational& y0);
DrivenSystem make_kusuoka(double y0x, double y0y);
/// Values at the three boundary vertices q0, q1, q2.
DrivenSystem make_kusuoka_from_harmonic(const std::array<double, 3>& boundary_values);
std::array<double, 2> harmonic_coordinates(const std::array<double, 3>& boundary_values);
DrivenSystem make_linear(const std::vector<Rational>& weights);
DrivenSystem make_linear(const std::vector<double>& weights);
DrivenSystem make_hata(const Rational& h_modulus_sq, const Rational& alpha_modulus_sq);

/// l3_counterexample, fixedpoint_half, sqrt_perturbed (p), epsilon_escape (eps), three_state (p).
DrivenSystem make_toy(const std::string& name, const std::map<std::string, Rational>& params);
std::vector<std::string> toy_names();

}  // namespace gdm
