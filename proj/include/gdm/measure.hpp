#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gdm/symbolic.hpp"
#include "gdm/systems.hpp"

namespace gdm {

/// One sampled (or replayed) path: states[k] is y_k, probs[k] the G vector at
/// y_k, log_mass[k] = log nu_y(I(word[0..k))), martingale[k] = M_{y,k}.
struct MassTrace {
  Word word;
  std::vector<State> states;
  std::vector<std::vector<double>> probs;
  std::vector<double> log_mass;
  std::vector<double> martingale;
};

/// nu_y(I(word)), accumulated in log space; exactly 0 through a zero branch.
double cylinder_mass(const DrivenSystem& system, const State& y0, const Word& word);
double log_cylinder_mass(const DrivenSystem& system, const State& y0, const Word& word);
/// Plain running product, the second route for the two-path check.
double cylinder_mass_direct(const DrivenSystem& system, const State& y0, const Word& word);
/// Exact rational mode, words of length <= 64.
Rational cylinder_mass_exact(const DrivenSystem& system, const ExactState& y0, const Word& word);

struct IntervalMass {
  double mass = 0.0;
  double error_bound = 0.0;  // mass of the straddling cylinder left unresolved
  bool exact = false;        // t was N-adic within the depth limit
  std::optional<Rational> exact_mass;
};

/// mu_y([0, t]) from the N-adic decomposition of [0, t].
IntervalMass interval_mass(const DrivenSystem& system, const State& y0, const Rational& t, int depth_limit);
IntervalMass interval_mass_exact(const DrivenSystem& system, const ExactState& y0, const Rational& t, int depth_limit);

struct DistributionRow {
  Rational t;
  IntervalMass value;
};

/// Uses exact arithmetic when the system supports it and y0 is exact.
std::vector<DistributionRow> distribution_function(const DrivenSystem& system, const std::vector<Rational>& grid,
                                                   int depth_limit = 64);
std::vector<Rational> dyadic_grid(int k, int base = 2);

MassTrace sample_path(const DrivenSystem& system, const State& y0, int n, std::uint64_t seed, std::uint64_t stream = 0);
/// Replays a fixed word (no sampling); symbols with zero probability give log_mass = -inf.
MassTrace replay_path(const DrivenSystem& system, const State& y0, const Word& word);
std::vector<double> martingale_trace(const MassTrace& trace);

std::string trace_csv(const DrivenSystem& system, const MassTrace& trace);
std::string distribution_csv(const std::vector<DistributionRow>& rows);

}  // namespace gdm
