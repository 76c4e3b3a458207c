#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gdm/conditions.hpp"
#include "gdm/derham.hpp"
#include "gdm/systems.hpp"

namespace gdm {

enum class SingularityVerdict { AcCertified, SingularCertified, SingularHeuristic, AcHeuristic, Inconclusive };
const char* to_string(SingularityVerdict v);

struct HellingerOptions {
  long T = 10000;
  int paths = 32;
  std::uint64_t seed = 1;
  int threads = 1;
  double growth_slope = 1e-4;  // growth when S_T - S_{T/2} >= growth_slope * T
  double tail_tolerance = 1e-3;  // summable when S_T - S_{T/2} < tail_tolerance
  double path_fraction = 0.95;
  int checkpoints = 20;
};

struct HellingerPath {
  std::vector<double> partial_sums;  // S at each checkpoint
  double tail_increment = 0.0;       // S_T - S_{T/2}
  bool grows = false;
  bool summable = false;
};

struct HellingerResult {
  std::vector<double> comparison;
  std::vector<long> checkpoints;
  std::vector<HellingerPath> paths;
  double growth_fraction = 0.0;
  double summable_fraction = 0.0;
  double mean_final = 0.0;
  double max_tail_increment = 0.0;
  SingularityVerdict verdict = SingularityVerdict::Inconclusive;
};

/// Partial sums S_T = sum_{n=1..T} (1 - sum_i sqrt(p_i G_i(y_n))) along paths
/// with X_n iid p. Heuristic only: never certifies.
HellingerResult hellinger_test(const DrivenSystem& system, const State& y0, const std::vector<double>& p,
                               const HellingerOptions& options = {});

struct SingularityReport {
  SingularityVerdict verdict = SingularityVerdict::Inconclusive;
  std::vector<double> comparison;
  std::string evidence;
  std::optional<ConditionVerdict> certificate;       // multisep2 HOLDS verdict
  std::optional<std::vector<Rational>> ac_parameters; // Bernoulli p with mu_phi ~ mu_p
  std::optional<Rational> moebius_C;                  // mu_phi ~ Lebesgue when set
  std::optional<HellingerResult> hellinger;
  std::vector<std::string> notes;
};

/// Runs (multisep2) around p; SINGULAR_CERTIFIED only on HOLDS.
SingularityReport certify_singular(const DrivenSystem& system, const State& y0, const std::vector<double>& p,
                                   const CheckOptions& opts = {});

/// Re-runs the certificate at its recorded eps0 and word.
bool verify_certificate(const DrivenSystem& system, const State& y0, const SingularityReport& report,
                        const CheckOptions& opts = {});

/// Exact classification of mu_phi for a de Rham system, optionally against a
/// given Bernoulli comparison measure.
SingularityReport classify_derham(const DeRhamSystem& system,
                                  const std::optional<std::vector<Rational>>& comparison = std::nullopt,
                                  const CheckOptions& opts = {});

}  // namespace gdm
