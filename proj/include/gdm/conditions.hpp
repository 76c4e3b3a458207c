#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gdm/symbolic.hpp"
#include "gdm/systems.hpp"

namespace gdm {

enum class Status { Holds, Fails, Unknown };
const char* to_string(Status s);

struct CheckOptions {
  int depth = 12;
  double margin = 1e-6;         // delta_margin
  double dedup = 1e-9;          // epsilon_dedup
  double eps_fail = 1e-3;       // boundary proximity that counts as failure
  double magnitude_cap = 1e6;   // orbit states beyond this are not expanded
  int chain_root_depth = 3;
  int chain_steps = 4096;
  std::size_t max_states = 100000;
};

struct OrbitNode {
  State state;
  int parent = -1;
  int symbol = -1;
  int depth = 0;
  std::vector<int> children;  // child index per symbol after dedup, -1 if unexpanded
};

/// Breadth-first approximation of the tree orbit Y(y), root included.
struct OrbitApproximation {
  State root;
  int depth = 0;            // deepest fully expanded level
  double dedup_tolerance = 0.0;
  bool capped = false;      // some state exceeded the magnitude cap
  bool truncated = false;   // max_states reached before the requested depth
  std::vector<OrbitNode> nodes;

  Word path_to(int node, int alphabet_size) const;
};

OrbitApproximation orbit(const DrivenSystem& system, const State& y, int depth, const CheckOptions& opts = {});

/// Replayable evidence: start at the root, follow `path` to a state z, then
/// (optionally) apply `word`. `values` is G(z), `values_after` is G(H_word z).
struct Witness {
  Word path;
  Word word;
  int symbol = -1;  // for (A)/(wA): the index of the G_i at the boundary
  double eps0 = 0.0;           // box half-width for B/sB/multisep2 witnesses
  std::vector<double> center;  // box centre for B/sB/multisep2 witnesses
  std::vector<double> values;
  std::vector<double> values_after;
  std::string description;
};

struct Resolution {
  int depth = 0;
  std::size_t states = 0;
  double margin = 0.0;
  std::vector<double> eps0_grid;
  std::vector<int> l_grid;
};

struct ConditionVerdict {
  std::string condition;
  Status status = Status::Unknown;
  std::vector<Witness> witnesses;
  std::vector<double> inf, sup;  // per G_i over the explored states
  Resolution resolution;
  std::optional<double> eps0;     // the (eps0, l, word) that decided the verdict
  std::optional<int> l;
  std::optional<Word> word;
  std::vector<double> target;     // box centre (1/N for B, p for multisep2)
  std::string note;
};

ConditionVerdict check_A(const DrivenSystem& system, const State& y, const CheckOptions& opts = {});
ConditionVerdict check_wA(const DrivenSystem& system, const State& y, const CheckOptions& opts = {});

/// eps0 / l fixed when given, otherwise searched over default_eps0_grid and l in {1,2,3}.
ConditionVerdict check_B(const DrivenSystem& system, const State& y, std::optional<double> eps0 = std::nullopt,
                         std::optional<int> l = std::nullopt, const CheckOptions& opts = {});
ConditionVerdict check_sB(const DrivenSystem& system, const State& y, std::optional<double> eps0 = std::nullopt,
                          std::optional<int> l = std::nullopt, const CheckOptions& opts = {});
/// Box centred at target_p. With no word, all words of length 1..3 are tried.
ConditionVerdict check_multisep2(const DrivenSystem& system, const State& y, const std::vector<double>& target_p,
                                 std::optional<double> eps0 = std::nullopt, std::optional<Word> word = std::nullopt,
                                 const CheckOptions& opts = {});

std::vector<double> default_eps0_grid(double scale);

/// Replays a witness through evaluate_step; true when every stored value
/// reproduces within `tol`.
bool verify_witness(const DrivenSystem& system, const State& root, const Witness& witness, double tol = 1e-10);
/// Replays and checks the verdict's claim (boundary proximity for A/wA, box
/// membership for B/sB/multisep2).
bool verify_verdict(const DrivenSystem& system, const State& root, const ConditionVerdict& verdict,
                    double tol = 1e-10);

struct KigamiLevel {
  int m = 0;
  std::size_t cells = 0;
  double max_diam_ratio = 0.0;  // max diam(K_w) / (c1 r^m)
  int max_overlap = 0;          // max #cells meeting B(x, r^m) over sampled x
};

struct KigamiReport {
  IfsGeometry geometry;
  std::vector<KigamiLevel> levels;
  bool diameter_ok = false;
  bool overlap_ok = false;
};

KigamiReport verify_kigami(const IfsGeometry& geometry, int max_depth);

}  // namespace gdm
