#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gdm/rational.hpp"

namespace oracle {

/// Minkowski ?(x) for rational x in [0,1] from the continued fraction
/// x = [0; a1, a2, ...]: ?(x) = 2 * sum_k (-1)^(k+1) 2^-(a1+...+ak).
gdm::Rational question_mark(const gdm::Rational& x);

/// ?^{-1}(t) for a dyadic t in [0,1] by walking the Stern-Brocot tree.
gdm::Rational stern_brocot_inverse(const gdm::Rational& t);

/// In-order Stern-Brocot fractions p/q with ?(p/q) = j / 2^depth, j = 0..2^depth.
std::vector<std::pair<std::int64_t, std::int64_t>> stern_brocot_points(int depth);

/// int log(1+x) d?(x) by trapezoid sums over the depth-`depth` cells of d?,
/// each of mass 2^-depth. Returns {lower, upper} Riemann sums.
std::pair<double, double> kinney_integral(int depth);

/// -sum p ln p written out directly.
double plain_entropy(const std::vector<double>& p);

/// sup { s_N(p) : sum_j |p_j - 1/N| >= eps0 } by simplex grid search at the
/// given resolution followed by pairwise local refinement on the l1 sphere.
double simplex_entropy_sup(int N, double eps0, int grid);

/// x / (1 - C (x - 1)).
gdm::Rational moebius_f(const gdm::Rational& C, const gdm::Rational& x);

}  // namespace oracle
