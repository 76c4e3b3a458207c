#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <functional>
#include <random>

#include "gdm/derham.hpp"
#include "gdm/error.hpp"
#include "gdm/measure.hpp"
#include "gdm/symbolic.hpp"
#include "oracles.hpp"

using namespace gdm;

namespace {

Rational R(long p, long q = 1) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

std::vector<DrivenSystem> builtins() {
  std::vector<DrivenSystem> out;
  out.push_back(make_adf(0.0));
  out.push_back(make_kusuoka(1.0, 0.0));
  out.push_back(make_linear(std::vector<Rational>{R(1, 3), R(2, 3)}));
  out.push_back(make_toy("l3_counterexample", {}));
  out.push_back(make_toy("fixedpoint_half", {}));
  out.push_back(make_toy("sqrt_perturbed", {{"p", R(3, 10)}}));
  out.push_back(make_toy("epsilon_escape", {{"eps", R(1, 10)}}));
  out.push_back(make_toy("three_state", {{"p", R(1, 3)}}));
  out.push_back(derived_system(minkowski_system()));
  out.push_back(derived_system(validate(moebius_matrices(R(1), 2))));
  return out;
}

void for_words(int N, int len, const std::function<void(const Word&)>& f) {
  std::vector<int> d(static_cast<std::size_t>(len), 0);
  while (true) {
    f(Word(d, N));
    int k = len - 1;
    while (k >= 0 && d[static_cast<std::size_t>(k)] == N - 1) d[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) return;
    ++d[static_cast<std::size_t>(k)];
  }
}

}  // namespace

TEST_CASE("cylinder mass examples") {
  for (const DrivenSystem& s : builtins()) CHECK(cylinder_mass(s, s.initial, Word({}, s.N)) == 1.0);
  DrivenSystem adf = make_adf_exact(R(0));
  CHECK(cylinder_mass_exact(adf, ExactState{R(0)}, parse_word("0", 2)) == R(2, 5));
  CHECK(cylinder_mass(adf, State{0.0}, parse_word("0", 2)) == doctest::Approx(0.4));
  DrivenSystem mk = derived_system(minkowski_system());
  CHECK(cylinder_mass_exact(mk, ExactState{R(0)}, parse_word("00", 2)) == R(1, 3));
  DrivenSystem lin = make_linear(std::vector<Rational>{R(1, 3), R(2, 3)});
  CHECK(cylinder_mass_exact(lin, ExactState{R(0)}, parse_word("01", 2)) == R(2, 9));
}

TEST_CASE("zero branches give exactly zero mass") {
  DrivenSystem s = make_toy("epsilon_escape", {{"eps", R(1, 10)}});
  // y = 1/4 -> H_1 gives 5/2, where G_0 = 0.
  Word w = parse_word("10", 2);
  CHECK(cylinder_mass(s, s.initial, w) == 0.0);
  CHECK(cylinder_mass_exact(s, *s.exact_initial, w) == 0);
  CHECK(std::isinf(log_cylinder_mass(s, s.initial, w)));
}

TEST_CASE("interval masses") {
  DrivenSystem adf = make_adf_exact(R(0));
  IntervalMass half = interval_mass_exact(adf, ExactState{R(0)}, R(1, 2), 64);
  CHECK(half.exact);
  CHECK(*half.exact_mass == R(2, 5));
  CHECK(*interval_mass_exact(adf, ExactState{R(0)}, R(1), 64).exact_mass == 1);
  DrivenSystem lin = make_linear(std::vector<Rational>{R(1, 3), R(2, 3)});
  CHECK(*interval_mass_exact(lin, ExactState{R(0)}, R(3, 4), 64).exact_mass == R(5, 9));
  IntervalMass third = interval_mass(lin, State{0.0}, R(1, 3), 20);
  CHECK(!third.exact);
  CHECK(third.error_bound > 0);
  CHECK(third.error_bound < 1e-3);
  double truth = 0.0;  // 1/3 = 0.010101..._2 under (1/3, 2/3) weights: geometric series
  double run = 1.0;
  for (int k = 0; k < 60; ++k) {
    if (k % 2 == 1) truth += run * (1.0 / 3);
    run *= (k % 2 == 0) ? 1.0 / 3 : 2.0 / 3;
  }
  CHECK(std::fabs(third.mass - truth) <= third.error_bound + 1e-15);
}

TEST_CASE("distribution functions") {
  DrivenSystem adf = make_adf_exact(R(0));
  auto rows = distribution_function(adf, {R(0), R(1, 2), R(1)});
  CHECK(*rows[0].value.exact_mass == 0);
  CHECK(*rows[1].value.exact_mass == R(2, 5));
  CHECK(*rows[2].value.exact_mass == 1);
  DrivenSystem mo = derived_system(validate(moebius_matrices(R(1), 2)));
  for (const auto& row : distribution_function(mo, dyadic_grid(6))) {
    CHECK(*row.value.exact_mass == oracle::moebius_f(R(1), row.t));
  }
  for (const DrivenSystem& s : builtins()) {
    auto grid = dyadic_grid(5, 2);
    grid.push_back(R(1, 3));
    std::sort(grid.begin(), grid.end());
    double prev = -1;
    for (const auto& row : distribution_function(s, grid, 30)) {
      CHECK(row.value.mass >= prev - 1e-15);
      prev = row.value.mass;
    }
  }
}

TEST_CASE("additivity, total mass, and two-route agreement") {
  for (const DrivenSystem& s : builtins()) {
    INFO(s.label);
    int maxlen = s.N == 3 ? 5 : 8;
    for (int len = 0; len <= maxlen; ++len) {
      double total = 0.0;
      for_words(s.N, len, [&](const Word& w) {
        double m = cylinder_mass(s, s.initial, w);
        if (len <= 6) total += m;
        double children = 0.0;
        for (int i = 0; i < s.N; ++i) children += cylinder_mass(s, s.initial, w.appended(i));
        CHECK(std::fabs(m - children) <= 1e-12);
        CHECK(std::fabs(m - cylinder_mass_direct(s, s.initial, w)) <= 1e-12);
      });
      if (len <= 6) CHECK(std::fabs(total - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("matrix formula agrees with the recursion in floating point") {
  DeRhamSystem m = minkowski_system();
  DrivenSystem d = derived_system(m);
  std::mt19937_64 gen(9);
  for (int k = 0; k < 500; ++k) {
    std::vector<int> s(1 + gen() % 20);
    for (int& v : s) v = static_cast<int>(gen() % 2);
    Word w(s, 2);
    CHECK(std::fabs(to_double(curve_eval(m, w).mass) - cylinder_mass(d, State{0.0}, w)) <= 1e-12);
  }
}

TEST_CASE("sampling") {
  DrivenSystem lin = make_linear(std::vector<double>{0.5, 0.5});
  MassTrace t = sample_path(lin, lin.initial, 10000, 42);
  long zeros = std::count(t.word.symbols.begin(), t.word.symbols.end(), 0);
  CHECK(zeros >= 4500);
  CHECK(zeros <= 5500);
  MassTrace again = sample_path(lin, lin.initial, 10000, 42);
  CHECK(again.word == t.word);
  CHECK(sample_path(lin, lin.initial, 100, 42, 1).word != sample_path(lin, lin.initial, 100, 42, 2).word);

  DrivenSystem sq = make_toy("sqrt_perturbed", {{"p", R(3, 10)}});
  MassTrace ts = sample_path(sq, sq.initial, 500, 1);
  for (const auto& p : ts.probs) {
    CHECK(p[0] == 0.3);
    CHECK(p[1] == 0.7);
  }
  for (const DrivenSystem& s : builtins()) {
    MassTrace tr = sample_path(s, s.initial, 200, 5);
    CHECK(tr.martingale[0] == 0.0);
    CHECK(std::fabs(std::exp(tr.log_mass.back()) - cylinder_mass(s, s.initial, tr.word)) <= 1e-10);
    double acc = 0.0;
    for (std::size_t k = 0; k < tr.word.size(); ++k) acc += std::log(tr.probs[k][static_cast<std::size_t>(tr.word[k])]);
    CHECK(tr.log_mass.back() == doctest::Approx(acc).epsilon(1e-12));
  }
}

TEST_CASE("martingale increments have mean zero on the linear system") {
  DrivenSystem lin = make_linear(std::vector<Rational>{R(1, 3), R(2, 3)});
  const int paths = 1000, n = 50;
  std::vector<double> finals;
  for (int k = 0; k < paths; ++k) finals.push_back(sample_path(lin, lin.initial, n, 77, static_cast<std::uint64_t>(k)).martingale.back() / n);
  double mean = 0, ss = 0;
  for (double v : finals) mean += v;
  mean /= paths;
  for (double v : finals) ss += (v - mean) * (v - mean);
  double se = std::sqrt(ss / (paths - 1)) / std::sqrt(static_cast<double>(paths));
  CHECK(std::fabs(mean) <= 3 * se);
}

TEST_CASE("martingale trace rejects impossible symbols") {
  DrivenSystem s = make_toy("epsilon_escape", {{"eps", R(1, 10)}});
  MassTrace t = replay_path(s, s.initial, parse_word("10", 2));
  CHECK_THROWS_AS(martingale_trace(t), Error);
}

TEST_CASE("csv layouts") {
  DrivenSystem lin = make_linear(std::vector<Rational>{R(1, 3), R(2, 3)});
  std::string csv = trace_csv(lin, sample_path(lin, lin.initial, 3, 1));
  CHECK(csv.rfind("n,symbol,state_repr,p_0,p_1,log_mass,M_n\n", 0) == 0);
  std::string d = distribution_csv(distribution_function(lin, dyadic_grid(1)));
  CHECK(d.rfind("t,phi", 0) == 0);
}
