#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gdm/error.hpp"
#include "gdm/symbolic.hpp"
#include "oracles.hpp"

using namespace gdm;

TEST_CASE("project maps words to left endpoints") {
  CHECK(project(parse_word("0", 2)) == 0);
  CHECK(project(parse_word("1", 2)) == Rational(1, 2));
  CHECK(project(parse_word("01", 2)) == Rational(1, 4));
  CHECK_THROWS_AS(project(Word({}, 2)), Error);
  try {
    project(Word({}, 2));
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("no point address") != std::string::npos);
  }
}

TEST_CASE("cylinder intervals") {
  NadicInterval whole = cylinder_interval(Word({}, 3));
  CHECK(whole.depth == 0);
  CHECK(whole.left() == 0);
  CHECK(whole.right() == 1);
  NadicInterval two = cylinder_interval(parse_word("2", 3));
  CHECK(two.left() == Rational(2, 3));
  CHECK(two.right() == 1);
  NadicInterval ten = cylinder_interval(parse_word("10", 2));
  CHECK(ten.left() == Rational(1, 2));
  CHECK(ten.right() == Rational(3, 4));
}

TEST_CASE("commute identity and nesting on random words") {
  std::mt19937_64 gen(7);
  for (int N : {2, 3, 5}) {
    std::uniform_int_distribution<int> sym(0, N - 1), len(1, 30);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<int> s(static_cast<std::size_t>(len(gen)));
      for (int& v : s) v = sym(gen);
      Word w(s, N);
      int i = sym(gen);
      std::vector<int> iw{i};
      iw.insert(iw.end(), s.begin(), s.end());
      CHECK(project(Word(iw, N)) == (project(w) + i) / N);
      NadicInterval outer = cylinder_interval(w);
      CHECK(outer.left() == project(w));
      CHECK(outer.contains(cylinder_interval(w.appended(i))));
    }
  }
}

TEST_CASE("entropy values and guards") {
  CHECK(entropy(std::vector<double>{0.5, 0.5}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(entropy(std::vector<double>{1.0, 0.0}) == 0.0);
  CHECK(entropy(std::vector<double>{1.0 / 3, 2.0 / 3}) == doctest::Approx(0.636514168294813).epsilon(1e-12));
  CHECK_THROWS_AS(entropy(std::vector<double>{0.5, 0.6}), Error);
}

TEST_CASE("entropy is concave and permutation invariant") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto random_prob = [&](int N) {
    std::vector<double> p(static_cast<std::size_t>(N));
    double t = 0;
    for (double& v : p) t += (v = -std::log(U(gen) + 1e-300));
    for (double& v : p) v /= t;
    return p;
  };
  for (int trial = 0; trial < 500; ++trial) {
    int N = 2 + trial % 4;
    auto p = random_prob(N), q = random_prob(N);
    double t = U(gen);
    std::vector<double> mix(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) mix[k] = t * p[k] + (1 - t) * q[k];
    CHECK(entropy_unchecked(mix) >= t * entropy_unchecked(p) + (1 - t) * entropy_unchecked(q) - 1e-12);
    CHECK(entropy_unchecked(p) == doctest::Approx(oracle::plain_entropy(p)).epsilon(1e-13));
    CHECK(entropy_unchecked(p) <= std::log(static_cast<double>(N)) + 1e-12);
    auto r = p;
    std::reverse(r.begin(), r.end());
    std::sort(r.begin(), r.end());
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    CHECK(entropy_unchecked(r) == entropy_unchecked(sorted));
  }
}

TEST_CASE("geometry constants") {
  CHECK(geometry_constants("interval", 2).r == 0.5);
  CHECK(geometry_constants("interval:3").r == doctest::Approx(1.0 / 3));
  CHECK(geometry_constants("gasket").r == 0.5);
  CHECK(geometry_constants("carpet").r == doctest::Approx(1.0 / 3));
  CHECK(geometry_constants("interval", 2).D == 3);
  CHECK_THROWS_AS(geometry_constants("koch"), Error);
}

TEST_CASE("interval overlap count is 3 by enumeration") {
  // Ball B(x, 2^-m) meets at most 3 dyadic intervals of depth m; check all
  // centres on a 4x finer grid, including cell endpoints.
  for (int m = 1; m <= 10; ++m) {
    const double h = std::ldexp(1.0, -m);
    const long cells = 1L << m;
    int worst = 0;
    for (long j = 0; j <= 4 * cells; ++j) {
      double x = j * h / 4;
      int hit = 0;
      for (long k = 0; k < cells; ++k) {
        double lo = k * h, hi = (k + 1) * h;
        double dist = x < lo ? lo - x : (x > hi ? x - hi : 0.0);
        if (dist < h) ++hit;
      }
      worst = std::max(worst, hit);
    }
    CHECK(worst <= 3);
    if (m >= 2) CHECK(worst == 3);
  }
}
