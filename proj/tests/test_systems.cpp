#include <doctest.h>

#include <cmath>
#include <random>

#include "gdm/config.hpp"
#include "gdm/derham.hpp"
#include "gdm/error.hpp"
#include "gdm/systems.hpp"

using namespace gdm;

namespace {

std::vector<DrivenSystem> builtins() {
  std::vector<DrivenSystem> out;
  out.push_back(make_adf(0.0));
  out.push_back(make_kusuoka(1.0, 0.0));
  out.push_back(make_linear(std::vector<Rational>{Rational(1, 3), Rational(2, 3)}));
  out.push_back(make_hata(Rational(3), Rational(1, 2)));
  out.push_back(make_toy("l3_counterexample", {}));
  out.push_back(make_toy("fixedpoint_half", {}));
  out.push_back(make_toy("sqrt_perturbed", {{"p", Rational(3, 10)}}));
  out.push_back(make_toy("epsilon_escape", {{"eps", Rational(1, 10)}}));
  out.push_back(make_toy("three_state", {{"p", Rational(1, 3)}}));
  out.push_back(derived_system(minkowski_system()));
  out.push_back(derived_system(validate(moebius_matrices(Rational(1), 2), "moebius")));
  return out;
}

State random_state(const DrivenSystem& s, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  switch (s.space.kind) {
    case SpaceKind::Circle: {
      double t = 2 * M_PI * U(gen);
      return State{std::cos(t), std::sin(t), false};
    }
    case SpaceKind::FiniteSet:
      return State{static_cast<double>(gen() % static_cast<unsigned>(s.space.size)), 0.0, false};
    case SpaceKind::RealLine:
      return State{std::tan(M_PI * (U(gen) - 0.5)), 0.0, false};
    case SpaceKind::Interval:
      if (s.space.hi_infinite) {
        if (gen() % 50 == 0) return State{0.0, 0.0, true};
        return State{s.space.lo + std::tan(0.5 * M_PI * U(gen) * 0.999), 0.0, false};
      }
      return State{s.space.lo + (s.space.hi - s.space.lo) * U(gen), 0.0, false};
  }
  return State{};
}

}  // namespace

TEST_CASE("adf formulas") {
  DrivenSystem s = make_adf(0.0);
  auto p = s.probabilities(State{0.0});
  CHECK(p[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(s.next(0, State{0.0}).x == doctest::Approx(0.5));
  CHECK(s.next(1, State{0.0}).x == 0.0);
  StepResult r = s.evaluate_step(State{1.0}, 0);
  CHECK(r.probs[0] == doctest::Approx(0.6));
  CHECK(r.probs[1] == doctest::Approx(0.4));
  CHECK(r.next.x == doctest::Approx(1.0));
  auto ex = make_adf_exact(Rational(0));
  CHECK(ex.exact_probabilities(ExactState{Rational(0)})[0] == Rational(2, 5));
  CHECK_THROWS_AS(make_system(nlohmann::json::parse(R"({"kind":"adf","params":{"y0":"3/2"}})")), Error);
}

TEST_CASE("adf G_0 increasing with endpoints 2/5 and 3/5") {
  DrivenSystem s = make_adf(0.0);
  CHECK(std::fabs(s.probabilities(State{0.0})[0] - 0.4) < 1e-12);
  CHECK(std::fabs(s.probabilities(State{1.0})[0] - 0.6) < 1e-12);
  double prev = -1;
  for (int k = 0; k <= 1000; ++k) {
    double g = s.probabilities(State{k / 1000.0})[0];
    CHECK(g > prev);
    prev = g;
  }
}

TEST_CASE("kusuoka matrices and probabilities") {
  auto A = kusuoka_matrices();
  double sum[4] = {0, 0, 0, 0};
  for (const Mat2& m : A) {
    sum[0] += m[0] * m[0] + m[1] * m[2];
    sum[1] += m[0] * m[1] + m[1] * m[3];
    sum[2] += m[2] * m[0] + m[3] * m[2];
    sum[3] += m[2] * m[1] + m[3] * m[3];
  }
  CHECK(std::fabs(sum[0] - 0.6) <= 1e-15);
  CHECK(std::fabs(sum[1]) <= 1e-15);
  CHECK(std::fabs(sum[2]) <= 1e-15);
  CHECK(std::fabs(sum[3] - 0.6) <= 1e-15);

  DrivenSystem s = make_kusuoka(1.0, 0.0);
  auto p = s.probabilities(State{1.0, 0.0});
  CHECK(p[0] == doctest::Approx(0.6));
  CHECK(p[1] == doctest::Approx(0.2));
  CHECK(p[2] == doctest::Approx(0.2));
  StepResult r = s.evaluate_step(State{1.0, 0.0}, 0);
  CHECK(r.next.x == doctest::Approx(1.0));
  CHECK(r.next.y == doctest::Approx(0.0));
  CHECK_THROWS_AS(make_kusuoka(1.0, 0.1), Error);
}

TEST_CASE("kusuoka G range on random unit vectors") {
  DrivenSystem s = make_kusuoka(1.0, 0.0);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> U(0, 2 * M_PI);
  for (int k = 0; k < 10000; ++k) {
    double t = U(gen);
    auto p = s.probabilities(State{std::cos(t), std::sin(t)});
    for (double v : p) {
      CHECK(v >= 1.0 / 15 - 1e-12);
      CHECK(v <= 0.6 + 1e-12);
    }
  }
}

TEST_CASE("harmonic embedding") {
  const double r2 = std::sqrt(2.0), r23 = std::sqrt(2.0 / 3.0);
  auto h1 = harmonic_coordinates({0, r2, r2});
  CHECK(h1[0] == doctest::Approx(1.0));
  CHECK(h1[1] == doctest::Approx(0.0));
  auto h2 = harmonic_coordinates({0, r23, -r23});
  CHECK(h2[0] == doctest::Approx(0.0));
  CHECK(h2[1] == doctest::Approx(1.0));
  auto h3 = harmonic_coordinates({0, 2 * r2, 2 * r2});
  CHECK(h3[0] == doctest::Approx(1.0));
  CHECK_THROWS_WITH_AS(make_kusuoka_from_harmonic({1, 1, 1}), doctest::Contains("zero energy"), Error);

  std::array<double, 3> f{0.3, -1.2, 2.5};
  DrivenSystem base = make_kusuoka_from_harmonic(f);
  for (double c : {-1.0, 2.0, 10.0}) {
    DrivenSystem scaled = make_kusuoka_from_harmonic({c * f[0], c * f[1], c * f[2]});
    auto p = base.probabilities(base.initial), q = scaled.probabilities(scaled.initial);
    for (int i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(q[i]).epsilon(1e-14));
  }
}

TEST_CASE("linear systems") {
  DrivenSystem s = make_linear(std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
  for (int i = 0; i < 2; ++i) {
    StepResult r = s.evaluate_step(State{0.0}, i);
    CHECK(r.probs[0] == 0.5);
    CHECK(r.next.x == 0.0);
  }
  CHECK_THROWS_AS(make_linear(std::vector<Rational>{Rational(0), Rational(1)}), Error);
  CHECK_THROWS_AS(make_linear(std::vector<Rational>{Rational(1, 2), Rational(1, 3)}), Error);
}

TEST_CASE("toy examples") {
  DrivenSystem l3 = make_toy("l3_counterexample", {});
  auto ex = [&](const Rational& y) { return l3.exact_probabilities(ExactState{y})[0]; };
  ExactState z{Rational(1, 3)};
  CHECK(ex(z.value) == Rational(1, 2));
  ExactState z1 = l3.exact_next(0, z);
  CHECK(z1.value == Rational(2, 3));
  CHECK(ex(z1.value) == Rational(1, 2));
  ExactState z2 = l3.exact_next(0, z1);
  CHECK(z2.value == Rational(1, 2));
  CHECK(ex(z2.value) == Rational(2, 3));

  DrivenSystem sq = make_toy("sqrt_perturbed", {{"p", Rational(3, 10)}});
  State y = sq.initial;
  for (int k = 0; k < 20; ++k) {
    auto p = sq.probabilities(y);
    CHECK(p[0] == doctest::Approx(0.3).epsilon(1e-15));
    y = sq.next(k % 2, y);
  }
  CHECK_THROWS_AS(make_toy("nonsense", {}), Error);
  CHECK_THROWS_AS(make_toy("sqrt_perturbed", {{"p", Rational(3, 2)}}), Error);
  CHECK_THROWS_AS(make_toy("epsilon_escape", {{"eps", Rational(0)}}), Error);
  CHECK_THROWS_AS(make_toy("three_state", {{"p", Rational(1, 2)}}), Error);
}

TEST_CASE("state space violations are reported with the value") {
  DrivenSystem s = make_adf(0.0);
  CHECK_THROWS_WITH_AS(s.evaluate_step(State{1.5}, 0), doctest::Contains("1.5"), Error);
  CHECK_THROWS_AS(s.evaluate_step(State{0.5}, 2), Error);
}

TEST_CASE("sum-to-one and state invariance on 10^4 random states per system") {
  std::mt19937_64 gen(2024);
  for (const DrivenSystem& s : builtins()) {
    INFO(s.label);
    int checked = 0;
    for (int k = 0; k < 10000; ++k) {
      State y = random_state(s, gen);
      if (!s.space.contains(y)) continue;
      auto p = s.probabilities(y);
      double t = 0;
      for (double v : p) t += v;
      CHECK(std::fabs(t - 1.0) < 1e-10);
      for (int i = 0; i < s.N; ++i) {
        if (p[static_cast<std::size_t>(i)] == 0.0) continue;
        CHECK(s.space.contains(s.next(i, y)));
      }
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("config parsing") {
  using nlohmann::json;
  CHECK(make_system(json::parse(R"({"kind":"linear","params":{"weights":["1/3","2/3"]}})")).N == 2);
  CHECK(make_system(json::parse(R"({"kind":"toy:three_state","params":{"p":0.25}})")).label == "three_state");
  CHECK(make_system(json::parse(R"({"kind":"kusuoka","params":{"boundary":[0,1,1]}})")).N == 3);
  DrivenSystem m = make_system(json::parse(
      R"({"kind":"derham_lft","params":{"matrices":[[["1","0"],["1","1"]],[["0","1"],["-1","2"]]]}})"));
  CHECK(m.derham->matrices == minkowski_system().matrices);
  CHECK_THROWS_AS(make_system(json::parse(R"({"kind":"nope"})")), Error);
  CHECK_THROWS_AS(make_system(json::parse(R"({"kind":"linear","params":{"weights":[1,1],"x":1}})")), Error);
  CHECK_THROWS_AS(make_system_from_text("{not json"), Error);
  CHECK(json_rational(json(0.1), "x") == Rational(1, 10));
  CHECK(json_rational(json("0.09"), "x") == Rational(9, 100));
  CHECK(system_kinds().size() >= 6);
}
