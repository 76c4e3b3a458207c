#include <doctest.h>

#include <cmath>

#include "gdm/derham.hpp"
#include "gdm/singularity.hpp"

using namespace gdm;

namespace {

Rational R(long p, long q = 1) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  for (const Rational& r : v) out.push_back(to_double(r));
  return out;
}

bool certified(SingularityVerdict v) {
  return v == SingularityVerdict::AcCertified || v == SingularityVerdict::SingularCertified;
}

}  // namespace

TEST_CASE("Hellinger partial sums") {
  HellingerOptions o;
  o.T = 10000;
  o.paths = 16;
  o.seed = 5;
  DrivenSystem lin = make_linear(std::vector<Rational>{R(1, 3), R(2, 3)});
  HellingerResult l = hellinger_test(lin, lin.initial, {1.0 / 3, 2.0 / 3}, o);
  for (const HellingerPath& p : l.paths) {
    for (double s : p.partial_sums) CHECK(std::fabs(s) < 1e-12);
  }
  CHECK(l.verdict == SingularityVerdict::AcHeuristic);

  DrivenSystem kus = make_kusuoka(1.0, 0.0);
  HellingerResult k = hellinger_test(kus, kus.initial, {1.0 / 3, 1.0 / 3, 1.0 / 3}, o);
  CHECK(k.verdict == SingularityVerdict::SingularHeuristic);
  for (const HellingerPath& p : k.paths) {
    CHECK(p.partial_sums.back() >= 0.01 * static_cast<double>(o.T));
    for (std::size_t i = 1; i < p.partial_sums.size(); ++i) CHECK(p.partial_sums[i] >= p.partial_sums[i - 1]);
  }

  DeRhamSystem eq = validate(bernoulli_equivalence_params({R(1, 2), R(1, 2)}, R(1)));
  DrivenSystem deq = derived_system(eq);
  HellingerResult e = hellinger_test(deq, deq.initial, {0.5, 0.5}, o);
  CHECK(e.verdict == SingularityVerdict::AcHeuristic);
  REQUIRE(e.checkpoints.size() >= 2);
  // Checkpoints include T/10 = 10^3 and T = 10^4.
  std::size_t at1000 = 0;
  for (std::size_t i = 0; i < e.checkpoints.size(); ++i) {
    if (e.checkpoints[i] == 1000) at1000 = i;
  }
  REQUIRE(e.checkpoints[at1000] == 1000);
  for (const HellingerPath& p : e.paths) CHECK(p.partial_sums.back() - p.partial_sums[at1000] < 1e-3);

  DrivenSystem three = make_toy("three_state", {{"p", R(1, 3)}});
  HellingerResult t = hellinger_test(three, three.initial, {0.5, 0.5}, o);
  CHECK(t.verdict == SingularityVerdict::Inconclusive);

  HellingerOptions shortT = o;
  shortT.T = 500;
  CHECK_THROWS(hellinger_test(lin, lin.initial, {0.5, 0.5}, shortT));
  CHECK_THROWS(hellinger_test(lin, lin.initial, {1.0, 0.0}, o));
}

TEST_CASE("Hellinger paths do not depend on thread count") {
  DrivenSystem kus = make_kusuoka(1.0, 0.0);
  HellingerOptions a, b;
  a.T = b.T = 2000;
  a.paths = b.paths = 8;
  b.threads = 3;
  HellingerResult ra = hellinger_test(kus, kus.initial, {0.2, 0.3, 0.5}, a);
  HellingerResult rb = hellinger_test(kus, kus.initial, {0.2, 0.3, 0.5}, b);
  REQUIRE(ra.paths.size() == rb.paths.size());
  for (std::size_t i = 0; i < ra.paths.size(); ++i) CHECK(ra.paths[i].partial_sums == rb.paths[i].partial_sums);
}

TEST_CASE("singularity certificates") {
  DrivenSystem adf = make_adf(0.0);
  for (int k = 1; k <= 9; k += 2) {
    double p0 = k / 10.0;
    SingularityReport r = certify_singular(adf, State{0.0}, {p0, 1 - p0});
    CHECK(r.verdict == SingularityVerdict::SingularCertified);
    REQUIRE(r.certificate.has_value());
    CHECK(verify_certificate(adf, State{0.0}, r));
  }
  DrivenSystem mk = derived_system(minkowski_system());
  for (int k = 1; k <= 9; ++k) {
    double p0 = k / 10.0;
    SingularityReport r = certify_singular(mk, State{0.0}, {p0, 1 - p0});
    CHECK(r.verdict == SingularityVerdict::SingularCertified);
    CHECK(verify_certificate(mk, State{0.0}, r));
  }
  DrivenSystem lin = make_linear(std::vector<Rational>{R(1, 3), R(2, 3)});
  SingularityReport l = certify_singular(lin, lin.initial, {1.0 / 3, 2.0 / 3});
  CHECK(l.verdict != SingularityVerdict::SingularCertified);
  CHECK_FALSE(l.certificate.has_value());

  DrivenSystem three = make_toy("three_state", {{"p", R(1, 3)}});
  CHECK(certify_singular(three, three.initial, {0.5, 0.5}).verdict == SingularityVerdict::Inconclusive);
}

TEST_CASE("de Rham classification") {
  SingularityReport m = classify_derham(validate(moebius_matrices(R(1), 2)));
  CHECK(m.verdict == SingularityVerdict::AcCertified);
  REQUIRE(m.moebius_C.has_value());
  CHECK(*m.moebius_C == R(1));

  SingularityReport mk = classify_derham(minkowski_system());
  CHECK(mk.verdict == SingularityVerdict::SingularCertified);
  CHECK_FALSE(mk.ac_parameters.has_value());

  for (auto [p0, e0] : {std::pair{R(1, 2), R(1)}, std::pair{R(1, 3), R(1, 2)}, std::pair{R(2, 5), R(3, 4)}}) {
    std::vector<Rational> p{p0, R(1) - p0};
    DeRhamSystem eq = validate(bernoulli_equivalence_params(p, e0));
    SingularityReport self = classify_derham(eq, p);
    CHECK(self.verdict == SingularityVerdict::AcCertified);
    REQUIRE(self.ac_parameters.has_value());
    CHECK(*self.ac_parameters == p);
    for (int k = 1; k <= 9; ++k) {
      std::vector<Rational> q{R(k, 10), R(10 - k, 10)};
      if (q == p) continue;
      SingularityReport other = classify_derham(eq, q);
      INFO("p0=" << p0.get_str() << " q0=" << q[0].get_str());
      CHECK(other.verdict == SingularityVerdict::SingularCertified);
      if (other.certificate) CHECK(verify_certificate(derived_system(eq), derived_system(eq).initial, other));
    }
  }
}

TEST_CASE("never both certified verdicts against the same comparison") {
  std::vector<DeRhamSystem> systems{minkowski_system(), validate(moebius_matrices(R(1), 2)),
                                    validate(linear_matrices({R(1, 3), R(2, 3)})),
                                    validate(bernoulli_equivalence_params({R(1, 2), R(1, 2)}, R(1)))};
  for (const DeRhamSystem& s : systems) {
    for (int k = 1; k <= 9; ++k) {
      std::vector<Rational> q{R(k, 10), R(10 - k, 10)};
      SingularityReport cls = classify_derham(s, q);
      DrivenSystem d = derived_system(s);
      SingularityReport cert = certify_singular(d, d.initial, to_doubles(q));
      INFO(s.label << " q0=" << q[0].get_str());
      if (cls.verdict == SingularityVerdict::AcCertified) CHECK(cert.verdict != SingularityVerdict::SingularCertified);
      if (cert.verdict == SingularityVerdict::SingularCertified) CHECK(cls.verdict != SingularityVerdict::AcCertified);
      CHECK(certified(cls.verdict) == (cls.verdict != SingularityVerdict::Inconclusive));
    }
  }
}
