#include "gdm/singularity.hpp"

#include <algorithm>
#include <cmath>

#include "gdm/error.hpp"
#include "gdm/parallel.hpp"
#include "gdm/rng.hpp"

namespace gdm {

const char* to_string(SingularityVerdict v) {
  switch (v) {
    case SingularityVerdict::AcCertified: return "AC_CERTIFIED";
    case SingularityVerdict::SingularCertified: return "SINGULAR_CERTIFIED";
    case SingularityVerdict::SingularHeuristic: return "SINGULAR_HEURISTIC";
    case SingularityVerdict::AcHeuristic: return "AC_HEURISTIC";
    case SingularityVerdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

namespace {

void check_comparison(const DrivenSystem& system, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != system.N) {
    throw Error(ErrorKind::Config, "comparison vector has " + std::to_string(p.size()) + " entries, expected " +
                                       std::to_string(system.N));
  }
  double total = 0.0;
  for (double v : p) {
    if (!(v > 0.0 && v < 1.0)) throw Error(ErrorKind::Domain, "comparison probabilities must lie in (0,1)");
    total += v;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw Error(ErrorKind::Domain, "comparison probabilities must sum to 1");
}

std::vector<long> make_checkpoints(long T, int count) {
  std::vector<long> out;
  for (int k = 1; k <= count; ++k) {
    long t = T * k / count;
    if (t >= 1 && (out.empty() || out.back() != t)) out.push_back(t);
  }
  if (std::find(out.begin(), out.end(), T / 2) == out.end()) {
    out.push_back(T / 2);
    std::sort(out.begin(), out.end());
  }
  return out;
}

}  // namespace

HellingerResult hellinger_test(const DrivenSystem& system, const State& y0, const std::vector<double>& p,
                               const HellingerOptions& opt) {
  check_comparison(system, p);
  if (opt.T < 1000 || opt.paths < 1) throw Error(ErrorKind::Config, "hellinger_test needs T >= 1000 and paths >= 1");
  HellingerResult res;
  res.comparison = p;
  res.checkpoints = make_checkpoints(opt.T, opt.checkpoints);
  res.paths.resize(static_cast<std::size_t>(opt.paths));
  std::vector<double> sqrt_p(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) sqrt_p[i] = std::sqrt(p[i]);

  parallel_for(res.paths.size(), opt.threads, [&](std::size_t path) {
    StreamRng rng(opt.seed, path);
    std::vector<double> g(static_cast<std::size_t>(system.N));
    HellingerPath& out = res.paths[path];
    State y = y0;
    double s = 0.0, half = 0.0;
    std::size_t next_cp = 0;
    for (long n = 1; n <= opt.T; ++n) {
      y = system.next(rng.categorical(p), y);
      system.probabilities(y, g.data());
      double affinity = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) affinity += sqrt_p[i] * std::sqrt(g[i]);
      s += std::max(0.0, 1.0 - affinity);
      if (n == opt.T / 2) half = s;
      if (next_cp < res.checkpoints.size() && res.checkpoints[next_cp] == n) {
        out.partial_sums.push_back(s);
        ++next_cp;
      }
    }
    out.tail_increment = s - half;
    out.grows = out.tail_increment >= opt.growth_slope * static_cast<double>(opt.T);
    out.summable = out.tail_increment < opt.tail_tolerance;
  });

  std::size_t grows = 0, summable = 0;
  double total = 0.0;
  for (const HellingerPath& hp : res.paths) {
    grows += hp.grows ? 1 : 0;
    summable += hp.summable ? 1 : 0;
    total += hp.partial_sums.back();
    res.max_tail_increment = std::max(res.max_tail_increment, hp.tail_increment);
  }
  const double n = static_cast<double>(res.paths.size());
  res.growth_fraction = static_cast<double>(grows) / n;
  res.summable_fraction = static_cast<double>(summable) / n;
  res.mean_final = total / n;
  if (res.growth_fraction >= opt.path_fraction) {
    res.verdict = SingularityVerdict::SingularHeuristic;
  } else if (res.summable_fraction >= opt.path_fraction) {
    res.verdict = SingularityVerdict::AcHeuristic;
  } else {
    res.verdict = SingularityVerdict::Inconclusive;
  }
  return res;
}

SingularityReport certify_singular(const DrivenSystem& system, const State& y0, const std::vector<double>& p,
                                   const CheckOptions& opts) {
  check_comparison(system, p);
  SingularityReport rep;
  rep.comparison = p;
  ConditionVerdict v = check_multisep2(system, y0, p, std::nullopt, std::nullopt, opts);
  if (v.status == Status::Holds) {
    rep.verdict = SingularityVerdict::SingularCertified;
    rep.evidence = "(multisep2) holds at eps0 = " + format_real(*v.eps0) + " with word " + v.word->str();
  } else {
    rep.verdict = SingularityVerdict::Inconclusive;
    rep.evidence = std::string("(multisep2) ") + to_string(v.status) + "; no certificate";
    return rep;
  }
  rep.certificate = std::move(v);
  return rep;
}

bool verify_certificate(const DrivenSystem& system, const State& y0, const SingularityReport& report,
                        const CheckOptions& opts) {
  if (report.verdict != SingularityVerdict::SingularCertified || !report.certificate) return false;
  const ConditionVerdict& c = *report.certificate;
  if (c.condition != "multisep2" || c.status != Status::Holds || !c.eps0 || !c.word) return false;
  ConditionVerdict again = check_multisep2(system, y0, report.comparison, c.eps0, c.word, opts);
  return again.status == Status::Holds;
}

namespace {

std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const Rational& r : v) out.push_back(to_double(r));
  return out;
}

std::string identity_failure(const DeRhamSystem& system) {
  if (system.a0_is_one()) return "a_0 = 1, so H_0 has no fixed point in [0,1) and no Bernoulli parameters fit";
  return "recovered Bernoulli parameters do not reproduce the matrices";
}

}  // namespace

SingularityReport classify_derham(const DeRhamSystem& system, const std::optional<std::vector<Rational>>& comparison,
                                  const CheckOptions& opts) {
  SingularityReport rep;
  rep.moebius_C = detect_moebius_case(system);
  if (rep.moebius_C) {
    rep.notes.push_back("mu_phi is equivalent to Lebesgue measure; phi(x) = x / (1 - C (x - 1)) with C = " +
                        to_string(*rep.moebius_C));
  } else {
    rep.notes.push_back("mu_phi is singular to Lebesgue measure (dim < 1)");
  }
  rep.ac_parameters = is_ac_with_bernoulli(system);
  auto driven = std::make_shared<const DrivenSystem>(derived_system(system));
  const State y0 = driven->initial;

  if (!comparison) {
    if (rep.ac_parameters) {
      rep.verdict = SingularityVerdict::AcCertified;
      rep.comparison = to_doubles(*rep.ac_parameters);
      rep.evidence = "parameter identities hold exactly for p = (";
      for (std::size_t i = 0; i < rep.ac_parameters->size(); ++i) {
        rep.evidence += (i ? ", " : "") + to_string((*rep.ac_parameters)[i]);
      }
      rep.evidence += "); singular to every other Bernoulli measure";
      return rep;
    }
    if (!system.a0_is_one()) {
      rep.verdict = SingularityVerdict::SingularCertified;
      rep.evidence = "singular to every Bernoulli measure: " + identity_failure(system);
      return rep;
    }
    // a_0 = 1 falls outside the parameter classification; certify on a grid.
    if (system.N != 2) {
      rep.verdict = SingularityVerdict::Inconclusive;
      rep.evidence = "a_0 = 1 with N > 2: supply a comparison vector";
      return rep;
    }
    rep.verdict = SingularityVerdict::SingularCertified;
    std::string failed;
    for (int k = 1; k <= 9; ++k) {
      double p0 = k / 10.0;
      SingularityReport one = certify_singular(*driven, y0, {p0, 1.0 - p0}, opts);
      if (one.verdict != SingularityVerdict::SingularCertified) failed += (failed.empty() ? "" : ", ") + format_real(p0);
    }
    if (failed.empty()) {
      rep.evidence = "(multisep2) certified against (p, 1-p) for p = 0.1, 0.2, ..., 0.9";
    } else {
      rep.verdict = SingularityVerdict::Inconclusive;
      rep.evidence = "(multisep2) not certified for p0 in {" + failed + "}";
    }
    return rep;
  }

  std::vector<Rational> q = *comparison;
  for (Rational& v : q) v.canonicalize();
  if (static_cast<int>(q.size()) != system.N) throw Error(ErrorKind::Config, "comparison vector has the wrong length");
  Rational total = 0;
  for (const Rational& v : q) {
    if (!(v > 0 && v < 1)) throw Error(ErrorKind::Domain, "comparison probabilities must lie in (0,1)");
    total += v;
  }
  if (total != 1) throw Error(ErrorKind::Domain, "comparison probabilities must sum to 1");
  rep.comparison = to_doubles(q);
  if (rep.ac_parameters && *rep.ac_parameters == q) {
    rep.verdict = SingularityVerdict::AcCertified;
    rep.evidence = "parameter identities hold exactly for the comparison vector";
    return rep;
  }
  SingularityReport cert = certify_singular(*driven, y0, rep.comparison, opts);
  rep.certificate = cert.certificate;
  if (cert.verdict == SingularityVerdict::SingularCertified) {
    rep.verdict = SingularityVerdict::SingularCertified;
    rep.evidence = cert.evidence;
  } else if (!system.a0_is_one()) {
    rep.verdict = SingularityVerdict::SingularCertified;
    rep.evidence = rep.ac_parameters ? "comparison differs from the unique equivalent Bernoulli vector"
                                     : "singular to every Bernoulli measure: " + identity_failure(system);
  } else {
    rep.verdict = SingularityVerdict::Inconclusive;
    rep.evidence = cert.evidence;
  }
  return rep;
}

}  // namespace gdm
