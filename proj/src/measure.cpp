#include "gdm/measure.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gdm/error.hpp"
#include "gdm/rng.hpp"

namespace gdm {

namespace {

void check_word(const DrivenSystem& system, const Word& word) {
  if (word.alphabet_size != system.N) {
    throw Error(ErrorKind::Domain, "word over " + std::to_string(word.alphabet_size) + " symbols used with N = " +
                                       std::to_string(system.N));
  }
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double log_cylinder_mass(const DrivenSystem& system, const State& y0, const Word& word) {
  check_word(system, word);
  std::vector<double> p(static_cast<std::size_t>(system.N));
  State y = y0;
  double log_mass = 0.0;
  for (int sym : word.symbols) {
    system.probabilities(y, p.data());
    if (p[sym] <= 0.0) return -std::numeric_limits<double>::infinity();
    log_mass += std::log(p[sym]);
    y = system.next(sym, y);
  }
  return log_mass;
}

double cylinder_mass(const DrivenSystem& system, const State& y0, const Word& word) {
  double lm = log_cylinder_mass(system, y0, word);
  return std::isinf(lm) ? 0.0 : std::exp(lm);
}

double cylinder_mass_direct(const DrivenSystem& system, const State& y0, const Word& word) {
  check_word(system, word);
  double mass = 1.0;
  State y = y0;
  for (int sym : word.symbols) {
    mass *= system.evaluate_step(y, sym).probs[sym];
    if (mass == 0.0) return 0.0;
    y = system.next(sym, y);
  }
  return mass;
}

Rational cylinder_mass_exact(const DrivenSystem& system, const ExactState& y0, const Word& word) {
  check_word(system, word);
  if (word.size() > 64) throw Error(ErrorKind::Budget, "exact cylinder mass limited to words of length <= 64");
  Rational mass = 1;
  ExactState y = y0;
  for (int sym : word.symbols) {
    auto p = system.exact_probabilities(y);
    if (p[sym] == 0) return Rational(0);
    mass *= p[sym];
    y = system.exact_next(sym, y);
  }
  mass.canonicalize();
  return mass;
}

IntervalMass interval_mass(const DrivenSystem& system, const State& y0, const Rational& t, int depth_limit) {
  if (t < 0 || t > 1) throw Error(ErrorKind::Domain, "t = " + to_string(t) + " outside [0,1]");
  if (depth_limit < 1) throw Error(ErrorKind::Domain, "depth_limit must be >= 1");
  IntervalMass out;
  if (t == 1) {
    out.mass = 1.0;
    out.exact = true;
    return out;
  }
  std::vector<double> p(static_cast<std::size_t>(system.N));
  Rational frac = t;
  State y = y0;
  double prefix = 1.0;
  double total = 0.0;
  for (int depth = 0; depth < depth_limit && frac != 0; ++depth) {
    frac *= system.N;
    BigInt digit_z = frac.get_num() / frac.get_den();
    int digit = static_cast<int>(digit_z.get_si());
    frac -= digit;
    frac.canonicalize();
    system.probabilities(y, p.data());
    for (int j = 0; j < digit; ++j) total += prefix * p[j];
    prefix *= p[digit];
    if (prefix == 0.0) {
      frac = 0;
      break;
    }
    y = system.next(digit, y);
  }
  out.mass = total;
  out.exact = frac == 0;
  out.error_bound = out.exact ? 0.0 : prefix;
  return out;
}

IntervalMass interval_mass_exact(const DrivenSystem& system, const ExactState& y0, const Rational& t, int depth_limit) {
  if (t < 0 || t > 1) throw Error(ErrorKind::Domain, "t = " + to_string(t) + " outside [0,1]");
  if (depth_limit < 1) throw Error(ErrorKind::Domain, "depth_limit must be >= 1");
  IntervalMass out;
  if (t == 1) {
    out.mass = 1.0;
    out.exact = true;
    out.exact_mass = Rational(1);
    return out;
  }
  Rational frac = t;
  ExactState y = y0;
  Rational prefix = 1;
  Rational total = 0;
  for (int depth = 0; depth < depth_limit && frac != 0; ++depth) {
    frac *= system.N;
    BigInt digit_z = frac.get_num() / frac.get_den();
    int digit = static_cast<int>(digit_z.get_si());
    frac -= digit;
    frac.canonicalize();
    auto p = system.exact_probabilities(y);
    for (int j = 0; j < digit; ++j) total += prefix * p[j];
    prefix *= p[digit];
    if (prefix == 0) {
      frac = 0;
      break;
    }
    y = system.exact_next(digit, y);
  }
  total.canonicalize();
  out.mass = to_double(total);
  out.exact = frac == 0;
  out.error_bound = out.exact ? 0.0 : to_double(prefix);
  if (out.exact) out.exact_mass = total;
  return out;
}

std::vector<DistributionRow> distribution_function(const DrivenSystem& system, const std::vector<Rational>& grid,
                                                   int depth_limit) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] < grid[i - 1]) throw Error(ErrorKind::Domain, "distribution grid must be sorted");
  }
  bool exact = system.has_exact() && system.exact_initial.has_value();
  std::vector<DistributionRow> rows;
  rows.reserve(grid.size());
  for (const auto& t : grid) {
    DistributionRow row{t, exact ? interval_mass_exact(system, *system.exact_initial, t, depth_limit)
                                 : interval_mass(system, system.initial, t, depth_limit)};
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Rational> dyadic_grid(int k, int base) {
  if (k < 0 || k > 24) throw Error(ErrorKind::Config, "dyadic grid exponent must be in [0, 24]");
  BigInt count;
  mpz_ui_pow_ui(count.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(k));
  long n = count.get_si();
  std::vector<Rational> out;
  out.reserve(static_cast<std::size_t>(n + 1));
  for (long j = 0; j <= n; ++j) {
    Rational q(BigInt(j), count);
    q.canonicalize();
    out.push_back(q);
  }
  return out;
}

MassTrace sample_path(const DrivenSystem& system, const State& y0, int n, std::uint64_t seed, std::uint64_t stream) {
  if (n < 1) throw Error(ErrorKind::Domain, "path length must be >= 1");
  StreamRng rng(seed, stream);
  MassTrace tr;
  tr.word.alphabet_size = system.N;
  tr.word.symbols.reserve(static_cast<std::size_t>(n));
  tr.states.reserve(static_cast<std::size_t>(n) + 1);
  tr.probs.reserve(static_cast<std::size_t>(n));
  tr.log_mass.reserve(static_cast<std::size_t>(n) + 1);
  tr.states.push_back(y0);
  tr.log_mass.push_back(0.0);
  State y = y0;
  for (int k = 0; k < n; ++k) {
    std::vector<double> p = system.probabilities(y);
    int sym = rng.categorical(p);
    tr.word.symbols.push_back(sym);
    tr.log_mass.push_back(tr.log_mass.back() + std::log(p[sym]));
    tr.probs.push_back(std::move(p));
    y = system.next(sym, y);
    tr.states.push_back(y);
  }
  tr.martingale = martingale_trace(tr);
  return tr;
}

MassTrace replay_path(const DrivenSystem& system, const State& y0, const Word& word) {
  check_word(system, word);
  MassTrace tr;
  tr.word = word;
  tr.states.push_back(y0);
  tr.log_mass.push_back(0.0);
  State y = y0;
  for (int sym : word.symbols) {
    std::vector<double> p = system.probabilities(y);
    double lp = p[sym] > 0.0 ? std::log(p[sym]) : -std::numeric_limits<double>::infinity();
    tr.log_mass.push_back(tr.log_mass.back() + lp);
    tr.probs.push_back(std::move(p));
    y = system.next(sym, y);
    tr.states.push_back(y);
  }
  return tr;
}

std::vector<double> martingale_trace(const MassTrace& trace) {
  std::vector<double> m;
  m.reserve(trace.word.size() + 1);
  m.push_back(0.0);
  for (std::size_t k = 0; k < trace.word.size(); ++k) {
    const auto& p = trace.probs[k];
    double chosen = p[trace.word[k]];
    if (!(chosen > 0.0)) throw Error(ErrorKind::Internal, "trace selects a zero-probability symbol at step " + std::to_string(k + 1));
    m.push_back(m.back() - std::log(chosen) - entropy_unchecked(p));
  }
  return m;
}

std::string trace_csv(const DrivenSystem& system, const MassTrace& trace) {
  std::ostringstream os;
  os << "n,symbol,state_repr";
  for (int j = 0; j < system.N; ++j) os << ",p_" << j;
  os << ",log_mass,M_n\n";
  std::vector<double> mart = trace.martingale.empty() ? martingale_trace(trace) : trace.martingale;
  for (std::size_t k = 0; k < trace.word.size(); ++k) {
    os << (k + 1) << ',' << trace.word[k] << ',' << system.repr(trace.states[k]);
    for (double v : trace.probs[k]) os << ',' << num(v);
    os << ',' << num(trace.log_mass[k + 1]) << ',' << num(mart[k + 1]) << '\n';
  }
  return os.str();
}

std::string distribution_csv(const std::vector<DistributionRow>& rows) {
  std::ostringstream os;
  os << "t,phi,phi_exact,error_bound\n";
  for (const auto& r : rows) {
    os << to_string(r.t) << ',' << num(r.value.mass) << ',' << (r.value.exact_mass ? to_string(*r.value.exact_mass) : "")
       << ',' << num(r.value.error_bound) << '\n';
  }
  return os.str();
}

}  // namespace gdm
