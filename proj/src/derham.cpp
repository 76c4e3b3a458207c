#include "gdm/derham.hpp"

#include <cmath>
#include <sstream>

#include "gdm/error.hpp"

namespace gdm {

LftMatrix LftMatrix::operator*(const LftMatrix& r) const {
  return LftMatrix{a * r.a + b * r.c, a * r.b + b * r.d, c * r.a + d * r.c, c * r.b + d * r.d};
}

Rational phi_transform(const LftMatrix& A, const Rational& z) {
  Rational den = A.c * z + A.d;
  if (den == 0) throw Error(ErrorKind::Domain, "pole of Phi at z = " + to_string(z));
  Rational out = (A.a * z + A.b) / den;
  out.canonicalize();
  return out;
}

ExactState phi_transform(const LftMatrix& A, const ExactState& z) {
  if (!z.infinite) return ExactState{phi_transform(A, z.value), false};
  if (A.c == 0) return ExactState{Rational(0), true};
  Rational out = A.a / A.c;
  out.canonicalize();
  return ExactState{out, false};
}

namespace {

std::string at_index(const char* condition, int i, const std::string& detail) {
  std::ostringstream os;
  os << "condition " << condition << " fails at index " << i << ": " << detail;
  return os.str();
}

// Larger root of b z^2 + (1 - a) z - c = 0, the attracting-side fixed point of H_i.
Endpoint fixed_root(const LftMatrix& m) {
  Rational disc = (1 - m.a) * (1 - m.a) + 4 * m.b * m.c;
  Endpoint e;
  Rational root;
  if (exact_sqrt(disc, root)) {
    Rational v = (m.a - 1 + root) / (2 * m.b);
    v.canonicalize();
    e.exact = v;
    e.value = to_double(v);
  } else {
    double d = to_double(disc);
    e.value = (to_double(m.a) - 1.0 + std::sqrt(d)) / (2.0 * to_double(m.b));
  }
  return e;
}

Endpoint from_rational(const Rational& v) { return Endpoint{to_double(v), false, v}; }

bool less(const Endpoint& x, const Endpoint& y) {
  if (x.infinite || y.infinite) return !x.infinite && y.infinite;
  if (x.exact && y.exact) return *x.exact < *y.exact;
  return x.value < y.value;
}

}  // namespace

DeRhamSystem validate(const std::vector<LftMatrix>& raw, const std::string& label) {
  if (raw.size() < 2) throw Error(ErrorKind::Validation, "a de Rham system needs at least 2 matrices");
  DeRhamSystem sys;
  sys.label = label;
  sys.N = static_cast<int>(raw.size());
  const int N = sys.N;

  for (int i = 0; i < N; ++i) {
    if (raw[i].det() <= 0) throw Error(ErrorKind::Validation, at_index("A2", i, "det = " + to_string(raw[i].det()) + " <= 0"));
  }
  sys.A2 = true;

  bool strict = true;
  for (int i = 0; i < N; ++i) {
    const auto& m = raw[i];
    Rational bound = m.d < m.c + m.d ? m.d : Rational(m.c + m.d);
    if (bound <= 0 || m.det() > bound * bound) {
      throw Error(ErrorKind::Validation,
                  at_index("A3", i, "sqrt(det) = sqrt(" + to_string(m.det()) + ") exceeds min{d, c+d} = " + to_string(bound)));
    }
    if (m.det() == bound * bound) strict = false;
  }
  sys.A3 = true;
  sys.sA3 = strict;

  for (const auto& m : raw) {
    LftMatrix n{m.a / m.d, m.b / m.d, m.c / m.d, Rational(1)};
    n.a.canonicalize();
    n.b.canonicalize();
    n.c.canonicalize();
    sys.matrices.push_back(n);
  }
  const auto& A = sys.matrices;
  if (A[0].b != 0) throw Error(ErrorKind::Validation, at_index("A1", 0, "Phi(A_0; 0) = " + to_string(A[0].b) + " != 0"));
  Rational last = phi_transform(A[N - 1], Rational(1));
  if (last != 1) throw Error(ErrorKind::Validation, at_index("A1", N - 1, "Phi(A_{N-1}; 1) = " + to_string(last) + " != 1"));
  for (int i = 1; i < N; ++i) {
    Rational left = phi_transform(A[i - 1], Rational(1));
    if (left != A[i].b) {
      throw Error(ErrorKind::Validation,
                  at_index("A1", i, "Phi(A_{i-1}; 1) = " + to_string(left) + " != Phi(A_i; 0) = " + to_string(A[i].b)));
    }
  }
  sys.A1 = true;

  sys.weak_contraction.resize(N);
  for (int i = 0; i < N; ++i) sys.weak_contraction[i] = A[i].c == 0 ? A[i].a < 1 : sys.A3;
  for (int i = 0; i + 1 < N; ++i) {
    if (A[i].b + A[i].c == 0) sys.zero_b_plus_c.push_back(i);
  }

  auto [alpha, beta] = state_interval(sys);
  sys.alpha = alpha;
  sys.beta = beta;
  return sys;
}

std::pair<Endpoint, Endpoint> state_interval(const DeRhamSystem& sys) {
  const auto& A = sys.matrices;
  const int N = sys.N;
  Endpoint lo = from_rational(Rational(0));
  Endpoint hi = lo;
  auto consider = [&](const Endpoint& e) {
    if (less(e, lo)) lo = e;
    if (less(hi, e)) hi = e;
  };
  if (sys.a0_is_one()) {
    consider(from_rational(Rational(-1)));
    Endpoint inf;
    inf.infinite = true;
    inf.value = INFINITY;
    consider(inf);
  } else {
    Rational e0 = A[0].c / (1 - A[0].a);
    e0.canonicalize();
    consider(from_rational(e0));
  }
  for (int i = 1; i < N; ++i) consider(fixed_root(A[i]));

  // Trichotomy of the state interval.
  const LftMatrix& top = A[N - 1];
  bool ok;
  if (sys.a0_is_one()) {
    ok = lo.exact && *lo.exact == -1 && hi.infinite;
  } else if (top.b + top.c == 0) {
    ok = lo.exact && *lo.exact == -1 && !hi.infinite;
  } else {
    ok = lo.value > -1.0 && !hi.infinite && !(less(hi, lo));
    if (lo.exact) ok = ok && *lo.exact > -1;
  }
  if (!ok) throw Error(ErrorKind::Internal, "state interval violates the a0 / b_{N-1}+c_{N-1} trichotomy");
  return {lo, hi};
}

double DeRhamSystem::G(int k, double y, bool infinite) const {
  if (infinite) return k == 0 ? 1.0 : 0.0;
  const LftMatrix& m = matrices[k];
  double a = to_double(m.a), b = to_double(m.b), c = to_double(m.c);
  if (k == N - 1) {
    // (a+b) = c+1 here, so the (y+1) factor cancels.
    return (a - b * c) / ((c + 1.0) * (b * y + 1.0));
  }
  return (a - b * c) * (y + 1.0) / ((b * y + 1.0) * ((a + b) * y + c + 1.0));
}

double DeRhamSystem::G_telescoped(int k, double y, bool infinite) const {
  if (infinite) return k == 0 ? 1.0 : 0.0;
  double bk = to_double(matrices[k].b);
  if (k == N - 1) return (1.0 - bk) / (bk * y + 1.0);
  double bn = to_double(matrices[k + 1].b);
  return (y + 1.0) * (bn - bk) / ((bn * y + 1.0) * (bk * y + 1.0));
}

State DeRhamSystem::H(int k, const State& y) const {
  const LftMatrix& m = matrices[k];
  if (y.infinite) {
    if (m.b == 0) return State{INFINITY, 0.0, true};
    return State{to_double(m.a) / to_double(m.b), 0.0, false};
  }
  double v = (to_double(m.a) * y.x + to_double(m.c)) / (to_double(m.b) * y.x + 1.0);
  return State{v, 0.0, false};
}

Rational DeRhamSystem::G_exact(int k, const Rational& y) const {
  const LftMatrix& m = matrices[k];
  Rational out;
  if (k == N - 1) {
    out = (m.a - m.b * m.c) / ((m.c + 1) * (m.b * y + 1));
  } else {
    out = (m.a - m.b * m.c) * (y + 1) / ((m.b * y + 1) * ((m.a + m.b) * y + m.c + 1));
  }
  out.canonicalize();
  return out;
}

ExactState DeRhamSystem::G_exact_ext(int k, const ExactState& y) const {
  if (y.infinite) return ExactState{Rational(k == 0 ? 1 : 0), false};
  return ExactState{G_exact(k, y.value), false};
}

ExactState DeRhamSystem::H_exact(int k, const ExactState& y) const {
  const LftMatrix& m = matrices[k];
  if (y.infinite) {
    if (m.b == 0) return ExactState{Rational(0), true};
    Rational v = m.a / m.b;
    v.canonicalize();
    return ExactState{v, false};
  }
  Rational v = (m.a * y.value + m.c) / (m.b * y.value + 1);
  v.canonicalize();
  return ExactState{v, false};
}

double DeRhamSystem::g(int i, double x) const {
  const LftMatrix& m = matrices[i];
  return (to_double(m.a) * x + to_double(m.b)) / (to_double(m.c) * x + 1.0);
}

double DeRhamSystem::g_prime(int i, double x) const {
  const LftMatrix& m = matrices[i];
  double den = to_double(m.c) * x + 1.0;
  return to_double(m.det()) / (den * den);
}

DrivenSystem derived_system(const DeRhamSystem& system) {
  return derived_system(std::make_shared<const DeRhamSystem>(system));
}

DrivenSystem derived_system(std::shared_ptr<const DeRhamSystem> sys) {
  DrivenSystem out;
  out.kind = "derham_lft";
  out.label = sys->label;
  out.N = sys->N;
  out.space.kind = SpaceKind::Interval;
  out.space.lo = sys->alpha.value;
  out.space.hi = sys->beta.infinite ? INFINITY : sys->beta.value;
  out.space.hi_infinite = sys->beta.infinite;
  out.initial = State{};
  out.exact_initial = ExactState{Rational(0), false};
  out.derham = sys;
  const DeRhamSystem* s = sys.get();
  out.probs_fn = [s](const State& y, double* p) {
    for (int k = 0; k < s->N; ++k) {
      double primary = s->G(k, y.x, y.infinite);
      double check = s->G_telescoped(k, y.x, y.infinite);
      if (std::fabs(primary - check) > 1e-12 * std::max(1.0, std::fabs(primary))) {
        throw Error(ErrorKind::Internal, "G_" + std::to_string(k) + " forms disagree at y = " + std::to_string(y.x));
      }
      p[k] = primary;
    }
  };
  out.map_fn = [s](int i, const State& y) { return s->H(i, y); };
  out.exact_probs_fn = [s](const ExactState& y, Rational* p) {
    for (int k = 0; k < s->N; ++k) p[k] = s->G_exact_ext(k, y).value;
  };
  out.exact_map_fn = [s](int i, const ExactState& y) { return s->H_exact(i, y); };
  bool constant = sys->alpha.exact && sys->beta.exact && *sys->alpha.exact == *sys->beta.exact && !sys->beta.infinite;
  if (constant) {
    for (int k = 0; k < sys->N; ++k) out.constant_weights.push_back(to_double(sys->G_exact(k, *sys->alpha.exact)));
  }
  for (int i = 0; i < sys->N; ++i) {
    const auto& m = sys->matrices[i];
    out.parameters["A" + std::to_string(i)] =
        "[[" + to_string(m.a) + "," + to_string(m.b) + "],[" + to_string(m.c) + "," + to_string(m.d) + "]]";
  }
  return out;
}

CurveValues curve_eval(const DeRhamSystem& system, const Word& word, std::size_t bit_budget) {
  if (word.alphabet_size != system.N) throw Error(ErrorKind::Domain, "word alphabet does not match the system");
  LftMatrix P{Rational(1), Rational(0), Rational(0), Rational(1)};
  for (int sym : word.symbols) {
    P = P * system.matrices[sym];
    for (const Rational* e : {&P.a, &P.b, &P.c, &P.d}) {
      if (bit_size(*e) > bit_budget) {
        throw Error(ErrorKind::Budget, "matrix product exceeds the " + std::to_string(bit_budget) + "-bit budget");
      }
    }
  }
  // P = [[p, q], [r, s]]
  CurveValues out;
  out.left = P.b / P.d;
  out.right = (P.a + P.b) / (P.c + P.d);
  out.mass = (P.a * P.d - P.b * P.c) / (P.d * (P.c + P.d));
  out.left.canonicalize();
  out.right.canonicalize();
  out.mass.canonicalize();
  if (out.right - out.left != out.mass) throw Error(ErrorKind::Internal, "curve mass differs from endpoint difference");
  return out;
}

Rational curve_at(const DeRhamSystem& system, const Rational& t, std::size_t bit_budget) {
  if (t < 0 || t > 1) throw Error(ErrorKind::Domain, "curve point outside [0,1]: " + to_string(t));
  if (t == 1) return Rational(1);
  BigInt den = t.get_den();
  BigInt num = t.get_num();
  std::vector<int> digits;
  BigInt scale = 1;
  while (true) {
    BigInt scaled_num = num * scale;
    if (mpz_divisible_p(scaled_num.get_mpz_t(), den.get_mpz_t())) break;
    scale *= system.N;
    if (digits.size() > 4 * bit_budget) throw Error(ErrorKind::Domain, to_string(t) + " is not an N-adic rational");
    digits.push_back(0);
  }
  BigInt k = num * scale / den;
  for (std::size_t pos = digits.size(); pos-- > 0;) {
    BigInt q, r;
    mpz_fdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), k.get_mpz_t(), static_cast<unsigned long>(system.N));
    digits[pos] = static_cast<int>(r.get_si());
    k = q;
  }
  if (digits.empty()) return Rational(0);
  return curve_eval(system, Word(digits, system.N), bit_budget).left;
}

std::optional<Rational> detect_moebius_case(const DeRhamSystem& system) {
  const int N = system.N;
  const auto& A = system.matrices;
  Rational C = A[0].c * N / Rational(N - 1);
  C.canonicalize();
  for (int i = 0; i < N; ++i) {
    Rational b = Rational(i) / ((N - i) * C + N);
    Rational a = ((N + 1) * C * b + 1) / N;
    Rational c = C * (N - 1 - C * b) / N;
    if (A[i].b != b || A[i].a != a || A[i].c != c) return std::nullopt;
  }
  return C;
}

std::optional<Rational> moebius_unique_point(const DeRhamSystem& system) {
  const auto& m = system.matrices[0];
  if (m.a == 0) return std::nullopt;
  Rational v = (1 + m.c - m.a * system.N) / (m.a * (system.N - 1));
  v.canonicalize();
  return v;
}

Rational moebius_closed_form(const Rational& C, const Rational& x) {
  Rational v = x / (1 - C * (x - 1));
  v.canonicalize();
  return v;
}

std::vector<LftMatrix> moebius_matrices(const Rational& C, int N) {
  if (N < 2) throw Error(ErrorKind::Config, "moebius family needs N >= 2");
  std::vector<LftMatrix> out;
  for (int i = 0; i < N; ++i) {
    Rational den = (N - i) * C + N;
    if (den <= 0) throw Error(ErrorKind::Config, "moebius parameter C = " + to_string(C) + " makes (N-i)C + N <= 0");
    Rational b = Rational(i) / den;
    Rational a = ((N + 1) * C * b + 1) / N;
    Rational c = C * (N - 1 - C * b) / N;
    a.canonicalize();
    b.canonicalize();
    c.canonicalize();
    out.push_back(LftMatrix{a, b, c, Rational(1)});
  }
  return out;
}

std::vector<LftMatrix> bernoulli_equivalence_params(const std::vector<Rational>& p, const Rational& e0) {
  const int N = static_cast<int>(p.size());
  if (N < 2) throw Error(ErrorKind::Config, "probability vector needs at least 2 entries");
  Rational total = 0;
  for (const auto& v : p) {
    if (v <= 0) throw Error(ErrorKind::Config, "probability entries must be strictly positive");
    total += v;
  }
  if (total != 1) throw Error(ErrorKind::Config, "probabilities sum to " + to_string(total) + ", not 1");
  std::vector<LftMatrix> out;
  Rational before = 0;  // sum_{j < i} p_j
  for (int i = 0; i < N; ++i) {
    Rational through = before + p[i];
    Rational den = (1 - before) * e0 + 1;
    if (den == 0) throw Error(ErrorKind::Config, "e0 makes a denominator vanish");
    Rational a = (p[i] + e0 * through) / den;
    Rational b = before / den;
    Rational c = e0 * ((1 - through) * e0 + 1 - p[i]) / den;
    a.canonicalize();
    b.canonicalize();
    c.canonicalize();
    out.push_back(LftMatrix{a, b, c, Rational(1)});
    before = through;
  }
  return out;
}

std::optional<Rational> fixed_point_H0(const DeRhamSystem& system) {
  const auto& m = system.matrices[0];
  if (m.a >= 1) return std::nullopt;
  Rational e0 = m.c / (1 - m.a);
  e0.canonicalize();
  return e0;
}

std::optional<std::vector<Rational>> is_ac_with_bernoulli(const DeRhamSystem& system) {
  auto e0 = fixed_point_H0(system);
  if (!e0) return std::nullopt;
  const int N = system.N;
  std::vector<Rational> cumulative(N + 1);
  for (int i = 0; i < N; ++i) {
    const Rational& b = system.matrices[i].b;
    Rational den = 1 + b * *e0;
    if (den == 0) return std::nullopt;
    cumulative[i] = b * (*e0 + 1) / den;
  }
  cumulative[N] = 1;
  std::vector<Rational> p(N);
  for (int i = 0; i < N; ++i) {
    p[i] = cumulative[i + 1] - cumulative[i];
    p[i].canonicalize();
    if (p[i] <= 0 || p[i] >= 1) return std::nullopt;
  }
  auto rebuilt = bernoulli_equivalence_params(p, *e0);
  for (int i = 0; i < N; ++i) {
    if (!(rebuilt[i] == system.matrices[i])) return std::nullopt;
  }
  return p;
}

std::vector<LftMatrix> minkowski_matrices() {
  return {LftMatrix{Rational(1), Rational(0), Rational(1), Rational(1)},
          LftMatrix{Rational(0), Rational(1), Rational(-1), Rational(2)}};
}

DeRhamSystem minkowski_system() { return validate(minkowski_matrices(), "minkowski"); }

std::vector<LftMatrix> linear_matrices(const std::vector<Rational>& weights) {
  std::vector<LftMatrix> out;
  Rational before = 0;
  for (const auto& w : weights) {
    out.push_back(LftMatrix{w, before, Rational(0), Rational(1)});
    before += w;
  }
  return out;
}

}  // namespace gdm
