#include "gdm/systems.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gdm/derham.hpp"
#include "gdm/error.hpp"

namespace gdm {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

bool StateSpace::contains(const State& s, double tol) const {
  switch (kind) {
    case SpaceKind::Interval:
      if (s.infinite) return hi_infinite;
      if (std::isnan(s.x)) return false;
      return s.x >= lo - tol && (hi_infinite || s.x <= hi + tol);
    case SpaceKind::Circle:
      return std::fabs(std::hypot(s.x, s.y) - 1.0) <= tol;
    case SpaceKind::FiniteSet:
      return !s.infinite && s.x >= 0 && s.x < size && s.x == std::floor(s.x);
    case SpaceKind::RealLine:
      return !s.infinite && std::isfinite(s.x);
  }
  return false;
}

std::string StateSpace::describe() const {
  switch (kind) {
    case SpaceKind::Interval:
      return "[" + fmt(lo) + ", " + (hi_infinite ? std::string("+inf") : fmt(hi)) + "]";
    case SpaceKind::Circle:
      return "S^1";
    case SpaceKind::FiniteSet:
      return "{0.." + std::to_string(size - 1) + "}";
    case SpaceKind::RealLine:
      return "R";
  }
  return "?";
}

void DrivenSystem::check_state(const State& y) const {
  if (!space.contains(y)) {
    throw Error(ErrorKind::Domain, "state " + repr(y) + " outside the state space " + space.describe() + " of " + label);
  }
}

void DrivenSystem::probabilities(const State& y, double* out) const {
  check_state(y);
  probs_fn(y, out);
  double total = 0.0;
  for (int k = 0; k < N; ++k) {
    if (!(out[k] >= -1e-12 && out[k] <= 1.0 + 1e-12)) {
      throw Error(ErrorKind::Internal, "G_" + std::to_string(k) + "(" + repr(y) + ") = " + fmt(out[k]) + " outside [0,1]");
    }
    total += out[k];
  }
  if (std::fabs(total - 1.0) > 1e-10) {
    throw Error(ErrorKind::Internal, "G vector at " + repr(y) + " sums to " + fmt(total));
  }
}

std::vector<double> DrivenSystem::probabilities(const State& y) const {
  std::vector<double> out(static_cast<std::size_t>(N));
  probabilities(y, out.data());
  return out;
}

State DrivenSystem::next(int i, const State& y) const {
  if (i < 0 || i >= N) throw Error(ErrorKind::Domain, "symbol " + std::to_string(i) + " outside alphabet");
  check_state(y);
  State out = map_fn(i, y);
  if (!space.contains(out)) {
    throw Error(ErrorKind::Internal, "H_" + std::to_string(i) + "(" + repr(y) + ") = " + repr(out) + " left the state space");
  }
  return out;
}

StepResult DrivenSystem::evaluate_step(const State& y, int i) const {
  StepResult r;
  r.probs = probabilities(y);
  r.next = next(i, y);
  return r;
}

std::vector<Rational> DrivenSystem::exact_probabilities(const ExactState& y) const {
  if (!has_exact()) throw Error(ErrorKind::Domain, label + " has no exact evaluator");
  std::vector<Rational> out(static_cast<std::size_t>(N));
  exact_probs_fn(y, out.data());
  Rational total = 0;
  for (const auto& v : out) total += v;
  if (total != 1) throw Error(ErrorKind::Internal, "exact G vector sums to " + to_string(total));
  return out;
}

ExactState DrivenSystem::exact_next(int i, const ExactState& y) const {
  if (!has_exact()) throw Error(ErrorKind::Domain, label + " has no exact evaluator");
  if (i < 0 || i >= N) throw Error(ErrorKind::Domain, "symbol " + std::to_string(i) + " outside alphabet");
  return exact_map_fn(i, y);
}

State DrivenSystem::to_state(const ExactState& y) const {
  if (y.infinite) return State{INFINITY, 0.0, true};
  return State{to_double(y.value), 0.0, false};
}

std::string DrivenSystem::repr(const State& y) const {
  if (y.infinite) return "+inf";
  if (space.kind == SpaceKind::Circle) return "(" + fmt(y.x) + ";" + fmt(y.y) + ")";
  if (space.kind == SpaceKind::FiniteSet) return std::to_string(static_cast<long long>(y.x));
  return fmt(y.x);
}

// ---------------------------------------------------------------- ADF

namespace {

DrivenSystem adf_base() {
  DrivenSystem s;
  s.kind = "adf";
  s.label = "adf";
  s.N = 2;
  s.space = StateSpace{SpaceKind::Interval, 0.0, 1.0, false, 0};
  s.probs_fn = [](const State& y, double* p) {
    p[0] = (2.0 + y.x) / 5.0;
    p[1] = (3.0 - y.x) / 5.0;
  };
  s.map_fn = [](int i, const State& y) {
    double v = i == 0 ? (1.0 + 2.0 * y.x) / (2.0 + y.x) : y.x / (3.0 - y.x);
    return State{v, 0.0, false};
  };
  s.exact_probs_fn = [](const ExactState& y, Rational* p) {
    p[0] = (2 + y.value) / 5;
    p[1] = (3 - y.value) / 5;
    p[0].canonicalize();
    p[1].canonicalize();
  };
  s.exact_map_fn = [](int i, const ExactState& y) {
    Rational v = i == 0 ? Rational((1 + 2 * y.value) / (2 + y.value)) : Rational(y.value / (3 - y.value));
    v.canonicalize();
    return ExactState{v, false};
  };
  return s;
}

}  // namespace

DrivenSystem make_adf_exact(const Rational& y0) {
  if (y0 < 0 || y0 > 1) throw Error(ErrorKind::Config, "adf initial state " + to_string(y0) + " outside [0,1]");
  DrivenSystem s = adf_base();
  s.initial = State{to_double(y0), 0.0, false};
  s.exact_initial = ExactState{y0, false};
  s.parameters["y0"] = to_string(y0);
  return s;
}

DrivenSystem make_adf(double y0) {
  if (!(y0 >= 0.0 && y0 <= 1.0)) throw Error(ErrorKind::Config, "adf initial state " + fmt(y0) + " outside [0,1]");
  return make_adf_exact(from_double(y0));
}

// ---------------------------------------------------------------- Kusuoka

std::array<Mat2, 3> kusuoka_matrices() {
  const double r3 = std::sqrt(3.0);
  return {Mat2{0.6, 0.0, 0.0, 0.2}, Mat2{0.3, r3 / 10.0, r3 / 10.0, 0.5}, Mat2{0.3, -r3 / 10.0, -r3 / 10.0, 0.5}};
}

DrivenSystem make_kusuoka(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y) || std::fabs(std::hypot(x, y) - 1.0) > 1e-12) {
    throw Error(ErrorKind::Config, "kusuoka initial state must be a unit vector, got (" + fmt(x) + ", " + fmt(y) + ")");
  }
  DrivenSystem s;
  s.kind = "kusuoka";
  s.label = "kusuoka";
  s.N = 3;
  s.space.kind = SpaceKind::Circle;
  s.initial = State{x, y, false};
  const auto mats = kusuoka_matrices();
  s.probs_fn = [mats](const State& v, double* p) {
    for (int i = 0; i < 3; ++i) {
      const Mat2& A = mats[i];
      double u0 = A[0] * v.x + A[1] * v.y;
      double u1 = A[2] * v.x + A[3] * v.y;
      p[i] = (5.0 / 3.0) * (u0 * u0 + u1 * u1);
    }
  };
  s.map_fn = [mats](int i, const State& v) {
    const Mat2& A = mats[i];
    double u0 = A[0] * v.x + A[1] * v.y;
    double u1 = A[2] * v.x + A[3] * v.y;
    double n = std::hypot(u0, u1);
    return State{u0 / n, u1 / n, false};
  };
  s.parameters["y0"] = "[" + fmt(x) + "," + fmt(y) + "]";
  return s;
}

std::array<double, 2> harmonic_coordinates(const std::array<double, 3>& f) {
  double d1 = f[1] - f[0];
  double d2 = f[2] - f[0];
  if (d1 == 0.0 && d2 == 0.0) throw Error(ErrorKind::Config, "energy measure undefined (zero energy)");
  double v1 = (d1 + d2) / (2.0 * std::sqrt(2.0));
  double v2 = (d1 - d2) / (2.0 * std::sqrt(2.0 / 3.0));
  double n = std::hypot(v1, v2);
  v1 /= n;
  v2 /= n;
  double lead = std::fabs(v1) > 1e-15 ? v1 : v2;
  if (lead < 0) {
    v1 = -v1;
    v2 = -v2;
  }
  return {v1 == 0.0 ? 0.0 : v1, v2 == 0.0 ? 0.0 : v2};
}

DrivenSystem make_kusuoka_from_harmonic(const std::array<double, 3>& values) {
  auto v = harmonic_coordinates(values);
  DrivenSystem s = make_kusuoka(v[0], v[1]);
  s.parameters["boundary"] = "[" + fmt(values[0]) + "," + fmt(values[1]) + "," + fmt(values[2]) + "]";
  return s;
}

// ---------------------------------------------------------------- linear / hata

DrivenSystem make_linear(const std::vector<Rational>& weights) {
  if (weights.size() < 2) throw Error(ErrorKind::Config, "linear system needs at least 2 weights");
  Rational total = 0;
  for (const auto& w : weights) {
    if (w <= 0) throw Error(ErrorKind::Config, "linear weights must be strictly positive, got " + to_string(w));
    total += w;
  }
  if (total != 1) throw Error(ErrorKind::Config, "linear weights sum to " + to_string(total) + ", not 1");
  auto sys = std::make_shared<const DeRhamSystem>(validate(linear_matrices(weights), "linear"));
  DrivenSystem s = derived_system(sys);
  s.kind = "linear";
  s.label = "linear";
  s.space = StateSpace{SpaceKind::Interval, 0.0, 0.0, false, 0};
  std::string list;
  for (std::size_t i = 0; i < weights.size(); ++i) list += (i ? "," : "") + to_string(weights[i]);
  s.parameters.clear();
  s.parameters["weights"] = "[" + list + "]";
  return s;
}

DrivenSystem make_linear(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw Error(ErrorKind::Config, "linear weights must be strictly positive");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw Error(ErrorKind::Config, "linear weights must sum to 1");
  std::vector<Rational> exact;
  for (double w : weights) exact.push_back(from_double(w));
  Rational sum = 0;
  for (std::size_t i = 0; i + 1 < exact.size(); ++i) sum += exact[i];
  exact.back() = 1 - sum;
  return make_linear(exact);
}

DrivenSystem make_hata(const Rational& h_sq, const Rational& alpha_sq) {
  if (h_sq <= 1) throw Error(ErrorKind::Config, "hata needs |h|^2 > 1");
  if (alpha_sq <= 0 || alpha_sq >= 1) throw Error(ErrorKind::Config, "hata needs |alpha|^2 in (0,1)");
  Rational w0 = 1 / h_sq;
  w0.canonicalize();
  DrivenSystem s = make_linear(std::vector<Rational>{w0, Rational(1 - w0)});
  s.kind = "hata";
  s.label = "hata";
  s.parameters["h_modulus_sq"] = to_string(h_sq);
  s.parameters["alpha_modulus_sq"] = to_string(alpha_sq);
  return s;
}

// ---------------------------------------------------------------- toys

namespace {

Rational param(const std::map<std::string, Rational>& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw Error(ErrorKind::Config, "missing parameter '" + key + "'");
  return it->second;
}

Rational param_or(const std::map<std::string, Rational>& params, const std::string& key, const Rational& fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Rational rabs(const Rational& v) { return v < 0 ? Rational(-v) : v; }

void set_initial(DrivenSystem& s, const Rational& y0) {
  s.initial = State{to_double(y0), 0.0, false};
  s.exact_initial = ExactState{y0, false};
  s.parameters["y0"] = to_string(y0);
}

DrivenSystem l3_counterexample(const std::map<std::string, Rational>& params) {
  DrivenSystem s;
  s.kind = "toy";
  s.label = "l3_counterexample";
  s.N = 2;
  s.space.kind = SpaceKind::RealLine;
  auto g0 = [](double x) {
    if (x < 0.0 || x > 1.0) return 1.0 / 6.0;
    return x <= 0.5 ? x + 1.0 / 6.0 : 7.0 / 6.0 - x;
  };
  s.probs_fn = [g0](const State& y, double* p) {
    p[0] = g0(y.x);
    p[1] = 1.0 - p[0];
  };
  s.map_fn = [](int, const State& y) { return State{(5.0 - 3.0 * y.x) / 6.0, 0.0, false}; };
  s.exact_probs_fn = [](const ExactState& y, Rational* p) {
    const Rational& x = y.value;
    if (x < 0 || x > 1) {
      p[0] = Rational(1, 6);
    } else if (2 * x <= 1) {
      p[0] = x + Rational(1, 6);
    } else {
      p[0] = Rational(7, 6) - x;
    }
    p[0].canonicalize();
    p[1] = 1 - p[0];
  };
  s.exact_map_fn = [](int, const ExactState& y) {
    Rational v = (5 - 3 * y.value) / 6;
    v.canonicalize();
    return ExactState{v, false};
  };
  set_initial(s, param_or(params, "y0", Rational(1, 3)));
  return s;
}

Rational clamp_quarter(const Rational& x) {
  if (x < Rational(1, 4)) return Rational(1, 4);
  if (x > Rational(3, 4)) return Rational(3, 4);
  return x;
}

DrivenSystem fixedpoint_half(const std::map<std::string, Rational>& params) {
  DrivenSystem s;
  s.kind = "toy";
  s.label = "fixedpoint_half";
  s.N = 2;
  s.space = StateSpace{SpaceKind::Interval, 0.0, 1.0, false, 0};
  auto g0 = [](double x) { return x < 0.25 ? 0.25 : (x > 0.75 ? 0.75 : x); };
  s.probs_fn = [g0](const State& y, double* p) {
    p[0] = g0(y.x);
    p[1] = 1.0 - p[0];
  };
  s.map_fn = [g0](int i, const State& y) {
    double v = g0(y.x);
    return State{i == 0 ? v : 1.0 - v, 0.0, false};
  };
  s.exact_probs_fn = [](const ExactState& y, Rational* p) {
    p[0] = clamp_quarter(y.value);
    p[1] = 1 - p[0];
  };
  s.exact_map_fn = [](int i, const ExactState& y) {
    Rational v = clamp_quarter(y.value);
    return ExactState{i == 0 ? v : Rational(1 - v), false};
  };
  Rational y0 = param_or(params, "y0", Rational(1, 2));
  if (y0 < 0 || y0 > 1) throw Error(ErrorKind::Config, "fixedpoint_half initial state outside [0,1]");
  set_initial(s, y0);
  return s;
}

DrivenSystem sqrt_perturbed(const std::map<std::string, Rational>& params) {
  Rational p = param(params, "p");
  if (p <= 0 || p >= 1) throw Error(ErrorKind::Config, "sqrt_perturbed needs p in (0,1), got " + to_string(p));
  Rational m = p < 1 - p ? p : Rational(1 - p);
  Rational bound = m * m;
  DrivenSystem s;
  s.kind = "toy";
  s.label = "sqrt_perturbed";
  s.N = 2;
  s.space = StateSpace{SpaceKind::Interval, -to_double(bound), to_double(bound), false, 0};
  double pd = to_double(p);
  s.probs_fn = [pd](const State& y, double* out) {
    out[0] = pd + std::sqrt(std::fabs(y.x));
    out[1] = 1.0 - out[0];
  };
  s.map_fn = [](int, const State& y) {
    double a = std::fabs(y.x);
    return State{a / (a + 1.0), 0.0, false};
  };
  Rational y0 = param_or(params, "y0", Rational(0));
  if (y0 < -bound || y0 > bound) {
    throw Error(ErrorKind::Config, "sqrt_perturbed initial state outside [-min(p,1-p)^2, min(p,1-p)^2]");
  }
  s.initial = State{to_double(y0), 0.0, false};
  s.parameters["p"] = to_string(p);
  s.parameters["y0"] = to_string(y0);
  return s;
}

DrivenSystem epsilon_escape(const std::map<std::string, Rational>& params) {
  Rational eps = param(params, "eps");
  if (eps <= 0 || eps >= 1) throw Error(ErrorKind::Config, "epsilon_escape needs eps in (0,1), got " + to_string(eps));
  DrivenSystem s;
  s.kind = "toy";
  s.label = "epsilon_escape";
  s.N = 2;
  s.space.kind = SpaceKind::RealLine;
  double e = to_double(eps);
  s.probs_fn = [](const State& y, double* p) {
    p[0] = std::max(0.5 - std::fabs(y.x), 0.0);
    p[1] = 1.0 - p[0];
  };
  // Once |y| >= 1/2 only H_1 fires and G stays (0, 1), so the orbit runs off
  // to infinity; saturate at the largest double instead of overflowing.
  s.map_fn = [e](int i, const State& y) {
    double v = i == 0 ? (1.0 - e) * y.x : y.x / e;
    if (!std::isfinite(v)) v = std::copysign(std::numeric_limits<double>::max(), y.x);
    return State{v, 0.0, false};
  };
  s.exact_probs_fn = [](const ExactState& y, Rational* p) {
    Rational v = Rational(1, 2) - rabs(y.value);
    p[0] = v > 0 ? v : Rational(0);
    p[1] = 1 - p[0];
  };
  s.exact_map_fn = [eps](int i, const ExactState& y) {
    Rational v = i == 0 ? Rational((1 - eps) * y.value) : Rational(y.value / eps);
    v.canonicalize();
    return ExactState{v, false};
  };
  set_initial(s, param_or(params, "y0", Rational(1, 4)));
  s.parameters["eps"] = to_string(eps);
  return s;
}

DrivenSystem three_state(const std::map<std::string, Rational>& params) {
  Rational p = param(params, "p");
  if (p <= 0 || p >= 1) throw Error(ErrorKind::Config, "three_state needs p in (0,1), got " + to_string(p));
  if (p == Rational(1, 2)) throw Error(ErrorKind::Config, "three_state needs p != 1/2 (otherwise both branches coincide)");
  DrivenSystem s;
  s.kind = "toy";
  s.label = "three_state";
  s.N = 2;
  s.space = StateSpace{SpaceKind::FiniteSet, 0.0, 2.0, false, 3};
  double pd = to_double(p);
  s.probs_fn = [pd](const State& y, double* out) {
    out[0] = y.x == 1.0 ? pd : 0.5;
    out[1] = 1.0 - out[0];
  };
  s.map_fn = [](int i, const State& y) {
    if (y.x == 0.0) return State{i == 0 ? 1.0 : 2.0, 0.0, false};
    return y;
  };
  s.exact_probs_fn = [p](const ExactState& y, Rational* out) {
    out[0] = y.value == 1 ? p : Rational(1, 2);
    out[1] = 1 - out[0];
  };
  s.exact_map_fn = [](int i, const ExactState& y) {
    if (y.value == 0) return ExactState{Rational(i == 0 ? 1 : 2), false};
    return y;
  };
  set_initial(s, Rational(0));
  s.parameters["p"] = to_string(p);
  s.constant_weights.clear();
  return s;
}

}  // namespace

std::vector<std::string> toy_names() {
  return {"l3_counterexample", "fixedpoint_half", "sqrt_perturbed", "epsilon_escape", "three_state"};
}

DrivenSystem make_toy(const std::string& name, const std::map<std::string, Rational>& params) {
  DrivenSystem s;
  if (name == "l3_counterexample") {
    s = l3_counterexample(params);
  } else if (name == "fixedpoint_half") {
    s = fixedpoint_half(params);
  } else if (name == "sqrt_perturbed") {
    s = sqrt_perturbed(params);
  } else if (name == "epsilon_escape") {
    s = epsilon_escape(params);
  } else if (name == "three_state") {
    s = three_state(params);
  } else {
    throw Error(ErrorKind::Config, "unknown toy system '" + name + "'");
  }
  s.parameters["name"] = name;
  return s;
}

}  // namespace gdm
