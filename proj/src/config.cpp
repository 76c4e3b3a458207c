#include "gdm/config.hpp"

#include <cmath>
#include <memory>

#include "gdm/derham.hpp"
#include "gdm/error.hpp"

namespace gdm {

using nlohmann::json;

Rational json_rational(const json& v, const std::string& field) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(std::to_string(v.get<long long>()));
    if (v.is_number_float()) {
      double d = v.get<double>();
      if (!std::isfinite(d)) throw Error(ErrorKind::Config, "non-finite number");
      // Shortest round-trip text, so 0.1 means 1/10 rather than the nearest double.
      return parse_rational(json(d).dump());
    }
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, "field '" + field + "': " + e.what());
  }
  throw Error(ErrorKind::Config, "field '" + field + "' must be a number or a numeric string");
}

std::vector<Rational> json_rational_list(const json& v, const std::string& field) {
  if (!v.is_array()) throw Error(ErrorKind::Config, "field '" + field + "' must be an array");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(json_rational(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

namespace {

const json& require(const json& params, const std::string& key, const std::string& kind) {
  if (!params.contains(key)) throw Error(ErrorKind::Config, kind + ": missing parameter '" + key + "'");
  return params.at(key);
}

void reject_unknown(const json& params, const std::vector<std::string>& allowed, const std::string& kind) {
  for (auto it = params.begin(); it != params.end(); ++it) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == it.key();
    if (!ok) throw Error(ErrorKind::Config, kind + ": unknown parameter '" + it.key() + "'");
  }
}

std::vector<LftMatrix> parse_matrices(const json& v) {
  if (!v.is_array() || v.size() < 2) throw Error(ErrorKind::Config, "derham_lft: 'matrices' must list at least 2 matrices");
  std::vector<LftMatrix> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& m = v[i];
    std::string name = "matrices[" + std::to_string(i) + "]";
    if (!m.is_array() || m.size() != 2 || !m[0].is_array() || m[0].size() != 2 || !m[1].is_array() || m[1].size() != 2) {
      throw Error(ErrorKind::Config, "derham_lft: " + name + " must be [[a,b],[c,d]]");
    }
    out.push_back(LftMatrix{json_rational(m[0][0], name), json_rational(m[0][1], name), json_rational(m[1][0], name),
                            json_rational(m[1][1], name)});
  }
  return out;
}

DrivenSystem wrap(DeRhamSystem sys) { return derived_system(std::make_shared<const DeRhamSystem>(std::move(sys))); }

}  // namespace

DrivenSystem make_system(const json& config) {
  if (!config.is_object()) throw Error(ErrorKind::Config, "system config must be a JSON object");
  if (!config.contains("kind") || !config.at("kind").is_string()) {
    throw Error(ErrorKind::Config, "system config needs a string 'kind'");
  }
  std::string kind = config.at("kind").get<std::string>();
  json params = config.contains("params") ? config.at("params") : json::object();
  if (!params.is_object()) throw Error(ErrorKind::Config, "'params' must be an object");

  if (kind == "adf") {
    reject_unknown(params, {"y0"}, kind);
    Rational y0 = params.contains("y0") ? json_rational(params.at("y0"), "y0") : Rational(0);
    if (y0 < 0 || y0 > 1) throw Error(ErrorKind::Config, "adf: y0 = " + to_string(y0) + " outside [0,1]");
    return make_adf_exact(y0);
  }
  if (kind == "kusuoka") {
    reject_unknown(params, {"y0", "boundary"}, kind);
    if (params.contains("boundary")) {
      auto b = json_rational_list(params.at("boundary"), "boundary");
      if (b.size() != 3) throw Error(ErrorKind::Config, "kusuoka: 'boundary' needs three values");
      return make_kusuoka_from_harmonic({to_double(b[0]), to_double(b[1]), to_double(b[2])});
    }
    const json& y = require(params, "y0", kind);
    if (!y.is_array() || y.size() != 2) throw Error(ErrorKind::Config, "kusuoka: 'y0' must be [x, y]");
    try {
      return make_kusuoka(to_double(json_rational(y[0], "y0[0]")), to_double(json_rational(y[1], "y0[1]")));
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, std::string("kusuoka: ") + e.what());
    }
  }
  if (kind == "linear") {
    reject_unknown(params, {"weights"}, kind);
    return make_linear(json_rational_list(require(params, "weights", kind), "weights"));
  }
  if (kind == "hata") {
    reject_unknown(params, {"h_modulus_sq", "alpha_modulus_sq"}, kind);
    return make_hata(json_rational(require(params, "h_modulus_sq", kind), "h_modulus_sq"),
                     json_rational(require(params, "alpha_modulus_sq", kind), "alpha_modulus_sq"));
  }
  if (kind == "toy" || kind.rfind("toy:", 0) == 0) {
    std::string name;
    if (kind == "toy") {
      const json& n = require(params, "name", kind);
      if (!n.is_string()) throw Error(ErrorKind::Config, "toy: 'name' must be a string");
      name = n.get<std::string>();
    } else {
      name = kind.substr(4);
    }
    std::map<std::string, Rational> values;
    for (auto it = params.begin(); it != params.end(); ++it) {
      if (it.key() == "name") continue;
      if (it.key() != "p" && it.key() != "eps" && it.key() != "y0") {
        throw Error(ErrorKind::Config, "toy: unknown parameter '" + it.key() + "'");
      }
      values[it.key()] = json_rational(it.value(), it.key());
    }
    return make_toy(name, values);
  }
  if (kind == "derham_lft") {
    reject_unknown(params, {"matrices", "label"}, kind);
    std::string label = params.contains("label") ? params.at("label").get<std::string>() : "derham_lft";
    return wrap(validate(parse_matrices(require(params, "matrices", kind)), label));
  }
  if (kind == "minkowski") {
    reject_unknown(params, {}, kind);
    return wrap(minkowski_system());
  }
  if (kind == "moebius") {
    reject_unknown(params, {"C", "N"}, kind);
    Rational C = json_rational(require(params, "C", kind), "C");
    int N = params.contains("N") ? params.at("N").get<int>() : 2;
    return wrap(validate(moebius_matrices(C, N), "moebius"));
  }
  if (kind == "bernoulli_equiv") {
    reject_unknown(params, {"p", "e0"}, kind);
    auto p = json_rational_list(require(params, "p", kind), "p");
    Rational e0 = json_rational(require(params, "e0", kind), "e0");
    return wrap(validate(bernoulli_equivalence_params(p, e0), "bernoulli_equiv"));
  }
  throw Error(ErrorKind::Config, "unknown system kind '" + kind + "'");
}

DrivenSystem make_system_from_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("invalid JSON: ") + e.what());
  }
  try {
    return make_system(doc);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed config: ") + e.what());
  }
}

std::vector<KindInfo> system_kinds() {
  return {
      {"adf", "y0 in [0,1]", "harmonic restriction to the ADF curve, N=2"},
      {"kusuoka", "y0 [x,y] unit vector | boundary [f(q0),f(q1),f(q2)]", "Kusuoka energy measure on the gasket, N=3, Y=S^1"},
      {"linear", "weights", "Bernoulli measure, one-state system"},
      {"hata", "h_modulus_sq, alpha_modulus_sq", "Hata-type linear system with weights (1/|h|^2, 1-1/|h|^2)"},
      {"toy", "name, p | eps | y0", "l3_counterexample, fixedpoint_half, sqrt_perturbed, epsilon_escape, three_state"},
      {"derham_lft", "matrices [[[a,b],[c,d]], ...]", "de Rham system from linear fractional maps"},
      {"minkowski", "", "Minkowski question-mark function"},
      {"moebius", "C, N", "Moebius-type de Rham system, mu_phi equivalent to Lebesgue"},
      {"bernoulli_equiv", "p, e0", "de Rham system with mu_phi equivalent to mu_p"},
  };
}

}  // namespace gdm
