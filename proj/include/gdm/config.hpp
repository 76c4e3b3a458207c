#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "gdm/systems.hpp"

namespace gdm {

/// Builds a validated system from {"kind": ..., "params": {...}}.
/// Kinds: adf, kusuoka, linear, hata, toy (or "toy:<name>"), derham_lft,
/// minkowski, moebius, bernoulli_equiv. Numbers may be JSON numbers or
/// strings ("1/3", "0.25"); strings are parsed exactly.
DrivenSystem make_system(const nlohmann::json& config);
DrivenSystem make_system_from_text(const std::string& text);

Rational json_rational(const nlohmann::json& value, const std::string& field);
std::vector<Rational> json_rational_list(const nlohmann::json& value, const std::string& field);

struct KindInfo {
  std::string kind;
  std::string params;
  std::string summary;
};

std::vector<KindInfo> system_kinds();

}  // namespace gdm
