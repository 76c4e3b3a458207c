#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

#include "gdm/conditions.hpp"
#include "gdm/error.hpp"
#include "gdm/dimension.hpp"
#include "gdm/singularity.hpp"

namespace gdm {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

/// Entry point shared by the gdm binary and the tests. args excludes argv[0].
/// Returns the process exit code; errors are written to `err` as JSON.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int exit_code(ErrorKind kind);

std::string sha256_hex(const std::string& bytes);

nlohmann::json to_json(const ConditionVerdict& verdict);
nlohmann::json to_json(const DimReport& report);
nlohmann::json to_json(const HellingerResult& result);
nlohmann::json to_json(const SingularityReport& report);

/// "1/3", "0.25", "inf" for scalar spaces; "x,y" for the circle; an index
/// for finite sets.
State parse_state(const DrivenSystem& system, const std::string& text);

}  // namespace gdm
