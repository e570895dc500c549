#pragma once

#include <string>

#include <json.hpp>

#include "mlsos/apps.hpp"
#include "mlsos/hierarchy.hpp"
#include "mlsos/mlp.hpp"

namespace mlsos::io {

using nlohmann::json;

// Problem files carry 1-based block/coordinate indices; unknown fields are
// rejected. Throws InputError with the offending field (and line for syntax
// errors).
mlp::MultilinearProgram parse_problem(const std::string& text);
json emit_problem(const mlp::MultilinearProgram& p);

apps::BimatrixGame parse_game(const std::string& text);          // {"A": [[..]], "B": [[..]]}
apps::ContainmentInstance parse_containment(const std::string& text);

// Report emission; values are mapped back to the program's original sense.
json report_to_json(const mlp::MultilinearProgram& p, const hierarchy::HierarchyReport& rep,
                    const std::string& digest, double wall_seconds);
std::string report_to_text(const mlp::MultilinearProgram& p, const hierarchy::HierarchyReport& rep);

std::string fnv1a_digest(const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace mlsos::io
