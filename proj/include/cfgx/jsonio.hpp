#pragma once

#include <json.hpp>

#include "cfgx/graph.hpp"
#include "cfgx/insn.hpp"

namespace cfgx {

// JSON converters for the documented wire formats. `where` is a JSON-path
// style location used in error messages.
nlohmann::json instruction_to_json(const InstructionFields& f);
InstructionFields instruction_from_json(const nlohmann::json& j,
                                        const std::string& where);

nlohmann::json graph_to_json(const CFGraph& g);
CFGraph graph_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace cfgx
