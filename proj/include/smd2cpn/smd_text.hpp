#pragma once

#include <string>
#include <string_view>

#include "smd2cpn/smd_model.hpp"

namespace smd2cpn {

/// Parses SMDL source. Throws ParseError (with 1-based line/column) on
/// syntax errors; the result is not validated.
StateMachineModel parse_smdl(std::string_view text);

/// parse_smdl followed by validate(); throws ValidationError.
StateMachineModel load_smdl(std::string_view text);

/// Canonical SMDL: siblings sorted by name with the final state last,
/// transitions by id, variables by name, 2-space indentation.
std::string print_smdl(const StateMachineModel& model);

}  // namespace smd2cpn
