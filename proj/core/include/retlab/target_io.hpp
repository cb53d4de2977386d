#pragma once

// JSON round-trip for cached hitting sequences and dyadic targets.
// Schema: docs/schemas.md.

#include <string>
#include <string_view>

#include "retlab/targets.hpp"

namespace retlab {

std::string hitting_to_json(const HittingSequence& h);
HittingSequence hitting_from_json(std::string_view text);

std::string dyadic_to_json(const DyadicTarget& t);
DyadicTarget dyadic_from_json(std::string_view text);

}  // namespace retlab
