#pragma once

#include <iosfwd>
#include <vector>

#include "badgesim/dataset.hpp"
#include "badgesim/sequence_mining.hpp"

namespace badgesim {

// JSON Lines, one rule per line: {"ant": [badge ids], "con": badge id, "conf": float}.
void write_rules(const std::vector<Rule>& rules, const Dataset& catalog, std::ostream& out);

// Badge ids are resolved against `catalog`; unknown ids and confidences
// outside (0, 1] are parse errors.
std::vector<Rule> read_rules(std::istream& in, const Dataset& catalog);

}  // namespace badgesim
