#pragma once

#include "agct/cegar.hpp"
#include "agct/program.hpp"

namespace oracle {

// The sixteen-state monitor drawn for the motivating example, written out
// by hand: "b" states track b == 0, "n" states track b != 0.
agct::Program expected_first_monitor(const agct::Program& loop);

// The predicates that monitor is built from: false, b == 0, b != 0.
agct::PredicateSet b_predicates(const agct::Program& loop);

}  // namespace oracle
