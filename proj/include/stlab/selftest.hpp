#pragma once

#include <ostream>

namespace stlab {

// Runs the full acceptance suite, printing one pass/fail line per criterion.
// Returns the number of failed criteria (0 on a clean run).
int run_acceptance_suite(std::ostream& out);

}  // namespace stlab
