#pragma once

#include <random>
#include <string>

namespace gen {

struct Options {
  int max_inputs = 3;
  int top_stmts = 5;
  bool loops = true;
};

// Random source text in the mini-language. Loops are counter-bounded and
// inputs only occur outside loops, so each run reads at most max_inputs.
std::string random_program(std::mt19937_64& rng, const Options& opt);

}  // namespace gen
