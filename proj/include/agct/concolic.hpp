#pragma once

#include <climits>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "agct/monitor.hpp"
#include "agct/program.hpp"
#include "agct/solver.hpp"

namespace agct {

enum class StrategyKind { Dfs, RandomBranch, UniformRandom, CfgGuided };

struct Strategy {
  StrategyKind kind = StrategyKind::Dfs;
  std::uint64_t seed = 0;
};

std::optional<StrategyKind> parse_strategy(std::string_view name);
std::string strategy_name(StrategyKind k);

struct ConcolicConfig {
  Strategy strategy;
  Int rand_range = 1000;
  int step_cap = 10000;
  // End a run as soon as no remaining goal is reachable in the graph.
  bool cut_hopeless = true;
  bool record_trace = false;
  std::ostream* query_log = nullptr;
};

struct RunTrace {
  TestCase test;
  std::vector<int> decisions;  // base edge taken at each recorded branch
  int parent_run = -1;         // run whose path was flipped to get this test
  int flipped = -1;            // index of the negated constraint in that path
  int concretizations = 0;
};

struct ConcolicResult {
  std::vector<TestCase> suite;
  GoalSet remaining;
  Int paths = 0;
  Int concretizations = 0;
  std::vector<RunTrace> trace;
};

// Goals are labels of the base program. Runs follow the product, so an
// edge some monitor rejects ends the run and is never a flip target.
ConcolicResult concolic_test(const ProductSpace& space, const GoalSet& goals, Budget& fuel, const ConcolicConfig& cfg);
ConcolicResult concolic_test(const Program& p, const GoalSet& goals, Budget& fuel, const ConcolicConfig& cfg);

constexpr int kFar = INT_MAX;

// Edge count from each location to the nearest source of an edge whose
// label is a goal; kFar when there is none.
std::vector<int> compute_cfg_distances(const Program& p, const GoalSet& goal_labels);

// Symbolic value of an expression. A variable-by-variable product
// concretizes the factor mentioning fewer inputs. On a tie the second
// factor goes, in the order the parser stores them (by variable index).
struct SymValue {
  Linear expr;
  bool concretized = false;
};
SymValue sym_eval(const Expr& e, const std::vector<Int>& concrete, const std::vector<Linear>& sym);

// Uniform draw in [lo, hi] that does not depend on the standard library's
// distribution implementation.
Int draw(std::mt19937_64& rng, Int lo, Int hi);

struct ReplayResult {
  std::vector<int> path;
  GoalSet covered;
  TestCase consumed;  // the test padded with whatever extra inputs were read
  bool terminated = false;
};

// Concrete run; inputs past the end of the test are drawn from a generator
// seeded with `seed`.
ReplayResult replay(const Program& p, const TestCase& t, int step_cap, Int rand_range, std::uint64_t seed);

}  // namespace agct
