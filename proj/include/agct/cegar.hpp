#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "agct/formula.hpp"
#include "agct/program.hpp"
#include "agct/solver.hpp"

namespace agct {

// Global predicate list. Index 0 is always `false`; atoms are added together
// with their negation.
class PredicateSet {
 public:
  PredicateSet();

  int size() const { return static_cast<int>(atoms_.size()); }
  const Atom& operator[](int i) const { return atoms_[i]; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  int index_of(const Atom& a) const;
  int negation_of(int i) const { return neg_[i]; }
  // Returns true when a or its negation was new. Constant atoms are ignored.
  bool add(const Atom& a);

 private:
  std::vector<Atom> atoms_;
  std::vector<int> neg_;
  std::map<Atom, int> index_;
};

class PredBits {
 public:
  PredBits() = default;
  explicit PredBits(int n) : w_((n + 63) / 64, 0) {}
  bool test(int i) const { return (w_[i / 64] >> (i % 64)) & 1U; }
  void set(int i) { w_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool subset_of(const PredBits& o) const;
  std::vector<int> members() const;
  bool operator==(const PredBits&) const = default;
  auto operator<=>(const PredBits&) const = default;

 private:
  std::vector<std::uint64_t> w_;
};

struct ArgNode {
  Loc loc = 0;
  PredBits preds;
  bool is_false = false;
  int parent = -1;
  int trans = -1;  // edge index in the program, -1 for the root
  int subsumed_by = -1;
  bool in_reach = false;
  bool dead = false;
  std::vector<int> children;
};

// Abstract reachability tree with subsumption edges. Only nodes with
// in_reach set belong to the final graph.
struct Arg {
  std::vector<ArgNode> nodes;
  int root = 0;
  PredicateSet predicates;

  std::size_t reach_size() const;
  // Follows subsumption to the covering state that is itself uncovered.
  int representative(int n) const;
};

struct McConfig {
  bool refine = true;
  std::size_t max_nodes = 2'000'000;
  std::ostream* query_log = nullptr;
};

struct McOutcome {
  std::vector<TestCase> suite;
  GoalSet remaining;
  GoalSet unreachable;
  PredicateSet predicates;
  Arg arg;
  Int refinements = 0;
  Int restarts = 0;
};

// Predicate abstraction with lazy refinement over the original program.
// The worklist is FIFO; a goal edge is checked when the child for it is
// created, and a spurious counterexample that yields new predicates rebuilds
// the graph from the root. Once fuel runs out no more refinements happen but
// the worklist is still drained so the graph is closed.
McOutcome abstract_mc(const Program& p, PredicateSet pi, const GoalSet& goals, Budget& fuel,
                      const McConfig& cfg = {});

// Cartesian abstract post of one edge, for tests and tools.
PredBits abstract_post(const Program& p, const PredicateSet& pi, const PredBits& a, int edge, Budget& fuel);

// Atoms of the weakest preconditions along an infeasible path, walking back
// until the precondition becomes constant false.
std::vector<Atom> refine(const Program& p, std::span<const int> path);

bool arg_paths_contains(const Program& p, const Arg& arg, std::span<const int> path);

std::string arg_dot(const Program& p, const Arg& arg);
std::string preds_str(const Program& p, const PredicateSet& pi, const PredBits& a);

}  // namespace agct
