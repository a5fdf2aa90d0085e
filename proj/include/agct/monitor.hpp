#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agct/cegar.hpp"
#include "agct/program.hpp"

namespace agct {

// Finite automaton over transition labels read off a closed ARG. Its
// locations are the uncovered states; an edge into a covered state is
// redirected to the state covering it.
struct Monitor {
  Program program;
  std::vector<bool> redirected;  // per edge
  std::vector<int> arg_node;     // per location
  std::vector<std::string> state_labels;
};

Monitor monitor_from_arg(const Program& p, const Arg& arg);
bool is_deterministic(const Monitor& m);
std::string monitor_dot(const Monitor& m);

struct ProductCursor {
  Loc base = 0;
  std::vector<Loc> mons;
  auto operator<=>(const ProductCursor&) const = default;
};

// The program composed with a chain of monitors, stepped lazily. Edges keep
// the base program's labels, guards and commands.
class ProductSpace {
 public:
  explicit ProductSpace(const Program& base);

  void add_monitor(Monitor m);
  const Program& base() const { return *base_; }
  std::size_t num_monitors() const { return monitors_.size(); }
  const Monitor& monitor(std::size_t i) const { return monitors_[i]; }

  ProductCursor initial() const;
  // Next cursor when the base edge with this origin fires, if every monitor
  // accepts the label.
  std::optional<ProductCursor> step(const ProductCursor& c, int origin) const;
  bool allows(const ProductCursor& c, int origin) const;

  // Reachable part as an explicit program.
  Program materialize() const;

 private:
  const Program* base_;
  std::vector<Monitor> monitors_;
  std::vector<std::vector<int>> next_;  // per monitor, [loc * origins + origin]
  int origins_;
};

std::optional<ProductCursor> step_product(const ProductSpace& s, const ProductCursor& c, std::string_view label);

// Product branch id -> original branch id, for product edges whose label is a goal.
using LiftedGoalSet = std::map<std::string, std::string>;
LiftedGoalSet lift_goals(const GoalSet& goals, const Program& product);

}  // namespace agct
