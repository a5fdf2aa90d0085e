#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "agct/formula.hpp"

namespace agct {

using Loc = int;

struct ProgramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// c * lhs * rhs, the single variable-by-variable factor an expression may hold.
struct NonlinearTerm {
  Int coef = 0;
  VarId lhs = 0;
  VarId rhs = 0;
  bool operator==(const NonlinearTerm&) const = default;
};

// Linear part over Sym::var symbols plus an optional product of two variables.
struct Expr {
  Linear linear;
  std::optional<NonlinearTerm> product;

  Int evaluate(const std::vector<Int>& values) const;
  bool operator==(const Expr&) const = default;
};

struct Update {
  VarId var = 0;
  Expr value;
  bool operator==(const Update&) const = default;
};

// Assign updates its variables simultaneously. Every command carries a guard,
// which is `true` for anything that is not a branch.
struct Command {
  enum class Kind { Assign, Input, Assume };
  Kind kind = Kind::Assume;
  Atom guard = Atom::truth();
  std::vector<Update> updates;
  VarId input_var = -1;

  static Command assume(Atom g);
  static Command assign(std::vector<Update> u);
  static Command input(VarId x);
  bool operator==(const Command&) const = default;
};

// `label` names the transition of the original program this edge stands for;
// `origin` is that transition's index. Both are the edge itself for a
// program built by the frontend and are inherited through products.
struct Transition {
  std::string id;
  std::string label;
  int origin = -1;
  Loc src = 0;
  Loc dst = 0;
  Command command;
};

using GoalSet = std::set<std::string>;

// Input values in the order a run reads them.
using TestCase = std::vector<Int>;

class Program {
 public:
  std::vector<std::string> vars;
  std::vector<std::string> loc_names;
  Loc init = 0;
  std::vector<Transition> edges;

  int num_locs() const { return static_cast<int>(loc_names.size()); }
  const std::vector<int>& out(Loc l) const { return out_[l]; }
  bool is_branch_loc(Loc l) const { return out_[l].size() == 2; }
  int edge_index(std::string_view id) const;
  const Transition& edge(std::string_view id) const;

  // Rebuilds the adjacency index and assigns `src#k` ids in edge order.
  void finalize(bool assign_ids);

  SymNamer namer() const;
  std::string describe(const Transition& t) const;
  std::string command_str(const Command& c) const;

 private:
  std::vector<std::vector<int>> out_;
  std::map<std::string, int, std::less<>> by_id_;
};

Program make_program(std::vector<std::string> vars, int num_locs, Loc init,
                     std::vector<Transition> edges);

// Throws ProgramError when the guarded-command invariants do not hold.
void validate(const Program& p);

GoalSet enumerate_branches(const Program& p);
// Edges whose guard is literally false are treated as absent.
GoalSet graph_reachable_branches(const Program& p);
std::vector<bool> graph_reachable_locs(const Program& p);

// Reachable part of the synchronous product; edges pair up on equal labels.
Program product(const Program& p1, const Program& p2);

// Label-preserving isomorphism of the reachable parts, matched from init.
bool isomorphic(const Program& a, const Program& b);

std::string dot_escape(const std::string& s);
std::string program_dot(const Program& p);

}  // namespace agct
