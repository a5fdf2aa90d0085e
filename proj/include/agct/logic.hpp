#pragma once

#include <span>
#include <vector>

#include "agct/formula.hpp"
#include "agct/program.hpp"

namespace agct {

// Guard, updates and frame of one transition over Var (pre) and Primed (post)
// symbols. A nonlinear update leaves its target unconstrained.
Conj transition_formula(const Program& p, const Transition& t);

// Var symbols go to step i, Primed to step i+1; inputs are untouched.
Atom shift_index(const Atom& a, int i);
Conj shift_index(const Conj& c, int i);

// y' = y for every variable y other than x.
Conj frame(VarId x, int num_vars);

// SSA constraints per step; the k-th Input on the path is tied to r_k.
std::vector<Conj> path_constraints(const Program& p, std::span<const int> path);
Conj flatten(const std::vector<Conj>& parts);

// Weakest precondition of one atom. Returns `true` when the transition
// havocs a variable the atom mentions.
Atom wp_atom(const Atom& a, const Transition& t);

}  // namespace agct
