#include "agct/logic.hpp"

#include <set>

namespace agct {

namespace {

std::set<VarId> written(const Command& c) {
  std::set<VarId> w;
  if (c.kind == Command::Kind::Input) w.insert(c.input_var);
  for (const auto& u : c.updates) w.insert(u.var);
  return w;
}

}  // namespace

Conj transition_formula(const Program& p, const Transition& t) {
  const auto& c = t.command;
  Conj out;
  if (!c.guard.is_true()) out.push_back(c.guard);
  auto w = written(c);
  for (VarId y = 0; y < static_cast<VarId>(p.vars.size()); ++y)
    if (!w.contains(y)) out.push_back(Atom::make(Linear::of(Sym::primed(y)), Rel::Eq, Linear::of(Sym::var(y))));
  for (const auto& u : c.updates)
    if (!u.value.product) out.push_back(Atom::make(Linear::of(Sym::primed(u.var)), Rel::Eq, u.value.linear));
  return out;
}

Atom shift_index(const Atom& a, int i) {
  return a.rename([i](Sym s) {
    switch (s.kind) {
      case Sym::Kind::Var: return Sym::indexed(s.id, i);
      case Sym::Kind::Primed: return Sym::indexed(s.id, i + 1);
      default: return s;
    }
  });
}

Conj shift_index(const Conj& c, int i) {
  Conj out;
  out.reserve(c.size());
  for (const auto& a : c) out.push_back(shift_index(a, i));
  return out;
}

Conj frame(VarId x, int num_vars) {
  Conj out;
  for (VarId y = 0; y < num_vars; ++y)
    if (y != x) out.push_back(Atom::make(Linear::of(Sym::primed(y)), Rel::Eq, Linear::of(Sym::var(y))));
  return out;
}

std::vector<Conj> path_constraints(const Program& p, std::span<const int> path) {
  std::vector<Conj> out;
  int k = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto& t = p.edges.at(path[i]);
    Conj c = shift_index(transition_formula(p, t), static_cast<int>(i));
    if (t.command.kind == Command::Kind::Input) {
      c.push_back(Atom::make(Linear::of(Sym::indexed(t.command.input_var, static_cast<int>(i) + 1)), Rel::Eq,
                             Linear::of(Sym::input(k))));
      ++k;
    }
    out.push_back(std::move(c));
  }
  return out;
}

Conj flatten(const std::vector<Conj>& parts) {
  Conj out;
  for (const auto& c : parts) out.insert(out.end(), c.begin(), c.end());
  return out;
}

Atom wp_atom(const Atom& a, const Transition& t) {
  const auto& c = t.command;
  switch (c.kind) {
    case Command::Kind::Assume: return a;
    case Command::Kind::Input: return a.mentions(Sym::var(c.input_var)) ? Atom::truth() : a;
    case Command::Kind::Assign: {
      for (const auto& u : c.updates)
        if (u.value.product && a.mentions(Sym::var(u.var))) return Atom::truth();
      return a.substitute([&](Sym s) -> std::optional<Linear> {
        if (s.kind != Sym::Kind::Var) return std::nullopt;
        for (const auto& u : c.updates)
          if (u.var == s.id) return u.value.linear;
        return std::nullopt;
      });
    }
  }
  return a;
}

}  // namespace agct
