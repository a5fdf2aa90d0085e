#include "agct/program.hpp"

#include <deque>
#include <sstream>

namespace agct {

Int Expr::evaluate(const std::vector<Int>& values) const {
  Int acc = linear.evaluate([&](Sym s) -> std::optional<Int> { return values.at(s.id); }).value();
  if (product) {
    acc = checked_add(acc, checked_mul(product->coef,
                                       checked_mul(values.at(product->lhs), values.at(product->rhs))));
  }
  return acc;
}

Command Command::assume(Atom g) {
  Command c;
  c.kind = Kind::Assume;
  c.guard = std::move(g);
  return c;
}

Command Command::assign(std::vector<Update> u) {
  Command c;
  c.kind = Kind::Assign;
  c.updates = std::move(u);
  return c;
}

Command Command::input(VarId x) {
  Command c;
  c.kind = Kind::Input;
  c.input_var = x;
  return c;
}

int Program::edge_index(std::string_view id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? -1 : it->second;
}

const Transition& Program::edge(std::string_view id) const {
  int i = edge_index(id);
  if (i < 0) throw ProgramError("unknown transition " + std::string(id));
  return edges[i];
}

void Program::finalize(bool assign_ids) {
  out_.assign(loc_names.size(), {});
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto& e = edges[i];
    if (e.src < 0 || e.src >= num_locs() || e.dst < 0 || e.dst >= num_locs())
      throw ProgramError("edge endpoint out of range");
    if (assign_ids) e.id = loc_names[e.src] + "#" + std::to_string(out_[e.src].size());
    out_[e.src].push_back(static_cast<int>(i));
  }
  by_id_.clear();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].label.empty()) edges[i].label = edges[i].id;
    if (edges[i].origin < 0) edges[i].origin = static_cast<int>(i);
    if (!by_id_.emplace(edges[i].id, static_cast<int>(i)).second)
      throw ProgramError("duplicate transition id " + edges[i].id);
  }
}

SymNamer Program::namer() const {
  return [this](Sym s) -> std::string {
    if (s.kind == Sym::Kind::Input) return "r" + std::to_string(s.id);
    std::string base = s.id >= 0 && s.id < static_cast<int>(vars.size()) ? vars[s.id] : default_name(s);
    if (s.kind == Sym::Kind::Primed) return base + "'";
    if (s.kind == Sym::Kind::Indexed) return base + "_" + std::to_string(s.step);
    return base;
  };
}

std::string Program::command_str(const Command& c) const {
  auto name = namer();
  switch (c.kind) {
    case Command::Kind::Assume: return "skip";
    case Command::Kind::Input: return vars[c.input_var] + " := input()";
    case Command::Kind::Assign: {
      std::string out;
      for (std::size_t i = 0; i < c.updates.size(); ++i) {
        const auto& u = c.updates[i];
        if (i) out += ", ";
        out += vars[u.var] + " := ";
        std::string lin = u.value.linear.str(name);
        if (u.value.product) {
          const auto& nl = *u.value.product;
          std::string prod = (nl.coef == 1 ? "" : std::to_string(nl.coef) + "*") + vars[nl.lhs] + "*" + vars[nl.rhs];
          out += u.value.linear == Linear() ? prod : prod + " + " + lin;
        } else {
          out += lin;
        }
      }
      return out;
    }
  }
  return "?";
}

std::string Program::describe(const Transition& t) const {
  return t.command.guard.str(namer()) + " / " + command_str(t.command);
}

Program make_program(std::vector<std::string> vars, int num_locs, Loc init,
                     std::vector<Transition> edges) {
  Program p;
  p.vars = std::move(vars);
  for (int i = 0; i < num_locs; ++i) p.loc_names.push_back(std::to_string(i + 1));
  p.init = init;
  p.edges = std::move(edges);
  p.finalize(true);
  return p;
}

void validate(const Program& p) {
  if (p.init < 0 || p.init >= p.num_locs()) throw ProgramError("init location out of range");
  const int nv = static_cast<int>(p.vars.size());
  auto check_atom = [&](const Atom& a) {
    for (const auto& [s, c] : a.lhs().terms())
      if (s.kind != Sym::Kind::Var || s.id < 0 || s.id >= nv) throw ProgramError("guard over unknown symbol");
  };
  for (Loc l = 0; l < p.num_locs(); ++l) {
    const auto& out = p.out(l);
    if (out.size() > 2) throw ProgramError("location " + p.loc_names[l] + " has more than two successors");
    for (int e : out) check_atom(p.edges[e].command.guard);
    if (out.size() == 2) {
      const auto& a = p.edges[out[0]];
      const auto& b = p.edges[out[1]];
      if (a.command.kind != Command::Kind::Assume || b.command.kind != Command::Kind::Assume)
        throw ProgramError("branch at " + p.loc_names[l] + " must be a pair of assumes");
      if (a.command.guard.negated() != b.command.guard)
        throw ProgramError("branch guards at " + p.loc_names[l] + " are not complementary");
    }
  }
  for (const auto& e : p.edges) {
    if (e.command.kind == Command::Kind::Input && (e.command.input_var < 0 || e.command.input_var >= nv))
      throw ProgramError("input into unknown variable");
    for (const auto& u : e.command.updates) {
      if (u.var < 0 || u.var >= nv) throw ProgramError("assignment to unknown variable");
      for (const auto& [s, c] : u.value.linear.terms())
        if (s.kind != Sym::Kind::Var || s.id >= nv) throw ProgramError("expression over unknown symbol");
    }
  }
}

GoalSet enumerate_branches(const Program& p) {
  GoalSet g;
  for (Loc l = 0; l < p.num_locs(); ++l)
    if (p.is_branch_loc(l))
      for (int e : p.out(l))
        if (!p.edges[e].command.guard.is_false()) g.insert(p.edges[e].id);
  return g;
}

std::vector<bool> graph_reachable_locs(const Program& p) {
  std::vector<bool> seen(p.num_locs(), false);
  std::deque<Loc> q{p.init};
  seen[p.init] = true;
  while (!q.empty()) {
    Loc l = q.front();
    q.pop_front();
    for (int e : p.out(l)) {
      if (p.edges[e].command.guard.is_false()) continue;
      Loc d = p.edges[e].dst;
      if (!seen[d]) {
        seen[d] = true;
        q.push_back(d);
      }
    }
  }
  return seen;
}

GoalSet graph_reachable_branches(const Program& p) {
  auto seen = graph_reachable_locs(p);
  GoalSet g;
  for (Loc l = 0; l < p.num_locs(); ++l)
    if (seen[l] && p.is_branch_loc(l))
      for (int e : p.out(l))
        if (!p.edges[e].command.guard.is_false()) g.insert(p.edges[e].id);
  return g;
}

Program product(const Program& p1, const Program& p2) {
  if (p1.vars != p2.vars) throw ProgramError("product of programs over different variables");
  Program out;
  out.vars = p1.vars;
  std::map<std::pair<Loc, Loc>, Loc> index;
  std::deque<std::pair<Loc, Loc>> q;
  auto intern = [&](Loc a, Loc b) {
    auto [it, fresh] = index.emplace(std::make_pair(a, b), out.num_locs());
    if (fresh) {
      out.loc_names.push_back("(" + p1.loc_names[a] + "," + p2.loc_names[b] + ")");
      q.emplace_back(a, b);
    }
    return it->second;
  };
  out.init = intern(p1.init, p2.init);
  while (!q.empty()) {
    auto [a, b] = q.front();
    q.pop_front();
    Loc src = index.at({a, b});
    for (int e1 : p1.out(a)) {
      const auto& t1 = p1.edges[e1];
      for (int e2 : p2.out(b)) {
        const auto& t2 = p2.edges[e2];
        if (t1.label != t2.label) continue;
        Transition t;
        t.label = t1.label;
        t.origin = t1.origin;
        t.src = src;
        t.dst = intern(t1.dst, t2.dst);
        t.command = t1.command;
        out.edges.push_back(std::move(t));
      }
    }
  }
  out.finalize(true);
  return out;
}

bool isomorphic(const Program& a, const Program& b) {
  if (a.vars != b.vars) return false;
  std::vector<Loc> fwd(a.num_locs(), -1), bwd(b.num_locs(), -1);
  std::deque<std::pair<Loc, Loc>> q{{a.init, b.init}};
  fwd[a.init] = b.init;
  bwd[b.init] = a.init;
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop_front();
    if (a.out(x).size() != b.out(y).size()) return false;
    for (int ea : a.out(x)) {
      const auto& ta = a.edges[ea];
      const Transition* match = nullptr;
      for (int eb : b.out(y)) {
        const auto& tb = b.edges[eb];
        if (tb.label != ta.label) continue;
        if (match) throw ProgramError("isomorphism check needs label-deterministic programs");
        match = &tb;
      }
      if (!match || !(match->command == ta.command)) return false;
      Loc u = ta.dst, v = match->dst;
      if (fwd[u] == -1 && bwd[v] == -1) {
        fwd[u] = v;
        bwd[v] = u;
        q.emplace_back(u, v);
      } else if (fwd[u] != v || bwd[v] != u) {
        return false;
      }
    }
  }
  return true;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string program_dot(const Program& p) {
  std::ostringstream os;
  os << "digraph program {\n  node [shape=circle];\n";
  for (Loc l = 0; l < p.num_locs(); ++l) {
    os << "  n" << l << " [label=\"" << dot_escape(p.loc_names[l]) << "\"";
    if (l == p.init) os << ", shape=doublecircle";
    os << "];\n";
  }
  for (const auto& e : p.edges)
    os << "  n" << e.src << " -> n" << e.dst << " [label=\"" << dot_escape(e.id + ": " + p.describe(e))
       << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace agct
