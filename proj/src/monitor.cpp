#include "agct/monitor.hpp"

#include <deque>
#include <set>
#include <sstream>

namespace agct {

Monitor monitor_from_arg(const Program& p, const Arg& arg) {
  Monitor m;
  m.program.vars = p.vars;
  std::map<int, Loc> loc_of;
  for (std::size_t i = 0; i < arg.nodes.size(); ++i) {
    const auto& n = arg.nodes[i];
    if (!n.in_reach || n.subsumed_by >= 0) continue;
    loc_of[static_cast<int>(i)] = m.program.num_locs();
    m.program.loc_names.push_back("s" + std::to_string(i));
    m.arg_node.push_back(static_cast<int>(i));
    m.state_labels.push_back(p.loc_names[n.loc] + ": " + preds_str(p, arg.predicates, n.preds));
  }
  m.program.init = loc_of.at(arg.root);
  for (std::size_t i = 0; i < arg.nodes.size(); ++i) {
    const auto& c = arg.nodes[i];
    if (!c.in_reach || c.parent < 0) continue;
    Transition t;
    const auto& orig = p.edges[c.trans];
    t.label = orig.label;
    t.origin = orig.origin;
    t.command = orig.command;
    t.src = loc_of.at(c.parent);
    t.dst = loc_of.at(arg.representative(static_cast<int>(i)));
    m.program.edges.push_back(std::move(t));
    m.redirected.push_back(c.subsumed_by >= 0);
  }
  m.program.finalize(true);
  return m;
}

bool is_deterministic(const Monitor& m) {
  for (Loc l = 0; l < m.program.num_locs(); ++l) {
    std::set<std::string> seen;
    for (int e : m.program.out(l))
      if (!seen.insert(m.program.edges[e].label).second) return false;
  }
  return true;
}

std::string monitor_dot(const Monitor& m) {
  std::ostringstream os;
  os << "digraph monitor {\n  node [shape=box];\n";
  for (Loc l = 0; l < m.program.num_locs(); ++l) {
    os << "  " << m.program.loc_names[l] << " [label=\"" << dot_escape(m.state_labels[l]) << "\"";
    if (l == m.program.init) os << ", peripheries=2";
    os << "];\n";
  }
  for (std::size_t i = 0; i < m.program.edges.size(); ++i) {
    const auto& e = m.program.edges[i];
    os << "  " << m.program.loc_names[e.src] << " -> " << m.program.loc_names[e.dst] << " [label=\""
       << dot_escape(e.label) << "\"";
    if (m.redirected[i]) os << ", style=dashed, color=blue";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

ProductSpace::ProductSpace(const Program& base) : base_(&base), origins_(static_cast<int>(base.edges.size())) {}

void ProductSpace::add_monitor(Monitor m) {
  std::vector<int> table(static_cast<std::size_t>(m.program.num_locs()) * origins_, -1);
  for (const auto& e : m.program.edges) {
    if (e.origin < 0 || e.origin >= origins_ || base_->edges[e.origin].label != e.label)
      throw ProgramError("monitor edge " + e.label + " does not match the base program");
    table[static_cast<std::size_t>(e.src) * origins_ + e.origin] = e.dst;
  }
  next_.push_back(std::move(table));
  monitors_.push_back(std::move(m));
}

ProductCursor ProductSpace::initial() const {
  ProductCursor c;
  c.base = base_->init;
  for (const auto& m : monitors_) c.mons.push_back(m.program.init);
  return c;
}

bool ProductSpace::allows(const ProductCursor& c, int origin) const {
  for (std::size_t i = 0; i < monitors_.size(); ++i)
    if (next_[i][static_cast<std::size_t>(c.mons[i]) * origins_ + origin] < 0) return false;
  return true;
}

std::optional<ProductCursor> ProductSpace::step(const ProductCursor& c, int origin) const {
  const auto& e = base_->edges[origin];
  if (e.src != c.base) return std::nullopt;
  ProductCursor out;
  out.base = e.dst;
  out.mons.resize(monitors_.size());
  for (std::size_t i = 0; i < monitors_.size(); ++i) {
    int d = next_[i][static_cast<std::size_t>(c.mons[i]) * origins_ + origin];
    if (d < 0) return std::nullopt;
    out.mons[i] = d;
  }
  return out;
}

Program ProductSpace::materialize() const {
  Program out;
  out.vars = base_->vars;
  std::map<ProductCursor, Loc> index;
  std::deque<ProductCursor> q;
  auto intern = [&](const ProductCursor& c) {
    auto [it, fresh] = index.emplace(c, out.num_locs());
    if (fresh) {
      std::string name = "(" + base_->loc_names[c.base];
      for (std::size_t i = 0; i < c.mons.size(); ++i) name += "," + monitors_[i].program.loc_names[c.mons[i]];
      out.loc_names.push_back(name + ")");
      q.push_back(c);
    }
    return it->second;
  };
  out.init = intern(initial());
  while (!q.empty()) {
    ProductCursor c = q.front();
    q.pop_front();
    Loc src = index.at(c);
    for (int e : base_->out(c.base)) {
      auto n = step(c, e);
      if (!n) continue;
      Transition t;
      t.label = base_->edges[e].label;
      t.origin = base_->edges[e].origin;
      t.command = base_->edges[e].command;
      t.src = src;
      t.dst = intern(*n);
      out.edges.push_back(std::move(t));
    }
  }
  out.finalize(true);
  return out;
}

std::optional<ProductCursor> step_product(const ProductSpace& s, const ProductCursor& c, std::string_view label) {
  for (int e : s.base().out(c.base))
    if (s.base().edges[e].label == label) return s.step(c, e);
  return std::nullopt;
}

LiftedGoalSet lift_goals(const GoalSet& goals, const Program& product) {
  LiftedGoalSet out;
  for (const auto& e : product.edges)
    if (goals.contains(e.label)) out.emplace(e.id, e.label);
  return out;
}

}  // namespace agct
