#include "agct/cegar.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

#include "agct/logic.hpp"

namespace agct {

PredicateSet::PredicateSet() {
  atoms_.push_back(Atom::falsity());
  neg_.push_back(-1);
  index_.emplace(atoms_[0], 0);
}

int PredicateSet::index_of(const Atom& a) const {
  auto it = index_.find(a);
  return it == index_.end() ? -1 : it->second;
}

bool PredicateSet::add(const Atom& a) {
  if (a.is_constant() || index_.contains(a)) return false;
  Atom n = a.negated();
  int i = size();
  atoms_.push_back(a);
  atoms_.push_back(n);
  neg_.push_back(i + 1);
  neg_.push_back(i);
  index_.emplace(a, i);
  index_.emplace(n, i + 1);
  return true;
}

bool PredBits::subset_of(const PredBits& o) const {
  for (std::size_t i = 0; i < w_.size(); ++i)
    if (w_[i] & ~o.w_[i]) return false;
  return true;
}

std::vector<int> PredBits::members() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    std::uint64_t w = w_[i];
    while (w) {
      int b = std::countr_zero(w);
      out.push_back(static_cast<int>(i * 64 + b));
      w &= w - 1;
    }
  }
  return out;
}

std::size_t Arg::reach_size() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const ArgNode& n) { return n.in_reach; }));
}

int Arg::representative(int n) const {
  while (nodes[n].subsumed_by >= 0) n = nodes[n].subsumed_by;
  return n;
}

namespace {

std::set<VarId> written(const Command& c) {
  std::set<VarId> w;
  if (c.kind == Command::Kind::Input) w.insert(c.input_var);
  for (const auto& u : c.updates) w.insert(u.var);
  return w;
}

// Concretization of a predicate set. Single-variable bounds are reduced to
// the tightest one per direction.
Conj gamma(const PredicateSet& pi, const PredBits& a) {
  Conj out;
  std::map<std::pair<Sym, Int>, Int> bound;  // (var, coef sign) -> tightest constant
  for (int i : a.members()) {
    const Atom& at = pi[i];
    const auto& terms = at.lhs().terms();
    if (at.rel() == Rel::Le && terms.size() == 1) {
      auto key = std::make_pair(terms[0].first, terms[0].second);
      Int c = at.lhs().constant();
      auto [it, fresh] = bound.emplace(key, c);
      if (!fresh) it->second = std::max(it->second, c);
      continue;
    }
    out.push_back(at);
  }
  for (const auto& [key, c] : bound) out.push_back(Atom::make(Linear::of(key.first, key.second) + Linear(c), Rel::Le));
  return out;
}

class PostEngine {
 public:
  PostEngine(const Program& p, const PredicateSet& pi, Budget& fuel, std::ostream* log = nullptr)
      : p_(p), pi_(pi), fuel_(fuel) {
    solver_.set_query_log(log);
    for (const auto& e : p.edges) {
      writes_.push_back(written(e.command));
      formula_.push_back(shift_index(transition_formula(p, e), 0));
    }
    for (int i = 0; i < pi.size(); ++i) {
      std::set<VarId> vs;
      for (const auto& t : pi[i].lhs().terms()) vs.insert(t.first.id);
      pred_vars_.push_back(std::move(vs));
      shifted_.push_back(shift_index(pi[i], 1));
    }
  }

  PredBits post(const PredBits& a, int edge) {
    auto key = std::make_pair(a, edge);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    PredBits out = compute(a, edge);
    cache_.emplace(std::move(key), out);
    return out;
  }

 private:
  const Program& p_;
  const PredicateSet& pi_;
  Budget& fuel_;
  Solver solver_;
  std::vector<std::set<VarId>> writes_;
  std::vector<Conj> formula_;
  std::vector<std::set<VarId>> pred_vars_;
  std::vector<Atom> shifted_;
  std::map<std::pair<PredBits, int>, PredBits> cache_;

  PredBits compute(const PredBits& a, int edge) {
    const auto& cmd = p_.edges[edge].command;
    Conj base = shift_index(gamma(pi_, a), 0);
    base.insert(base.end(), formula_[edge].begin(), formula_[edge].end());
    PredBits out(pi_.size());
    if (solver_.check(base, &fuel_).status == SatStatus::Unsat) {
      out.set(0);
      return out;
    }
    const bool plain = cmd.guard.is_true();
    for (int i = 1; i < pi_.size(); ++i) {
      bool touched = std::any_of(pred_vars_[i].begin(), pred_vars_[i].end(),
                                 [&](VarId v) { return writes_[edge].contains(v); });
      if (!touched) {
        if (a.test(i)) {
          out.set(i);
          continue;
        }
        if (a.test(pi_.negation_of(i)) || plain) continue;
      }
      if (solver_.implies(base, shifted_[i], &fuel_)) out.set(i);
    }
    return out;
  }
};

TestCase test_from_model(const Program& p, std::span<const int> path, const Valuation& m) {
  TestCase t;
  for (int e : path)
    if (p.edges[e].command.kind == Command::Kind::Input) {
      auto it = m.find(Sym::input(static_cast<int>(t.size())));
      t.push_back(it == m.end() ? 0 : it->second);
    }
  return t;
}

class Builder {
 public:
  Builder(const Program& p, const PredicateSet& pi, Budget& fuel, const McConfig& cfg)
      : p_(p), pi_(pi), fuel_(fuel), cfg_(cfg), post_(p, pi, fuel, cfg.query_log), live_(p.num_locs()) {
    arg_.predicates = pi;
    solver_.set_query_log(cfg.query_log);
  }

  // Runs the worklist. Returns the refinement atoms of the first spurious
  // goal path that yields new predicates, or nullopt once the graph closes.
  std::optional<std::vector<Atom>> run(std::set<int>& goals, std::vector<TestCase>& suite) {
    ArgNode root;
    root.loc = p_.init;
    root.preds = PredBits(pi_.size());
    arg_.nodes.push_back(root);
    work_.push_back(0);
    while (!work_.empty()) {
      int n = work_.front();
      work_.pop_front();
      if (arg_.nodes[n].is_false || arg_.nodes[n].dead || arg_.nodes[n].subsumed_by >= 0) continue;
      arg_.nodes[n].in_reach = true;
      if (try_cover(n)) continue;
      absorb(n);
      live_[arg_.nodes[n].loc].push_back(n);
      if (auto atoms = expand(n, goals, suite)) return atoms;
    }
    return std::nullopt;
  }

  Arg take() { return std::move(arg_); }

 private:
  const Program& p_;
  const PredicateSet& pi_;
  Budget& fuel_;
  const McConfig& cfg_;
  PostEngine post_;
  Solver solver_;
  Arg arg_;
  std::deque<int> work_;
  std::vector<std::vector<int>> live_;      // uncovered, live nodes per location
  std::map<int, std::vector<int>> covers_;  // subsumer -> nodes it covers

  bool try_cover(int n) {
    const auto& node = arg_.nodes[n];
    for (int m : live_[node.loc]) {
      if (m == n) continue;
      if (arg_.nodes[m].preds.subset_of(node.preds)) {
        arg_.nodes[n].subsumed_by = m;
        covers_[m].push_back(n);
        return true;
      }
    }
    return false;
  }

  // A new state that is more general than existing ones takes their place.
  // Ancestors are left alone; the subtree below a replaced state is dropped
  // and whatever it covered goes back on the worklist.
  void absorb(int n) {
    auto& vec = live_[arg_.nodes[n].loc];
    std::set<int> ancestors;
    bool have_ancestors = false;
    for (std::size_t k = 0; k < vec.size();) {
      int m = vec[k];
      const auto& a = arg_.nodes[n].preds;
      const auto& b = arg_.nodes[m].preds;
      if (m != n && a.subset_of(b) && !(a == b)) {
        if (!have_ancestors) {
          for (int x = arg_.nodes[n].parent; x >= 0; x = arg_.nodes[x].parent) ancestors.insert(x);
          have_ancestors = true;
        }
        if (!ancestors.contains(m)) {
          arg_.nodes[m].subsumed_by = n;
          covers_[n].push_back(m);
          vec.erase(vec.begin() + static_cast<std::ptrdiff_t>(k));
          kill_below(m);
          continue;
        }
      }
      ++k;
    }
  }

  void kill_below(int m) {
    std::vector<int> stack(arg_.nodes[m].children.begin(), arg_.nodes[m].children.end());
    arg_.nodes[m].children.clear();
    std::vector<int> killed;
    while (!stack.empty()) {
      int d = stack.back();
      stack.pop_back();
      auto& node = arg_.nodes[d];
      if (node.dead) continue;
      node.dead = true;
      node.in_reach = false;
      killed.push_back(d);
      auto& vec = live_[node.loc];
      vec.erase(std::remove(vec.begin(), vec.end(), d), vec.end());
      stack.insert(stack.end(), node.children.begin(), node.children.end());
    }
    for (int d : killed) {
      auto it = covers_.find(d);
      if (it == covers_.end()) continue;
      for (int z : it->second) {
        auto& node = arg_.nodes[z];
        if (node.dead || node.subsumed_by != d) continue;
        node.subsumed_by = -1;
        work_.push_back(z);
      }
      covers_.erase(it);
    }
  }

  std::vector<int> tree_path(int n) const {
    std::vector<int> path;
    for (int x = n; arg_.nodes[x].parent >= 0; x = arg_.nodes[x].parent) path.push_back(arg_.nodes[x].trans);
    std::reverse(path.begin(), path.end());
    return path;
  }

  std::optional<std::vector<Atom>> expand(int n, std::set<int>& goals, std::vector<TestCase>& suite) {
    arg_.nodes[n].children.clear();
    for (int e : p_.out(arg_.nodes[n].loc)) {
      ArgNode child;
      child.loc = p_.edges[e].dst;
      child.preds = post_.post(arg_.nodes[n].preds, e);
      child.is_false = child.preds.test(0);
      child.parent = n;
      child.trans = e;
      int c = static_cast<int>(arg_.nodes.size());
      if (arg_.nodes.size() >= cfg_.max_nodes) throw std::runtime_error("abstract reachability graph too large");
      arg_.nodes.push_back(std::move(child));
      arg_.nodes[n].children.push_back(c);
      work_.push_back(c);
      if (!goals.contains(e)) continue;
      auto path = tree_path(c);
      auto res = solver_.check(flatten(path_constraints(p_, path)), &fuel_);
      if (res.status == SatStatus::Sat) {
        goals.erase(e);
        suite.push_back(test_from_model(p_, path, res.model));
      } else if (res.status == SatStatus::Unsat && !arg_.nodes[c].is_false && cfg_.refine && !fuel_.exhausted()) {
        auto atoms = refine(p_, path);
        bool fresh = std::any_of(atoms.begin(), atoms.end(), [&](const Atom& a) { return pi_.index_of(a) < 0; });
        if (fresh) return atoms;
      }
    }
    return std::nullopt;
  }
};

}  // namespace

PredBits abstract_post(const Program& p, const PredicateSet& pi, const PredBits& a, int edge, Budget& fuel) {
  PostEngine eng(p, pi, fuel);
  return eng.post(a, edge);
}

std::vector<Atom> refine(const Program& p, std::span<const int> path) {
  std::vector<Atom> harvest;
  std::set<Atom> seen;
  std::set<Atom> w;
  for (std::size_t k = path.size(); k-- > 0;) {
    const auto& t = p.edges[path[k]];
    std::set<Atom> next;
    for (const auto& a : w) {
      Atom b = wp_atom(a, t);
      if (!b.is_true()) next.insert(b);
    }
    if (!t.command.guard.is_true()) next.insert(t.command.guard);
    w = std::move(next);
    bool dead = false;
    for (const auto& a : w) {
      if (a.is_false()) dead = true;
      if (!a.is_constant() && seen.insert(a).second) harvest.push_back(a);
    }
    if (dead) break;
  }
  return harvest;
}

McOutcome abstract_mc(const Program& p, PredicateSet pi, const GoalSet& goals, Budget& fuel, const McConfig& cfg) {
  McOutcome out;
  std::set<int> g;
  for (const auto& id : goals) {
    int e = p.edge_index(id);
    if (e < 0) throw ProgramError("goal " + id + " is not a transition of the program");
    g.insert(e);
  }
  for (;;) {
    Builder b(p, pi, fuel, cfg);
    auto atoms = b.run(g, out.suite);
    if (!atoms) {
      out.arg = b.take();
      break;
    }
    for (const auto& a : *atoms) pi.add(a);
    ++out.refinements;
    ++out.restarts;
  }
  std::set<int> witnessed;
  for (const auto& n : out.arg.nodes)
    if (n.in_reach && n.trans >= 0) witnessed.insert(n.trans);
  for (int e : g) {
    if (witnessed.contains(e)) {
      out.remaining.insert(p.edges[e].id);
    } else {
      out.unreachable.insert(p.edges[e].id);
    }
  }
  out.predicates = std::move(pi);
  return out;
}

bool arg_paths_contains(const Program& p, const Arg& arg, std::span<const int> path) {
  (void)p;
  std::set<int> cur{arg.root};
  if (!arg.nodes[arg.root].in_reach) return false;
  for (int e : path) {
    std::set<int> next;
    for (int s : cur)
      for (int x = s;; x = arg.nodes[x].subsumed_by) {
        for (int c : arg.nodes[x].children)
          if (arg.nodes[c].in_reach && arg.nodes[c].trans == e) next.insert(c);
        if (arg.nodes[x].subsumed_by < 0) break;
      }
    if (next.empty()) return false;
    cur = std::move(next);
  }
  return true;
}

std::string preds_str(const Program& p, const PredicateSet& pi, const PredBits& a) {
  auto name = p.namer();
  std::string out = "{";
  bool first = true;
  for (int i : a.members()) {
    if (!first) out += ", ";
    out += pi[i].str(name);
    first = false;
  }
  return out + "}";
}

std::string arg_dot(const Program& p, const Arg& arg) {
  std::ostringstream os;
  os << "digraph arg {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < arg.nodes.size(); ++i) {
    const auto& n = arg.nodes[i];
    if (!n.in_reach) continue;
    os << "  s" << i << " [label=\"" << dot_escape(p.loc_names[n.loc] + ": " + preds_str(p, arg.predicates, n.preds))
       << "\"" << (n.subsumed_by >= 0 ? ", style=dotted" : "") << "];\n";
  }
  for (std::size_t i = 0; i < arg.nodes.size(); ++i) {
    const auto& n = arg.nodes[i];
    if (!n.in_reach) continue;
    if (n.parent >= 0) os << "  s" << n.parent << " -> s" << i << " [label=\"" << p.edges[n.trans].id << "\"];\n";
    if (n.subsumed_by >= 0) os << "  s" << i << " -> s" << n.subsumed_by << " [style=dashed];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace agct
