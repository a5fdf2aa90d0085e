#include "agct/concolic.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace agct {

std::optional<StrategyKind> parse_strategy(std::string_view name) {
  if (name == "dfs") return StrategyKind::Dfs;
  if (name == "rnd-branch") return StrategyKind::RandomBranch;
  if (name == "unf-rnd") return StrategyKind::UniformRandom;
  if (name == "cfg") return StrategyKind::CfgGuided;
  return std::nullopt;
}

std::string strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::Dfs: return "dfs";
    case StrategyKind::RandomBranch: return "rnd-branch";
    case StrategyKind::UniformRandom: return "unf-rnd";
    case StrategyKind::CfgGuided: return "cfg";
  }
  return "?";
}

Int draw(std::mt19937_64& rng, Int lo, Int hi) {
  auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<Int>(rng());
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + static_cast<Int>(x % span);
}

std::vector<int> compute_cfg_distances(const Program& p, const GoalSet& goal_labels) {
  std::vector<int> d(p.num_locs(), kFar);
  std::vector<std::vector<Loc>> preds(p.num_locs());
  std::deque<Loc> q;
  for (const auto& e : p.edges) {
    preds[e.dst].push_back(e.src);
    if (goal_labels.contains(e.label) && d[e.src] != 0) {
      d[e.src] = 0;
      q.push_back(e.src);
    }
  }
  while (!q.empty()) {
    Loc l = q.front();
    q.pop_front();
    for (Loc s : preds[l])
      if (d[s] == kFar) {
        d[s] = d[l] + 1;
        q.push_back(s);
      }
  }
  return d;
}

SymValue sym_eval(const Expr& e, const std::vector<Int>& concrete, const std::vector<Linear>& sym) {
  SymValue out;
  out.expr = e.linear.substitute([&](Sym s) -> std::optional<Linear> { return sym[s.id]; });
  if (!e.product) return out;
  const auto& nl = *e.product;
  Linear a = sym[nl.lhs], b = sym[nl.rhs];
  if (a.is_constant()) {
    out.expr += b * checked_mul(nl.coef, a.constant());
  } else if (b.is_constant()) {
    out.expr += a * checked_mul(nl.coef, b.constant());
  } else {
    out.concretized = true;
    if (a.terms().size() < b.terms().size()) {
      out.expr += b * checked_mul(nl.coef, concrete[nl.lhs]);
    } else {
      out.expr += a * checked_mul(nl.coef, concrete[nl.rhs]);
    }
  }
  return out;
}

ReplayResult replay(const Program& p, const TestCase& t, int step_cap, Int rand_range, std::uint64_t seed) {
  ReplayResult r;
  std::mt19937_64 rng(seed);
  std::vector<Int> vals(p.vars.size(), 0);
  Loc at = p.init;
  std::size_t k = 0;
  try {
    for (int step = 0; step < step_cap; ++step) {
      int taken = -1;
      for (int e : p.out(at)) {
        const Atom& g = p.edges[e].command.guard;
        Int lhs = g.lhs().evaluate([&](Sym s) -> std::optional<Int> { return vals[s.id]; }).value();
        if (g.holds(lhs)) {
          taken = e;
          break;
        }
      }
      if (taken < 0) {
        r.terminated = true;
        break;
      }
      const auto& tr = p.edges[taken];
      r.path.push_back(taken);
      if (p.is_branch_loc(at)) r.covered.insert(tr.id);
      if (tr.command.kind == Command::Kind::Input) {
        Int w = k < t.size() ? t[k] : draw(rng, -rand_range, rand_range);
        r.consumed.push_back(w);
        ++k;
        vals[tr.command.input_var] = w;
      } else if (tr.command.kind == Command::Kind::Assign) {
        std::vector<Int> next = vals;
        for (const auto& u : tr.command.updates) next[u.var] = u.value.evaluate(vals);
        vals = std::move(next);
      }
      at = tr.dst;
    }
  } catch (const OverflowError&) {
  }
  for (; k < t.size(); ++k) r.consumed.push_back(t[k]);
  return r;
}

namespace {

struct TrieNode {
  int child[2] = {-1, -1};
  bool tried[2] = {false, false};
};

struct Entry {
  Atom constraint = Atom::truth();
  int bit = 0;
  int taken = -1;
  int alt = -1;
  std::optional<ProductCursor> alt_cursor;
  bool flippable = false;
  int inputs_before = 0;
  int trie_node = 0;
};

class Engine {
 public:
  Engine(const ProductSpace& space, const GoalSet& goals, Budget& fuel, const ConcolicConfig& cfg)
      : s_(space), p_(space.base()), fuel_(fuel), cfg_(cfg), rng_(cfg.strategy.seed) {
    goal_.assign(p_.edges.size(), false);
    for (const auto& g : goals) {
      int e = p_.edge_index(g);
      if (e < 0) throw ProgramError("goal " + g + " is not a transition of the program");
      if (!goal_[e]) ++left_;
      goal_[e] = true;
    }
    trie_.emplace_back();
    solver_.set_query_log(cfg.query_log);
    refresh_distances();
  }

  ConcolicResult run_all() {
    ConcolicResult out;
    TestCase tst;
    int parent = -1, flipped = -1;
    std::set<TestCase> seen;
    for (;;) {
      run(tst);
      ++out.paths;
      out.concretizations += concretized_;
      if (seen.insert(tst).second) out.suite.push_back(tst);
      if (cfg_.record_trace) {
        RunTrace tr;
        tr.test = tst;
        for (const auto& e : path_) tr.decisions.push_back(e.taken);
        tr.parent_run = parent;
        tr.flipped = flipped;
        tr.concretizations = concretized_;
        out.trace.push_back(std::move(tr));
      }
      if (left_ == 0 || fuel_.exhausted()) break;
      auto next = backtrack(tst);
      if (!next) break;
      parent = static_cast<int>(out.paths) - 1;
      flipped = next->second;
      tst = std::move(next->first);
    }
    for (std::size_t e = 0; e < goal_.size(); ++e)
      if (goal_[e]) out.remaining.insert(p_.edges[e].id);
    return out;
  }

 private:
  const ProductSpace& s_;
  const Program& p_;
  Budget& fuel_;
  const ConcolicConfig& cfg_;
  std::mt19937_64 rng_;
  Solver solver_;
  std::vector<bool> goal_;
  int left_ = 0;
  std::vector<std::vector<int>> dist_;  // base, then one per monitor
  std::vector<TrieNode> trie_;
  std::vector<Entry> path_;
  int concretized_ = 0;

  void refresh_distances() {
    GoalSet labels;
    for (std::size_t e = 0; e < goal_.size(); ++e)
      if (goal_[e]) labels.insert(p_.edges[e].label);
    dist_.clear();
    dist_.push_back(compute_cfg_distances(p_, labels));
    for (std::size_t i = 0; i < s_.num_monitors(); ++i)
      dist_.push_back(compute_cfg_distances(s_.monitor(i).program, labels));
  }

  // Each component bounds the product distance from below.
  int distance(const ProductCursor& c) const {
    int d = dist_[0][c.base];
    for (std::size_t i = 0; i < c.mons.size(); ++i) d = std::max(d, dist_[i + 1][c.mons[i]]);
    return d;
  }

  void run(TestCase& tst) {
    path_.clear();
    concretized_ = 0;
    ProductCursor cur = s_.initial();
    std::vector<Int> vals(p_.vars.size(), 0);
    std::vector<Linear> sym(p_.vars.size());
    int k = 0, node = 0;
    try {
      for (int steps = 0; steps < cfg_.step_cap; ++steps) {
        if (cfg_.cut_hopeless && left_ > 0 && distance(cur) == kFar) break;
        const auto& outs = p_.out(cur.base);
        int taken = -1;
        for (int e : outs) {
          const Atom& g = p_.edges[e].command.guard;
          Int lhs = g.lhs().evaluate([&](Sym x) -> std::optional<Int> { return vals[x.id]; }).value();
          if (g.holds(lhs)) {
            taken = e;
            break;
          }
        }
        if (taken < 0) break;
        auto next = s_.step(cur, taken);
        if (!next) break;
        fuel_.charge(1);
        const auto& t = p_.edges[taken];
        const bool branch = outs.size() == 2;
        if (branch || !t.command.guard.is_true()) {
          Entry en;
          en.constraint = t.command.guard.substitute([&](Sym x) -> std::optional<Linear> { return sym[x.id]; });
          en.bit = branch && taken == outs[1] ? 1 : 0;
          en.taken = taken;
          en.inputs_before = k;
          en.trie_node = node;
          if (branch && !en.constraint.is_constant()) {
            en.alt = outs[1 - en.bit];
            en.alt_cursor = s_.step(cur, en.alt);
            en.flippable = en.alt_cursor.has_value();
          }
          if (trie_[node].child[en.bit] < 0) {
            trie_[node].child[en.bit] = static_cast<int>(trie_.size());
            trie_.emplace_back();
          }
          node = trie_[node].child[en.bit];
          path_.push_back(std::move(en));
        }
        if (goal_[taken]) {
          goal_[taken] = false;
          --left_;
          refresh_distances();
        }
        const auto& c = t.command;
        if (c.kind == Command::Kind::Input) {
          Int w;
          if (k < static_cast<int>(tst.size())) {
            w = tst[k];
          } else {
            w = draw(rng_, -cfg_.rand_range, cfg_.rand_range);
            tst.push_back(w);
          }
          vals[c.input_var] = w;
          sym[c.input_var] = Linear::of(Sym::input(k));
          ++k;
        } else if (c.kind == Command::Kind::Assign) {
          std::vector<Int> nv = vals;
          std::vector<Linear> ns = sym;
          for (const auto& u : c.updates) {
            nv[u.var] = u.value.evaluate(vals);
            SymValue sv = sym_eval(u.value, vals, sym);
            if (sv.concretized) ++concretized_;
            ns[u.var] = std::move(sv.expr);
          }
          vals = std::move(nv);
          sym = std::move(ns);
        }
        cur = std::move(*next);
      }
    } catch (const OverflowError&) {
    }
  }

  bool open(std::size_t i) const {
    const auto& en = path_[i];
    if (!en.flippable) return false;
    const auto& n = trie_[en.trie_node];
    int alt = 1 - en.bit;
    return n.child[alt] < 0 && !n.tried[alt];
  }

  std::optional<std::pair<TestCase, int>> backtrack(const TestCase& tst) {
    std::vector<std::size_t> cand;
    std::vector<int> alt_dist(path_.size(), kFar);
    for (std::size_t i = 0; i < path_.size(); ++i) {
      if (!open(i)) continue;
      const auto& en = path_[i];
      if (goal_[en.alt]) {
        alt_dist[i] = 0;
      } else if (int d = distance(*en.alt_cursor); d != kFar) {
        alt_dist[i] = d + 1;
      }
      if (cfg_.cut_hopeless && alt_dist[i] == kFar) continue;
      cand.push_back(i);
    }
    auto kind = cfg_.strategy.kind;
    if (kind == StrategyKind::Dfs) {
      std::reverse(cand.begin(), cand.end());
    } else if (kind == StrategyKind::CfgGuided) {
      std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
        if (alt_dist[a] != alt_dist[b]) return alt_dist[a] < alt_dist[b];
        return a > b;
      });
    }
    while (!cand.empty()) {
      if (fuel_.exhausted()) return std::nullopt;
      std::size_t pos = 0;
      if (kind == StrategyKind::RandomBranch) {
        pos = static_cast<std::size_t>(draw(rng_, 0, static_cast<Int>(cand.size()) - 1));
      } else if (kind == StrategyKind::UniformRandom) {
        double total = 0;
        for (std::size_t i : cand) total += 1.0 / static_cast<double>(i + 1);
        double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53 * total;
        pos = cand.size() - 1;
        for (std::size_t j = 0; j < cand.size(); ++j) {
          u -= 1.0 / static_cast<double>(cand[j] + 1);
          if (u < 0) {
            pos = j;
            break;
          }
        }
      }
      std::size_t i = cand[pos];
      cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(pos));
      trie_[path_[i].trie_node].tried[1 - path_[i].bit] = true;
      if (auto t = solve_flip(i, tst)) return std::make_pair(std::move(*t), static_cast<int>(i));
    }
    return std::nullopt;
  }

  // Constraints sharing no input with the negated one are already met by
  // the current test, so only the connected part goes to the solver.
  std::optional<TestCase> solve_flip(std::size_t i, const TestCase& tst) {
    Atom target = path_[i].constraint.negated();
    std::map<int, int> parent;
    std::function<int(int)> find = [&](int x) {
      auto it = parent.find(x);
      if (it == parent.end()) {
        parent[x] = x;
        return x;
      }
      if (it->second == x) return x;
      int r = find(it->second);
      parent[x] = r;
      return r;
    };
    auto join = [&](const Atom& a) {
      const auto& ts = a.lhs().terms();
      for (std::size_t k = 1; k < ts.size(); ++k) parent[find(ts[k].first.id)] = find(ts[0].first.id);
      if (!ts.empty()) find(ts[0].first.id);
    };
    for (std::size_t j = 0; j < i; ++j) join(path_[j].constraint);
    join(target);
    std::set<int> roots;
    for (const auto& t : target.lhs().terms()) roots.insert(find(t.first.id));
    Conj phi;
    for (std::size_t j = 0; j < i; ++j) {
      const auto& a = path_[j].constraint;
      if (a.is_constant()) continue;
      if (roots.contains(find(a.lhs().terms()[0].first.id))) phi.push_back(a);
    }
    phi.push_back(target);
    Valuation hint;
    for (std::size_t k = 0; k < tst.size(); ++k) hint[Sym::input(static_cast<int>(k))] = tst[k];
    auto res = solver_.check(phi, &fuel_, &hint);
    if (res.status != SatStatus::Sat) return std::nullopt;
    TestCase out(tst.begin(), tst.begin() + path_[i].inputs_before);
    for (std::size_t k = 0; k < out.size(); ++k)
      if (auto it = res.model.find(Sym::input(static_cast<int>(k))); it != res.model.end()) out[k] = it->second;
    return out;
  }
};

}  // namespace

ConcolicResult concolic_test(const ProductSpace& space, const GoalSet& goals, Budget& fuel, const ConcolicConfig& cfg) {
  Engine eng(space, goals, fuel, cfg);
  return eng.run_all();
}

ConcolicResult concolic_test(const Program& p, const GoalSet& goals, Budget& fuel, const ConcolicConfig& cfg) {
  ProductSpace space(p);
  return concolic_test(space, goals, fuel, cfg);
}

}  // namespace agct
