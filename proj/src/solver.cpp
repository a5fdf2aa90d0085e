#include "agct/solver.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

namespace agct {

namespace {

struct Unknown {};

using Vec = std::vector<Int>;

struct Row {
  Vec a;
  Int c = 0;
};

Int iabs(Int x) {
  if (x == INT64_MIN) throw OverflowError();
  return x < 0 ? -x : x;
}

Int row_gcd(const Row& r) {
  Int g = 0;
  for (Int x : r.a) g = std::gcd(g, iabs(x));
  return g;
}

Int eval_row(const Row& r, const Vec& m) {
  Int acc = r.c;
  for (std::size_t j = 0; j < r.a.size(); ++j)
    if (r.a[j] != 0) acc = checked_add(acc, checked_mul(r.a[j], m[j]));
  return acc;
}

// r + k*s
Row axpy(const Row& r, Int k, const Row& s) {
  Row out = r;
  for (std::size_t j = 0; j < out.a.size(); ++j) out.a[j] = checked_add(out.a[j], checked_mul(k, s.a[j]));
  out.c = checked_add(out.c, checked_mul(k, s.c));
  return out;
}

Row scaled_sum(Int p, const Row& r, Int q, const Row& s) {
  Row out;
  out.a.resize(r.a.size());
  for (std::size_t j = 0; j < r.a.size(); ++j)
    out.a[j] = checked_add(checked_mul(p, r.a[j]), checked_mul(q, s.a[j]));
  out.c = checked_add(checked_mul(p, r.c), checked_mul(q, s.c));
  return out;
}

// Replace x_k by def (whose k-th coefficient is zero).
Row substitute(const Row& r, int k, const Row& def) {
  Int coef = r.a[k];
  if (coef == 0) return r;
  Row base = r;
  base.a[k] = 0;
  return axpy(base, coef, def);
}

Int mod_hat(Int a, Int m) { return a - checked_mul(m, floor_div(checked_add(checked_mul(2, a), m), checked_mul(2, m))); }

class Omega {
 public:
  explicit Omega(const SolverLimits& lim) : lim_(lim) {}

  std::optional<Vec> solve(Vec hint, std::vector<Row> eqs, std::vector<Row> geqs) {
    if (++nodes_ > lim_.max_nodes) throw Unknown{};
    const std::size_t n = hint.size();

    std::vector<Row> live_eqs;
    for (auto& e : eqs) {
      Int g = row_gcd(e);
      if (g == 0) {
        if (e.c != 0) return std::nullopt;
        continue;
      }
      if (e.c % g != 0) return std::nullopt;
      for (auto& x : e.a) x /= g;
      e.c /= g;
      live_eqs.push_back(std::move(e));
    }
    if (!live_eqs.empty()) return solve_eq(std::move(hint), std::move(live_eqs), std::move(geqs));

    std::map<Vec, Int> tight;
    for (auto& r : geqs) {
      Int g = row_gcd(r);
      if (g == 0) {
        if (r.c < 0) return std::nullopt;
        continue;
      }
      for (auto& x : r.a) x /= g;
      Int c = floor_div(r.c, g);
      auto [it, fresh] = tight.emplace(std::move(r.a), c);
      if (!fresh) it->second = std::min(it->second, c);
    }
    if (tight.size() > static_cast<std::size_t>(lim_.max_rows)) throw Unknown{};
    for (const auto& [a, c] : tight) {
      Vec neg(a.size());
      for (std::size_t j = 0; j < a.size(); ++j) neg[j] = -a[j];
      auto it = tight.find(neg);
      if (it == tight.end()) continue;
      Int sum = checked_add(c, it->second);
      if (sum < 0) return std::nullopt;
      if (sum == 0) {
        std::vector<Row> eq{Row{a, c}};
        std::vector<Row> rest;
        for (const auto& [b, d] : tight)
          if (b != a && b != neg) rest.push_back(Row{b, d});
        return solve(std::move(hint), std::move(eq), std::move(rest));
      }
    }
    std::vector<Row> rows;
    rows.reserve(tight.size());
    for (auto& [a, c] : tight) rows.push_back(Row{a, c});
    if (rows.empty()) return hint;

    // Pick the variable: one bounded on a single side first, then exact
    // eliminations, then the smallest number of generated rows.
    int best = -1;
    bool best_one_sided = false, best_exact = false;
    std::size_t best_cost = 0;
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t lo = 0, up = 0;
      Int max_lo = 0, max_up = 0;
      for (const auto& r : rows) {
        if (r.a[j] > 0) {
          ++lo;
          max_lo = std::max(max_lo, r.a[j]);
        } else if (r.a[j] < 0) {
          ++up;
          max_up = std::max(max_up, -r.a[j]);
        }
      }
      if (lo + up == 0) continue;
      bool one_sided = lo == 0 || up == 0;
      bool exact = max_lo == 1 || max_up == 1;
      std::size_t cost = lo * up;
      auto better = [&]() {
        if (best < 0) return true;
        if (one_sided != best_one_sided) return one_sided;
        if (exact != best_exact) return exact;
        return cost < best_cost;
      };
      if (better()) {
        best = static_cast<int>(j);
        best_one_sided = one_sided;
        best_exact = exact;
        best_cost = cost;
      }
    }
    const int j = best;
    std::vector<Row> lows, ups, rest;
    for (auto& r : rows) {
      if (r.a[j] > 0) {
        lows.push_back(r);
      } else if (r.a[j] < 0) {
        ups.push_back(r);
      } else {
        rest.push_back(r);
      }
    }

    if (best_one_sided) {
      auto m = solve(hint, {}, rest);
      if (!m) return std::nullopt;
      pick(*m, j, lows, ups, hint[j]);
      return m;
    }

    auto shadow = [&](bool dark) {
      std::vector<Row> out = rest;
      for (const auto& l : lows)
        for (const auto& u : ups) {
          Int al = l.a[j], bu = -u.a[j];
          Row comb = scaled_sum(bu, l, al, u);
          if (dark) comb.c = checked_add(comb.c, -checked_mul(al - 1, bu - 1));
          out.push_back(std::move(comb));
        }
      return out;
    };

    if (best_exact) {
      auto m = solve(hint, {}, shadow(false));
      if (!m) return std::nullopt;
      pick(*m, j, lows, ups, hint[j]);
      return m;
    }

    if (!solve(hint, {}, shadow(false))) return std::nullopt;
    if (auto m = solve(hint, {}, shadow(true))) {
      pick(*m, j, lows, ups, hint[j]);
      return m;
    }
    Int a_max = 0;
    for (const auto& u : ups) a_max = std::max(a_max, -u.a[j]);
    for (const auto& l : lows) {
      Int al = l.a[j];
      Int lim = floor_div(checked_add(checked_mul(a_max, al), -checked_add(a_max, al)), a_max);
      for (Int i = 0; i <= lim; ++i) {
        Row eq = l;
        eq.c = checked_add(eq.c, -i);
        if (auto m = solve(hint, {eq}, rows)) return m;
      }
    }
    return std::nullopt;
  }

 private:
  SolverLimits lim_;
  int nodes_ = 0;

  static void pick(Vec& m, int j, const std::vector<Row>& lows, const std::vector<Row>& ups, Int want) {
    m[j] = 0;
    std::optional<Int> lo, hi;
    for (const auto& l : lows) {
      Int e = eval_row(l, m);
      Int b = ceil_div(-e, l.a[j]);
      lo = lo ? std::max(*lo, b) : b;
    }
    for (const auto& u : ups) {
      Int e = eval_row(u, m);
      Int b = floor_div(e, -u.a[j]);
      hi = hi ? std::min(*hi, b) : b;
    }
    if (lo && hi && *lo > *hi) throw Unknown{};
    Int x = want;
    if (lo) x = std::max(x, *lo);
    if (hi) x = std::min(x, *hi);
    m[j] = x;
  }

  std::optional<Vec> solve_eq(Vec hint, std::vector<Row> eqs, std::vector<Row> geqs) {
    const std::size_t n = hint.size();
    std::size_t ei = 0;
    int k = -1;
    Int best = 0;
    for (std::size_t e = 0; e < eqs.size(); ++e)
      for (std::size_t j = 0; j < n; ++j) {
        Int a = iabs(eqs[e].a[j]);
        if (a != 0 && (k < 0 || a < best)) {
          ei = e;
          k = static_cast<int>(j);
          best = a;
        }
      }
    Row eq = eqs[ei];
    Int ak = eq.a[k];
    if (iabs(ak) == 1) {
      Row def = eq;
      def.a[k] = 0;
      for (auto& x : def.a) x = checked_mul(-ak, x);
      def.c = checked_mul(-ak, def.c);
      std::vector<Row> eqs2, geqs2;
      for (std::size_t e = 0; e < eqs.size(); ++e)
        if (e != ei) eqs2.push_back(substitute(eqs[e], k, def));
      for (const auto& g : geqs) geqs2.push_back(substitute(g, k, def));
      auto m = solve(hint, std::move(eqs2), std::move(geqs2));
      if (!m) return std::nullopt;
      (*m)[k] = eval_row(def, *m);
      return m;
    }
    // No unit coefficient: introduce sigma with m*sigma equal to the
    // equation taken mod-hat m, which has a unit coefficient on x_k.
    Int mod = checked_add(iabs(ak), 1);
    Int sign = ak < 0 ? -1 : 1;
    hint.push_back(0);
    auto widen = [](Row r) {
      r.a.push_back(0);
      return r;
    };
    Row def;
    def.a.assign(n + 1, 0);
    for (std::size_t j = 0; j < n; ++j)
      if (static_cast<int>(j) != k) def.a[j] = checked_mul(sign, mod_hat(eq.a[j], mod));
    def.a[n] = checked_mul(-sign, mod);
    def.c = checked_mul(sign, mod_hat(eq.c, mod));
    std::vector<Row> eqs2, geqs2;
    for (const auto& e : eqs) eqs2.push_back(substitute(widen(e), k, def));
    for (const auto& g : geqs) geqs2.push_back(substitute(widen(g), k, def));
    auto m = solve(hint, std::move(eqs2), std::move(geqs2));
    if (!m) return std::nullopt;
    (*m)[k] = eval_row(def, *m);
    m->resize(n);
    return m;
  }
};

// Unit-coefficient equalities are eliminated up front. The right-hand side
// of a definition only mentions symbols that were live when it was made, so
// repeated substitution terminates.
class Eliminator {
 public:
  void run(const Conj& c) {
    for (const auto& a : c) {
      Linear l = resolve(a.lhs());
      if (a.rel() == Rel::Eq && !l.is_constant()) {
        std::optional<Sym> pick;
        Int coef = 0;
        for (const auto& [s, k] : l.terms()) {
          if (k != 1 && k != -1) continue;
          if (!pick || prefer(s, *pick)) {
            pick = s;
            coef = k;
          }
        }
        if (pick) {
          Linear rest = l - Linear::of(*pick, coef);
          defs_.emplace(*pick, rest * -coef);
          continue;
        }
      }
      kept_.push_back(Atom::make(l, a.rel()));
    }
    for (auto& a : kept_) a = Atom::make(resolve(a.lhs()), a.rel());
  }

  const Conj& kept() const { return kept_; }

  Int value(Sym s, const std::map<Sym, Int>& base, const Valuation* hint) {
    if (auto it = base.find(s); it != base.end()) return it->second;
    if (auto it = memo_.find(s); it != memo_.end()) return it->second;
    Int v;
    if (auto d = defs_.find(s); d != defs_.end()) {
      v = d->second.evaluate([&](Sym t) -> std::optional<Int> { return value(t, base, hint); }).value();
    } else if (hint && hint->contains(s)) {
      v = hint->at(s);
    } else {
      v = 0;
    }
    memo_[s] = v;
    return v;
  }

 private:
  std::map<Sym, Linear> defs_;
  std::map<Sym, Int> memo_;
  Conj kept_;

  static bool prefer(Sym a, Sym b) {
    bool ia = a.kind == Sym::Kind::Input, ib = b.kind == Sym::Kind::Input;
    if (ia != ib) return !ia;
    if (a.step != b.step) return a.step > b.step;
    return b < a;
  }

  Linear resolve(Linear l) const {
    for (;;) {
      bool hit = false;
      for (const auto& t : l.terms())
        if (defs_.contains(t.first)) {
          hit = true;
          break;
        }
      if (!hit) return l;
      l = l.substitute([&](Sym s) -> std::optional<Linear> {
        auto it = defs_.find(s);
        if (it == defs_.end()) return std::nullopt;
        return it->second;
      });
    }
  }
};

struct Search {
  Omega& omega;
  const SolverLimits& lim;
  Budget* fuel;
  int splits = 0;

  std::optional<Vec> run(const Vec& hint, const std::vector<Row>& eqs, const std::vector<Row>& geqs,
                         const std::vector<Row>& diseqs) {
    auto m = omega.solve(hint, eqs, geqs);
    if (!m) return std::nullopt;
    for (const auto& d : diseqs) {
      if (eval_row(d, *m) != 0) continue;
      if (++splits > lim.max_splits) throw Unknown{};
      if (fuel) fuel->charge(1);
      auto above = geqs;
      above.push_back(Row{d.a, checked_add(d.c, -1)});
      if (auto r = run(hint, eqs, above, diseqs)) return r;
      auto below = geqs;
      Row neg = d;
      for (auto& x : neg.a) x = -x;
      neg.c = checked_add(-d.c, -1);
      below.push_back(neg);
      return run(hint, eqs, below, diseqs);
    }
    return m;
  }
};

std::string rel_name(Rel r) {
  switch (r) {
    case Rel::Le: return "<=";
    case Rel::Eq: return "=";
    default: return "distinct";
  }
}

}  // namespace

std::string smtlib_query(const Conj& c, const SymNamer& name) {
  std::set<Sym> syms;
  for (const auto& a : c)
    for (const auto& t : a.lhs().terms()) syms.insert(t.first);
  std::ostringstream os;
  for (Sym s : syms) os << "(declare-const " << name(s) << " Int)\n";
  for (const auto& a : c) {
    os << "(assert (" << rel_name(a.rel()) << " (+";
    for (const auto& [s, k] : a.lhs().terms()) os << " (* " << k << " " << name(s) << ")";
    os << " " << a.lhs().constant() << ") 0))\n";
  }
  os << "(check-sat)\n";
  return os.str();
}

SatResult Solver::check(const Conj& c, Budget* fuel, const Valuation* hint) {
  ++calls_;
  if (fuel) fuel->charge(1);
  SatResult res;
  try {
    Eliminator elim;
    elim.run(c);
    std::vector<Sym> syms;
    {
      std::set<Sym> seen;
      for (const auto& a : elim.kept())
        for (const auto& t : a.lhs().terms())
          if (seen.insert(t.first).second) syms.push_back(t.first);
      std::sort(syms.begin(), syms.end());
    }
    std::map<Sym, int> col;
    for (std::size_t i = 0; i < syms.size(); ++i) col[syms[i]] = static_cast<int>(i);
    std::vector<Row> eqs, geqs, diseqs;
    bool trivially_false = false;
    for (const auto& a : elim.kept()) {
      if (a.is_constant()) {
        if (a.is_false()) trivially_false = true;
        continue;
      }
      Row r;
      r.a.assign(syms.size(), 0);
      for (const auto& [s, k] : a.lhs().terms()) r.a[col[s]] = k;
      r.c = a.lhs().constant();
      if (a.rel() == Rel::Le) {
        for (auto& x : r.a) x = -x;
        r.c = -r.c;
        geqs.push_back(std::move(r));
      } else if (a.rel() == Rel::Eq) {
        eqs.push_back(std::move(r));
      } else {
        diseqs.push_back(std::move(r));
      }
    }
    if (trivially_false) {
      res.status = SatStatus::Unsat;
    } else {
      Vec h(syms.size(), 0);
      if (hint)
        for (std::size_t i = 0; i < syms.size(); ++i)
          if (auto it = hint->find(syms[i]); it != hint->end()) h[i] = it->second;
      Omega omega(limits_);
      Search search{omega, limits_, fuel};
      auto m = search.run(h, eqs, geqs, diseqs);
      if (!m) {
        res.status = SatStatus::Unsat;
      } else {
        std::map<Sym, Int> base;
        for (std::size_t i = 0; i < syms.size(); ++i) base[syms[i]] = (*m)[i];
        for (const auto& a : c)
          for (const auto& t : a.lhs().terms()) res.model[t.first] = elim.value(t.first, base, hint);
        res.status = SatStatus::Sat;
        for (const auto& a : c)
          if (!a.holds(res.model)) {
            res.status = SatStatus::Unknown;
            res.model.clear();
            break;
          }
      }
    }
  } catch (const Unknown&) {
    res = SatResult{};
  } catch (const OverflowError&) {
    res = SatResult{};
  }
  if (log_) {
    *log_ << "; query " << calls_ << "\n" << smtlib_query(c);
    *log_ << "; " << (res.status == SatStatus::Sat ? "sat" : res.status == SatStatus::Unsat ? "unsat" : "unknown")
          << "\n";
  }
  return res;
}

bool Solver::implies(const Conj& c, const Atom& a, Budget* fuel) {
  if (a.is_true()) return true;
  Conj q = c;
  q.push_back(a.negated());
  return check(q, fuel).status == SatStatus::Unsat;
}

SatResult check_sat(const Conj& c, Budget& fuel) { return Solver().check(c, &fuel); }

bool implies(const Conj& c, const Atom& a, Budget& fuel) { return Solver().implies(c, a, &fuel); }

}  // namespace agct
