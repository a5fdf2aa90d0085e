#include "agct/driver.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace agct {

using nlohmann::json;

double RunReport::ratio() const {
  if (relevant == 0) return 1.0;
  return static_cast<double>(covered.size()) / static_cast<double>(relevant);
}

namespace {

GoalSet minus(const GoalSet& a, const GoalSet& b) {
  GoalSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

// Suite plus coverage, both fed only through replay.
class Ledger {
 public:
  Ledger(const Program& p, const GoalSet& goals, const ConcolicConfig& cc) : p_(p), goals_(goals), cc_(cc) {}

  GoalSet absorb(const std::vector<TestCase>& tests, std::uint64_t seed) {
    GoalSet fresh;
    for (const auto& t : tests) {
      auto r = replay(p_, t, cc_.step_cap, cc_.rand_range, seed);
      if (!seen_.insert(r.consumed).second) continue;
      suite.push_back({r.consumed, r.covered});
      for (const auto& b : r.covered)
        if (goals_.contains(b) && covered.insert(b).second) fresh.insert(b);
    }
    return fresh;
  }

  std::vector<SuiteEntry> suite;
  GoalSet covered;

 private:
  const Program& p_;
  const GoalSet& goals_;
  const ConcolicConfig& cc_;
  std::set<TestCase> seen_;
};

void check_goals(const Program& p, const GoalSet& goals) {
  auto branches = enumerate_branches(p);
  for (const auto& g : goals)
    if (!branches.contains(g)) throw ProgramError("goal " + g + " is not a branch of the program");
}

}  // namespace

RunReport crabs_run(const Program& p, const GoalSet& goals, const DriverConfig& cfg) {
  check_goals(p, goals);
  const auto& b = cfg.budget;
  RunReport rep;
  rep.branches = goals.size();
  Ledger led(p, goals, cfg.concolic);
  GoalSet open = goals;
  PredicateSet pi;
  ProductSpace space(p);
  Int spent = 0;
  bool stalled = false;

  // The first iteration always happens, so even a goal-free program gets one run.
  for (int it = 0; it == 0 || (!open.empty() && spent < b.total); ++it) {
    IterationRecord rec;
    rec.index = it;
    ConcolicConfig cc = cfg.concolic;
    cc.strategy.seed += static_cast<std::uint64_t>(it);
    Budget cf(std::min(b.concolic, b.total - spent));
    auto cres = concolic_test(space, open, cf, cc);
    spent += cf.spent();
    rec.fuel_concolic = cf.spent();
    rec.paths = cres.paths;
    rec.new_covered = led.absorb(cres.suite, cc.strategy.seed);
    open = minus(open, rec.new_covered);

    if (!open.empty()) {
      Budget mf(std::clamp<Int>(b.total - spent, 0, b.mc));
      auto mres = abstract_mc(p, pi, open, mf, cfg.mc);
      spent += mf.spent();
      rec.fuel_mc = mf.spent();
      GoalSet by_mc = led.absorb(mres.suite, cc.strategy.seed);
      rec.new_covered.insert(by_mc.begin(), by_mc.end());
      open = minus(open, by_mc);
      for (const auto& u : mres.unreachable)
        if (open.erase(u)) {
          rep.unreachable.insert(u);
          rec.new_unreachable.insert(u);
        }
      rec.predicates_added = mres.predicates.size() - pi.size();
      pi = mres.predicates;
      rec.arg_states = mres.arg.reach_size();
      Monitor m = monitor_from_arg(p, mres.arg);
      rec.monitor_states = static_cast<std::size_t>(m.program.num_locs());
      if (cfg.on_iteration) cfg.on_iteration(IterationView{it, mres, m});
      space.add_monitor(std::move(m));
    }
    rec.predicates = pi.size();
    rec.fuel_spent = spent;
    rec.remaining = open.size();
    if (open.empty()) rep.fuel_to_full = spent;
    stalled = !open.empty() && rec.new_covered.empty() && rec.new_unreachable.empty() && rec.predicates_added == 0;
    rep.iterations.push_back(std::move(rec));
    if (stalled) break;
  }

  rep.covered = led.covered;
  rep.suite = std::move(led.suite);
  rep.relevant = goals.size() - rep.unreachable.size();
  rep.fuel_spent = spent;
  if (open.empty()) {
    rep.status = RunStatus::Complete;
    rep.fuel_to_full = spent;
  } else {
    rep.status = stalled ? RunStatus::Stalled : RunStatus::BudgetExhausted;
  }
  return rep;
}

RunReport baseline_run(const Program& p, const GoalSet& goals, const DriverConfig& cfg) {
  check_goals(p, goals);
  RunReport rep;
  rep.branches = goals.size();
  Ledger led(p, goals, cfg.concolic);
  Budget fuel(cfg.budget.total);
  auto res = concolic_test(p, goals, fuel, cfg.concolic);
  IterationRecord rec;
  rec.fuel_concolic = fuel.spent();
  rec.fuel_spent = fuel.spent();
  rec.paths = res.paths;
  rec.new_covered = led.absorb(res.suite, cfg.concolic.strategy.seed);
  rec.remaining = goals.size() - led.covered.size();
  rep.iterations.push_back(rec);
  rep.covered = led.covered;
  rep.suite = std::move(led.suite);
  auto reach = graph_reachable_branches(p);
  rep.relevant = static_cast<std::size_t>(
      std::count_if(goals.begin(), goals.end(), [&](const std::string& g) { return reach.contains(g); }));
  rep.fuel_spent = fuel.spent();
  if (rep.covered.size() == goals.size()) {
    rep.status = RunStatus::Complete;
    rep.fuel_to_full = fuel.spent();
  } else {
    rep.status = RunStatus::BudgetExhausted;
  }
  return rep;
}

json report_json(const RunReport& r) {
  json its = json::array();
  for (const auto& i : r.iterations) {
    its.push_back({{"index", i.index},
                   {"fuel_concolic", i.fuel_concolic},
                   {"fuel_mc", i.fuel_mc},
                   {"fuel_spent", i.fuel_spent},
                   {"paths", i.paths},
                   {"new_covered", i.new_covered},
                   {"new_unreachable", i.new_unreachable},
                   {"predicates_added", i.predicates_added},
                   {"predicates", i.predicates},
                   {"arg_states", i.arg_states},
                   {"monitor_states", i.monitor_states},
                   {"remaining", i.remaining}});
  }
  return {{"branches", r.branches},
          {"covered", r.covered},
          {"unreachable", r.unreachable},
          {"ratio", {{"covered", r.covered.size()}, {"relevant", r.relevant}, {"value", r.ratio()}}},
          {"iterations", its}};
}

json suite_json(const std::vector<SuiteEntry>& suite) {
  json out = json::array();
  for (const auto& e : suite) out.push_back({{"inputs", e.inputs}, {"covers", e.covers}});
  return out;
}

std::vector<SuiteEntry> load_suite(const json& j) {
  if (!j.is_array()) throw SuiteError("suite must be a JSON array");
  std::vector<SuiteEntry> out;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("inputs") || !e["inputs"].is_array())
      throw SuiteError("suite entry needs an inputs array");
    SuiteEntry s;
    for (const auto& v : e["inputs"]) {
      if (!v.is_number_integer()) throw SuiteError("inputs must be integers");
      s.inputs.push_back(v.get<Int>());
    }
    if (e.contains("covers")) {
      if (!e["covers"].is_array()) throw SuiteError("covers must be an array");
      for (const auto& c : e["covers"]) {
        if (!c.is_string()) throw SuiteError("branch ids must be strings");
        s.covers.insert(c.get<std::string>());
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SuiteEntry> load_suite_text(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw SuiteError("suite is not valid JSON");
  return load_suite(j);
}

std::vector<std::pair<int, int>> parse_ratios(std::string_view list) {
  std::vector<std::pair<int, int>> out;
  while (!list.empty()) {
    auto comma = list.find(',');
    auto item = list.substr(0, comma);
    list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
    auto slash = item.find('/');
    if (slash == std::string_view::npos) throw std::invalid_argument("ratio must look like 80/20");
    int a = 0, c = 0;
    auto l = item.substr(0, slash), r = item.substr(slash + 1);
    auto e1 = std::from_chars(l.data(), l.data() + l.size(), a);
    auto e2 = std::from_chars(r.data(), r.data() + r.size(), c);
    if (e1.ec != std::errc{} || e1.ptr != l.data() + l.size() || e2.ec != std::errc{} ||
        e2.ptr != r.data() + r.size() || a < 0 || c < 0 || a + c == 0)
      throw std::invalid_argument("bad ratio '" + std::string(item) + "'");
    out.emplace_back(a, c);
  }
  return out;
}

std::vector<SweepRow> ratio_sweep(const Program& p, const GoalSet& goals, const DriverConfig& cfg,
                                  const std::vector<std::pair<int, int>>& ratios) {
  std::vector<SweepRow> rows;
  const Int per_iter = cfg.budget.concolic + cfg.budget.mc;
  for (auto [a, c] : ratios) {
    DriverConfig dc = cfg;
    dc.budget.concolic = per_iter * a / (a + c);
    dc.budget.mc = per_iter - dc.budget.concolic;
    SweepRow row{a, c, dc.budget.concolic, dc.budget.mc, crabs_run(p, goals, dc)};
    rows.push_back(std::move(row));
  }
  return rows;
}

json sweep_json(const std::vector<SweepRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"testing", r.testing},
                   {"checking", r.checking},
                   {"budget_concolic", r.budget_concolic},
                   {"budget_mc", r.budget_mc},
                   {"covered", r.report.covered.size()},
                   {"relevant", r.report.relevant},
                   {"ratio", r.report.ratio()},
                   {"fuel_spent", r.report.fuel_spent},
                   {"fuel_to_full_coverage", r.report.fuel_to_full ? json(*r.report.fuel_to_full) : json(nullptr)},
                   {"status", static_cast<int>(r.report.status)},
                   {"iterations", r.report.iterations.size()}});
  }
  return out;
}

}  // namespace agct
