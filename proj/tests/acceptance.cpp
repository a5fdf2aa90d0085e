// One line per criterion; exit status is the number of failures.
#include <chrono>
#include <cstdio>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "agct/driver.hpp"
#include "agct/parser.hpp"
#include "support/first_monitor.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace agct;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %d: %s | %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string frac(const RunReport& r) {
  return std::to_string(r.covered.size()) + "/" + std::to_string(r.relevant);
}

struct Captured {
  RunReport report;
  std::vector<Monitor> monitors;
  std::vector<Arg> args;
};

// Seed 0, DFS, default budgets unless the caller changes them.
Captured run_crabs(const Program& p, DriverConfig cfg = {}) {
  Captured c;
  cfg.on_iteration = [&](const IterationView& v) {
    c.monitors.push_back(v.monitor);
    c.args.push_back(v.mc.arg);
  };
  c.report = crabs_run(p, enumerate_branches(p), cfg);
  return c;
}

std::string dump(const RunReport& r) { return report_json(r).dump() + suite_json(r.suite).dump(); }

// Every covered branch must be witnessed by replaying the suite.
bool witnessed(const Program& p, const RunReport& r) {
  GoalSet seen;
  for (const auto& t : r.suite) {
    auto run = oracle::interpret(p, t.inputs, 10000);
    if (run.covered != t.covers) return false;
    seen.insert(run.covered.begin(), run.covered.end());
  }
  for (const auto& b : r.covered)
    if (!seen.contains(b)) return false;
  return true;
}

std::map<std::string, Captured> runs;       // criteria 1-4, reused by 8
std::map<std::string, std::string> dumps;  // for 9

void criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  Program p = load_program(oracle::corpus("simple_while.imp"));
  DriverConfig cfg;
  auto c = run_crabs(p, cfg);
  auto base = baseline_run(p, enumerate_branches(p), cfg);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = c.report.covered.size() == 12 && c.report.relevant == 12 && base.covered.size() <= 11 &&
            enumerate_branches(p).size() == 12 && witnessed(p, c.report) && secs < 60;
  char buf[200];
  std::snprintf(buf, sizeof buf, "crabs %s, dfs baseline %s with the same %lld fuel, %.1f s", frac(c.report).c_str(),
                frac(base).c_str(), static_cast<long long>(cfg.budget.total), secs);
  verdict(1, ok, "simple_while full coverage vs concolic baseline", buf);
  dumps["1"] = dump(c.report);
  runs["simple_while"] = std::move(c);
}

void criterion2() {
  Program p = load_program(oracle::corpus("unreach.imp"));
  auto c = run_crabs(p);
  const auto& r = c.report;
  bool ok = r.unreachable.size() == 1 && r.covered.size() == 9 && r.relevant == 9 && r.branches == 10 &&
            witnessed(p, r);
  std::string u = r.unreachable.empty() ? "none" : *r.unreachable.begin();
  verdict(2, ok, "unreach: one branch proven dead, rest covered",
          "unreachable {" + u + "}, covered " + frac(r));
  dumps["2"] = dump(r);
  runs["unreach"] = std::move(c);
}

void criterion3() {
  Program p = load_program(oracle::corpus("branches.imp"));
  auto c = run_crabs(p);
  bool ok = c.report.covered.size() == 12 && c.report.relevant == 12 && witnessed(p, c.report);
  verdict(3, ok, "branches full coverage", "covered " + frac(c.report));
  dumps["3"] = dump(c.report);
  runs["branches"] = std::move(c);
}

void criterion4() {
  Program p = load_program(oracle::corpus("loop_tens.imp"));
  DriverConfig cfg;  // total fuel 1e6 is the calibrated F
  auto base = baseline_run(p, enumerate_branches(p), cfg);
  Int base_paths = base.iterations.at(0).paths;
  auto c = run_crabs(p, cfg);
  bool base_misses = !base.covered.contains("7#0");
  bool crabs_hits = c.report.covered.contains("7#0") && witnessed(p, c.report);
  bool iso = false;
  std::string shape = "no monitor";
  if (!c.monitors.empty()) {
    const auto& m = c.monitors.front().program;
    Program want = oracle::expected_first_monitor(p);
    iso = isomorphic(m, want);
    shape = std::to_string(m.num_locs()) + " states/" + std::to_string(m.edges.size()) + " edges vs hand-drawn " +
            std::to_string(want.num_locs()) + "/" + std::to_string(want.edges.size());
  }
  bool ok = base_paths >= 1000 && base_misses && crabs_hits && iso;
  std::string detail = "F=" + std::to_string(cfg.budget.total) + ", baseline " + std::to_string(base_paths) +
                       " paths " + (base_misses ? "misses" : "covers") + " 7#0, crabs " +
                       (crabs_hits ? "covers" : "misses") + " it; first monitor " + shape + " " +
                       (iso ? "isomorphic" : "NOT isomorphic");
  verdict(4, ok, "motivating loop: monitor-guided coverage and first monitor shape", detail);
  dumps["4"] = dump(c.report);
  dumps["4b"] = dump(base);
  runs["loop"] = std::move(c);
}

std::vector<Program> tiny_programs(std::uint64_t seed, int n, int max_inputs) {
  std::mt19937_64 rng(seed);
  gen::Options opt;
  opt.max_inputs = max_inputs;
  std::vector<Program> out;
  while (static_cast<int>(out.size()) < n) out.push_back(parse_program(gen::random_program(rng, opt)));
  return out;
}

// Small programs that branch on inputs early, so short paths differ.
const char* const kTiny[] = {
    "var x; var y; var z = 0; x = input(); y = input(); if (x > y) { z = 1; } else { if (x == y) { z = 2; } }"
    " if (z == 1 && x < 0) { z = 3; }",
    "var i = 0; var x; var s = 0; while (i < 3) { x = input(); if (x > 0) { s = s + x; } else { s = s - 1; }"
    " i = i + 1; } if (s == 2) { s = 0; }",
    "var x; var y; x = input(); y = input(); while (x > 0) { x = x - 1; y = y + 1; } if (y == 3) { y = 0; }",
    "var a; var b; var c = 0; a = input(); b = input(); if (a + b > 2 || a - b < -3) { c = 1; }"
    " if (c == 0 && a == 2 * b) { c = 2; }",
    "var x; var y; var z; x = input(); y = input(); z = x * y; if (z > 4) { z = 0; } else { if (z == -2) { z = 1; } }",
    "var i = 0; var b = 0; var x; var f = 0; while (i < 3) { x = input(); if (x != 1) { b = 1; } i = i + 1; }"
    " if (b == 0) { f = 1; }",
    "var x; var y = 0; var k = 0; x = input(); while (k < 4) { if (x > k) { y = y + 1; } k = k + 1; }"
    " if (y == 2) { y = 9; }",
    "var x; var y; var m; x = input(); y = input(); if (x < y) { m = x; } else { m = y; } if (m > 3) { m = 3; }"
    " if (m < x && m < y) { m = 0; }",
};

void criterion5() {
  auto progs = tiny_programs(505, 16, 3);
  for (const char* src : kTiny) progs.push_back(parse_program(src));
  progs.push_back(load_program(oracle::corpus("loop_tens_10.imp")));
  int violations = 0;
  long paths = 0;
  for (const auto& p : progs) {
    Budget fuel(20000);
    auto mc = abstract_mc(p, PredicateSet{}, enumerate_branches(p), fuel);
    std::set<std::vector<int>> seen;
    oracle::for_each_vector(3, -4, 4, [&](const std::vector<Int>& v) {
      auto run = oracle::interpret(p, v, 12);
      // every prefix of a feasible path is feasible too
      for (std::size_t n = 1; n <= run.path.size(); ++n) {
        std::vector<int> pre(run.path.begin(), run.path.begin() + static_cast<std::ptrdiff_t>(n));
        if (!seen.insert(pre).second) continue;
        ++paths;
        if (!arg_paths_contains(p, mc.arg, pre)) ++violations;
      }
    });
  }
  verdict(5, violations == 0 && progs.size() >= 20, "every feasible path is in the closed graph",
          std::to_string(progs.size()) + " programs, " + std::to_string(paths) + " distinct paths, " +
              std::to_string(violations) + " violations");
}

void criterion6() {
  auto progs = tiny_programs(606, 60, 3);
  for (const char* src : {
           "var x; var y = 0; x = input(); if (x > 5) { if (x < 3) { y = 1; } }",
           "var x; var z; var y = 0; x = input(); z = input(); if (x == z) { if (x - z > 0) { y = 1; } else { y = 2; } }",
           "var i = 0; var s = 0; var x; while (i < 3) { x = input(); if (x > 0) { s = s + 1; } i = i + 1; }"
           " if (s > 3) { s = 0; }",
           "var x; var y; x = input(); y = 2 * x; if (y == 7) { y = 0; }",
       })
    progs.push_back(parse_program(src));
  int dead = 0, violations = 0;
  for (const auto& p : progs) {
    auto c = run_crabs(p);
    for (const auto& u : c.report.unreachable) {
      ++dead;
      bool hit = false;
      oracle::for_each_vector(3, -8, 8, [&](const std::vector<Int>& v) {
        if (!hit && oracle::interpret(p, v, 10000).covered.contains(u)) hit = true;
      });
      if (hit) ++violations;
    }
  }
  verdict(6, violations == 0 && dead > 0, "branches proven dead are never covered by enumeration",
          std::to_string(progs.size()) + " programs, " + std::to_string(dead) + " dead branches, " +
              std::to_string(violations) + " violations");
}

void criterion7() {
  std::mt19937_64 rng(707);
  int decided = 0, violations = 0, sat = 0;
  for (int i = 0; i < 1000; ++i) {
    Conj c = oracle::random_conj(rng, 6, 8, 3, 10);
    auto brute = oracle::brute_sat(c, -8, 8);
    Budget fuel(1 << 22);
    auto res = check_sat(c, fuel);
    if (res.status == SatStatus::Sat) {
      ++sat;
      for (const auto& a : c)
        if (!a.holds(res.model)) ++violations;
    }
    if (brute) {
      ++decided;
      if (res.status != SatStatus::Sat) ++violations;
    } else if (res.status == SatStatus::Sat) {
      // Only allowed when the model leaves the box.
      bool inside = true;
      for (const auto& [s, v] : res.model) inside = inside && v >= -8 && v <= 8;
      if (inside) ++violations;
    }
  }
  verdict(7, violations == 0, "solver agrees with box enumeration",
          "1000 conjunctions, " + std::to_string(decided) + " decided by the box, " + std::to_string(sat) +
              " sat, " + std::to_string(violations) + " violations");
}

// Cursor-level search over the space, independent of materialize().
std::pair<std::size_t, std::size_t> cursor_reach(const ProductSpace& s) {
  std::set<ProductCursor> seen{s.initial()};
  std::deque<ProductCursor> q{s.initial()};
  std::size_t edges = 0;
  while (!q.empty()) {
    auto c = q.front();
    q.pop_front();
    for (int e : s.base().out(c.base))
      if (auto n = s.step(c, e)) {
        ++edges;
        if (seen.insert(*n).second) q.push_back(*n);
      }
  }
  return {seen.size(), edges};
}

void criterion8() {
  int monitors = 0, nondet = 0, mismatched = 0, firsts = 0;
  std::map<std::string, std::string> files{
      {"simple_while", "simple_while.imp"}, {"unreach", "unreach.imp"}, {"branches", "branches.imp"}, {"loop", "loop_tens.imp"}};
  for (auto& [name, c] : runs) {
    Program p = load_program(oracle::corpus(files.at(name)));
    for (const auto& m : c.monitors) {
      ++monitors;
      if (!is_deterministic(m)) ++nondet;
    }
    if (c.monitors.empty()) continue;
    ++firsts;
    ProductSpace s(p);
    s.add_monitor(c.monitors.front());
    auto [locs, edges] = cursor_reach(s);
    Program explicit_prod = product(p, c.monitors.front().program);
    if (locs != static_cast<std::size_t>(explicit_prod.num_locs()) || edges != explicit_prod.edges.size() ||
        !isomorphic(s.materialize(), explicit_prod))
      ++mismatched;
  }
  verdict(8, nondet == 0 && mismatched == 0 && monitors > 0, "monitors deterministic, products agree",
          std::to_string(monitors) + " monitors, " + std::to_string(nondet) + " nondeterministic, " +
              std::to_string(firsts) + " first-iteration products checked, " + std::to_string(mismatched) +
              " mismatches");
}

void criterion9() {
  int same = 0, total = 0;
  auto again = [&](const std::string& key, const char* file, bool baseline) {
    Program p = load_program(oracle::corpus(file));
    DriverConfig cfg;
    auto r = baseline ? baseline_run(p, enumerate_branches(p), cfg) : crabs_run(p, enumerate_branches(p), cfg);
    ++total;
    if (dump(r) == dumps.at(key)) ++same;
  };
  again("1", "simple_while.imp", false);
  again("2", "unreach.imp", false);
  again("3", "branches.imp", false);
  again("4", "loop_tens.imp", false);
  again("4b", "loop_tens.imp", true);
  verdict(9, same == total, "identical config gives identical reports",
          std::to_string(same) + "/" + std::to_string(total) + " reruns byte-identical");
}

// Per-iteration fuel grows with the loop bound: 500 per unrolled iteration.
void ratio_shape() {
  const std::vector<std::pair<int, int>> ratios{{100, 0}, {90, 10}, {80, 20}, {50, 50}, {20, 80}, {0, 100}};
  bool all = true;
  std::string detail;
  for (int bound : {10, 30, 50}) {
    std::string file = bound == 30 ? "loop_tens.imp" : "loop_tens_" + std::to_string(bound) + ".imp";
    Program p = load_program(oracle::corpus(file));
    DriverConfig cfg;
    cfg.budget.total = 2'000'000;
    cfg.budget.concolic = 500 * bound;
    cfg.budget.mc = 0;
    auto rows = ratio_sweep(p, enumerate_branches(p), cfg, ratios);
    auto cost = [](const SweepRow& r) { return r.report.fuel_to_full.value_or(INT64_MAX); };
    Int lo = std::min(cost(rows.front()), cost(rows.back()));
    Int best = INT64_MAX;
    std::string best_at;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i)
      if (cost(rows[i]) < best) {
        best = cost(rows[i]);
        best_at = std::to_string(rows[i].testing) + "/" + std::to_string(rows[i].checking);
      }
    bool ok = rows.size() == ratios.size() && best < lo;
    all = all && ok;
    auto show = [](Int v) { return v == INT64_MAX ? std::string("never") : std::to_string(v); };
    detail += "N=" + std::to_string(bound) + ": 100/0 " + show(cost(rows.front())) + ", 0/100 " +
              show(cost(rows.back())) + ", best " + best_at + " " + show(best) + "; ";
  }
  verdict(10, all, "ratio sweep: a mixed split reaches full coverage cheapest", detail);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  ratio_shape();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
