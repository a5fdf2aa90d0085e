#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "agct/driver.hpp"
#include "agct/parser.hpp"

using namespace agct;
namespace fs = std::filesystem;

namespace {

constexpr int kErrorExit = 3;

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string status_word(RunStatus s) {
  switch (s) {
    case RunStatus::Complete: return "complete";
    case RunStatus::BudgetExhausted: return "budget exhausted";
    case RunStatus::Stalled: return "stalled";
  }
  return "?";
}

void print_summary(const RunReport& r) {
  std::printf("covered %zu/%zu (%.1f%%), unreachable %zu, fuel %lld, iterations %zu, %s\n", r.covered.size(),
              r.relevant, 100.0 * r.ratio(), r.unreachable.size(), static_cast<long long>(r.fuel_spent),
              r.iterations.size(), status_word(r.status).c_str());
  for (const auto& u : r.unreachable) std::printf("  unreachable %s\n", u.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agct: concolic testing steered by abstract reachability monitors"};
  app.require_subcommand(1);

  std::string file;
  DriverConfig cfg;
  std::string strategy = "dfs";
  std::string report_path, suite_path, arg_dir, monitor_dir, sweep, query_path;
  bool baseline = false;

  auto* run = app.add_subcommand("run", "generate tests for every branch of a program");
  run->add_option("file", file, "program source")->required()->check(CLI::ExistingFile);
  run->add_option("--budget-total", cfg.budget.total, "total fuel")->check(CLI::NonNegativeNumber);
  run->add_option("--budget-concolic", cfg.budget.concolic, "concolic fuel per iteration")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--budget-mc", cfg.budget.mc, "model checking fuel per iteration")->check(CLI::NonNegativeNumber);
  run->add_option("--strategy", strategy, "search strategy")
      ->check(CLI::IsMember({"dfs", "rnd-branch", "unf-rnd", "cfg"}));
  run->add_option("--seed", cfg.concolic.strategy.seed, "random seed");
  run->add_option("--rand-range", cfg.concolic.rand_range, "random inputs are drawn from [-N, N]")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--step-cap", cfg.concolic.step_cap, "transitions per concrete run")->check(CLI::PositiveNumber);
  run->add_option("--report", report_path, "write the JSON report here");
  run->add_option("--suite", suite_path, "write the test suite here");
  run->add_option("--dump-arg", arg_dir, "write the graph of every iteration as DOT into this directory");
  run->add_option("--dump-monitor", monitor_dir, "write the monitor of every iteration as DOT into this directory");
  run->add_option("--dump-queries", query_path, "log solver queries to this file");
  run->add_flag("--baseline-concolic", baseline, "concolic testing only, with the whole budget");
  run->add_option("--ratio-sweep", sweep, "comma separated testing/checking splits, e.g. 100/0,80/20,0/100");

  std::string dot_file, dot_out;
  auto* dot = app.add_subcommand("dot", "print the control flow graph as DOT");
  dot->add_option("file", dot_file, "program source")->required()->check(CLI::ExistingFile);
  dot->add_option("-o,--output", dot_out, "output file (default stdout)");

  std::string replay_file, replay_suite;
  auto* rep = app.add_subcommand("replay", "replay a suite file and list covered branches");
  rep->add_option("file", replay_file, "program source")->required()->check(CLI::ExistingFile);
  rep->add_option("suite", replay_suite, "suite JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kErrorExit;
  }

  try {
    if (*dot) {
      Program p = load_program(dot_file);
      std::string text = program_dot(p);
      if (dot_out.empty()) {
        std::cout << text;
      } else {
        write_file(dot_out, text);
      }
      return 0;
    }

    if (*rep) {
      Program p = load_program(replay_file);
      std::ifstream in(replay_suite);
      std::stringstream ss;
      ss << in.rdbuf();
      auto suite = load_suite_text(ss.str());
      GoalSet all;
      bool mismatch = false;
      for (const auto& t : suite) {
        auto r = replay(p, t.inputs, cfg.concolic.step_cap, cfg.concolic.rand_range, 0);
        all.insert(r.covered.begin(), r.covered.end());
        if (!t.covers.empty() && t.covers != r.covered) mismatch = true;
      }
      std::printf("%zu tests cover %zu/%zu branches\n", suite.size(), all.size(), enumerate_branches(p).size());
      for (const auto& b : all) std::printf("  %s\n", b.c_str());
      if (mismatch) std::printf("warning: recorded coverage differs from replay\n");
      return mismatch ? 1 : 0;
    }

    cfg.concolic.strategy.kind = *parse_strategy(strategy);
    Program p = load_program(file);
    GoalSet goals = enumerate_branches(p);

    std::unique_ptr<std::ofstream> qlog;
    if (!query_path.empty()) {
      qlog = std::make_unique<std::ofstream>(query_path);
      if (!*qlog) throw std::runtime_error("cannot write " + query_path);
      cfg.concolic.query_log = qlog.get();
      cfg.mc.query_log = qlog.get();
    }
    if (!arg_dir.empty() || !monitor_dir.empty()) {
      cfg.on_iteration = [&](const IterationView& v) {
        std::string n = std::to_string(v.index);
        if (!arg_dir.empty()) write_file(fs::path(arg_dir) / ("arg_" + n + ".dot"), arg_dot(p, v.mc.arg));
        if (!monitor_dir.empty())
          write_file(fs::path(monitor_dir) / ("monitor_" + n + ".dot"), monitor_dot(v.monitor));
      };
    }

    if (!sweep.empty()) {
      auto rows = ratio_sweep(p, goals, cfg, parse_ratios(sweep));
      for (const auto& r : rows) {
        std::printf("%3d/%-3d ", r.testing, r.checking);
        print_summary(r.report);
      }
      if (!report_path.empty()) write_file(report_path, sweep_json(rows).dump(2) + "\n");
      return 0;
    }

    RunReport r = baseline ? baseline_run(p, goals, cfg) : crabs_run(p, goals, cfg);
    print_summary(r);
    if (!report_path.empty()) write_file(report_path, report_json(r).dump(2) + "\n");
    if (!suite_path.empty()) write_file(suite_path, suite_json(r.suite).dump(2) + "\n");
    return static_cast<int>(r.status);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kErrorExit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kErrorExit + 1;
  }
}
