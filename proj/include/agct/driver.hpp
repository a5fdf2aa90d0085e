#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "agct/cegar.hpp"
#include "agct/concolic.hpp"
#include "agct/monitor.hpp"
#include "agct/program.hpp"

namespace agct {

// Fuel is counted in executed transitions plus solver work (see Budget).
struct BudgetConfig {
  Int total = 1'000'000;
  Int concolic = 40'000;  // per iteration
  Int mc = 10'000;        // per iteration
};

struct IterationView {
  int index;
  const McOutcome& mc;
  const Monitor& monitor;
};

struct DriverConfig {
  BudgetConfig budget;
  ConcolicConfig concolic;  // the strategy seed is offset by the iteration index
  McConfig mc;
  std::function<void(const IterationView&)> on_iteration;
};

struct IterationRecord {
  int index = 0;
  Int fuel_concolic = 0;
  Int fuel_mc = 0;
  Int fuel_spent = 0;  // running total after this iteration
  Int paths = 0;
  GoalSet new_covered;
  GoalSet new_unreachable;
  int predicates_added = 0;
  int predicates = 0;
  std::size_t arg_states = 0;
  std::size_t monitor_states = 0;
  std::size_t remaining = 0;
};

struct SuiteEntry {
  TestCase inputs;
  GoalSet covers;
  bool operator==(const SuiteEntry&) const = default;
};

enum class RunStatus { Complete = 0, BudgetExhausted = 1, Stalled = 2 };

struct RunReport {
  std::size_t branches = 0;
  GoalSet covered;
  GoalSet unreachable;
  std::size_t relevant = 0;
  std::vector<IterationRecord> iterations;
  std::vector<SuiteEntry> suite;
  RunStatus status = RunStatus::Complete;
  Int fuel_spent = 0;
  std::optional<Int> fuel_to_full;  // total spent when the last goal went away
  double ratio() const;
};

// Concolic runs on the program times every monitor so far; model checking
// always runs on the plain program with the accumulated predicates.
RunReport crabs_run(const Program& p, const GoalSet& goals, const DriverConfig& cfg);

// Concolic testing alone with the whole budget. Relevant branches are the
// graph-reachable goals.
RunReport baseline_run(const Program& p, const GoalSet& goals, const DriverConfig& cfg);

nlohmann::json report_json(const RunReport& r);
nlohmann::json suite_json(const std::vector<SuiteEntry>& suite);

struct SuiteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
std::vector<SuiteEntry> load_suite(const nlohmann::json& j);
std::vector<SuiteEntry> load_suite_text(std::string_view text);

// "80/20,50/50" -> {{80,20},{50,50}}
std::vector<std::pair<int, int>> parse_ratios(std::string_view list);

struct SweepRow {
  int testing = 0;
  int checking = 0;
  Int budget_concolic = 0;
  Int budget_mc = 0;
  RunReport report;
};

// Splits the per-iteration fuel (concolic + mc) by each ratio in turn.
std::vector<SweepRow> ratio_sweep(const Program& p, const GoalSet& goals, const DriverConfig& cfg,
                                  const std::vector<std::pair<int, int>>& ratios);
nlohmann::json sweep_json(const std::vector<SweepRow>& rows);

}  // namespace agct
