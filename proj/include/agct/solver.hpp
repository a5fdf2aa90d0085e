#pragma once

#include <cstdint>
#include <ostream>

#include "agct/formula.hpp"

namespace agct {

// Deterministic work budget. Charges always land, so an engine that must
// finish a structure after running dry overshoots instead of stopping.
class Budget {
 public:
  explicit Budget(Int limit = 0) : limit_(limit) {}
  void charge(Int n = 1) { spent_ += n; }
  bool exhausted() const { return spent_ >= limit_; }
  Int spent() const { return spent_; }
  Int limit() const { return limit_; }
  Int remaining() const { return spent_ >= limit_ ? 0 : limit_ - spent_; }

 private:
  Int limit_;
  Int spent_ = 0;
};

enum class SatStatus { Sat, Unsat, Unknown };

struct SatResult {
  SatStatus status = SatStatus::Unknown;
  Valuation model;
};

struct SolverLimits {
  int max_nodes = 20000;
  int max_rows = 4000;
  int max_splits = 512;
};

// Decision procedure for conjunctions of linear integer atoms: equality
// substitution, then the Omega test, with disequalities split lazily when
// a candidate model violates one. Each call costs one unit of the budget and
// each disequality split one more.
class Solver {
 public:
  explicit Solver(SolverLimits limits = {}) : limits_(limits) {}

  SatResult check(const Conj& c, Budget* fuel = nullptr, const Valuation* hint = nullptr);
  bool implies(const Conj& c, const Atom& a, Budget* fuel = nullptr);

  void set_query_log(std::ostream* os) { log_ = os; }
  std::int64_t calls() const { return calls_; }

 private:
  SolverLimits limits_;
  std::ostream* log_ = nullptr;
  std::int64_t calls_ = 0;
};

SatResult check_sat(const Conj& c, Budget& fuel);
bool implies(const Conj& c, const Atom& a, Budget& fuel);

// SMT-LIB flavoured rendering, for debug dumps.
std::string smtlib_query(const Conj& c, const SymNamer& name = default_name);

}  // namespace agct
