#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace agct {

using Int = std::int64_t;
using VarId = int;

struct OverflowError : std::runtime_error {
  OverflowError() : std::runtime_error("integer overflow") {}
};

Int checked_add(Int a, Int b);
Int checked_mul(Int a, Int b);
Int floor_div(Int a, Int b);
Int ceil_div(Int a, Int b);

// A symbol in a linear term. Var and Primed are the unindexed program
// variables of a guard or transition formula; Indexed is the SSA copy of a
// variable at a path step; Input is the k-th input read (r_k).
struct Sym {
  enum class Kind : std::uint8_t { Var, Primed, Indexed, Input };
  Kind kind = Kind::Var;
  int id = 0;
  int step = 0;

  static Sym var(VarId v) { return {Kind::Var, v, 0}; }
  static Sym primed(VarId v) { return {Kind::Primed, v, 0}; }
  static Sym indexed(VarId v, int step) { return {Kind::Indexed, v, step}; }
  static Sym input(int k) { return {Kind::Input, k, 0}; }

  auto operator<=>(const Sym&) const = default;
};

using Valuation = std::map<Sym, Int>;
using SymNamer = std::function<std::string(Sym)>;

std::string default_name(Sym s);

// Sum of coefficient*symbol plus a constant. Terms are kept sorted and
// without zero coefficients so structural equality is semantic equality.
class Linear {
 public:
  using Term = std::pair<Sym, Int>;

  Linear() = default;
  explicit Linear(Int c) : constant_(c) {}
  static Linear of(Sym s, Int coef = 1);

  Int constant() const { return constant_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }
  Int coef(Sym s) const;
  bool mentions(Sym s) const { return coef(s) != 0; }

  Linear& operator+=(const Linear& o);
  Linear& operator-=(const Linear& o);
  Linear& operator*=(Int k);
  friend Linear operator+(Linear a, const Linear& b) { return a += b; }
  friend Linear operator-(Linear a, const Linear& b) { return a -= b; }
  friend Linear operator*(Linear a, Int k) { return a *= k; }
  Linear operator-() const { return *this * -1; }

  // Replace symbols for which f returns a value.
  Linear substitute(const std::function<std::optional<Linear>(Sym)>& f) const;
  Linear rename(const std::function<Sym(Sym)>& f) const;
  std::optional<Int> evaluate(const std::function<std::optional<Int>(Sym)>& f) const;
  Int evaluate(const Valuation& v) const;
  Int gcd_of_coefs() const;

  bool operator==(const Linear&) const = default;
  auto operator<=>(const Linear&) const = default;

  std::string str(const SymNamer& name = default_name) const;

 private:
  std::vector<Term> terms_;
  Int constant_ = 0;
};

enum class Rel : std::uint8_t { Lt, Le, Eq, Ne, Gt, Ge };

// Comparison of a linear term against zero. Construction canonicalizes over
// the integers: every inequality becomes `e <= 0` with gcd-tightened
// coefficients and equalities get a positive leading coefficient, so a
// predicate and its negation each have a unique representation.
class Atom {
 public:
  static Atom make(const Linear& lhs, Rel rel, const Linear& rhs = Linear());
  static Atom truth();
  static Atom falsity();

  const Linear& lhs() const { return lhs_; }
  Rel rel() const { return rel_; }  // Le, Eq or Ne
  Atom negated() const;
  bool is_constant() const { return lhs_.is_constant(); }
  bool is_true() const;
  bool is_false() const;
  bool holds(Int lhs_value) const;
  bool holds(const Valuation& v) const { return holds(lhs_.evaluate(v)); }
  bool mentions(Sym s) const { return lhs_.mentions(s); }

  Atom substitute(const std::function<std::optional<Linear>(Sym)>& f) const;
  Atom rename(const std::function<Sym(Sym)>& f) const;

  bool operator==(const Atom&) const = default;
  auto operator<=>(const Atom&) const = default;

  std::string str(const SymNamer& name = default_name) const;

 private:
  Atom(Linear lhs, Rel rel) : lhs_(std::move(lhs)), rel_(rel) {}
  static Atom canonical(Linear lhs, Rel rel);
  Linear lhs_;
  Rel rel_ = Rel::Le;
};

using Conj = std::vector<Atom>;

std::string conj_str(const Conj& c, const SymNamer& name = default_name);

}  // namespace agct
