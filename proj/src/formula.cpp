#include "agct/formula.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace agct {

Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError();
  return r;
}

Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError();
  return r;
}

Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Int ceil_div(Int a, Int b) { return -floor_div(-a, b); }

std::string default_name(Sym s) {
  switch (s.kind) {
    case Sym::Kind::Var: return "v" + std::to_string(s.id);
    case Sym::Kind::Primed: return "v" + std::to_string(s.id) + "'";
    case Sym::Kind::Indexed: return "v" + std::to_string(s.id) + "_" + std::to_string(s.step);
    case Sym::Kind::Input: return "r" + std::to_string(s.id);
  }
  return "?";
}

Linear Linear::of(Sym s, Int coef) {
  Linear l;
  if (coef != 0) l.terms_.emplace_back(s, coef);
  return l;
}

Int Linear::coef(Sym s) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), s,
                             [](const Term& t, const Sym& k) { return t.first < k; });
  return (it != terms_.end() && it->first == s) ? it->second : 0;
}

Linear& Linear::operator+=(const Linear& o) {
  std::vector<Term> out;
  out.reserve(terms_.size() + o.terms_.size());
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  while (a != terms_.end() || b != o.terms_.end()) {
    if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
      out.push_back(*a++);
    } else if (a == terms_.end() || b->first < a->first) {
      out.push_back(*b++);
    } else {
      Int c = checked_add(a->second, b->second);
      if (c != 0) out.emplace_back(a->first, c);
      ++a;
      ++b;
    }
  }
  terms_ = std::move(out);
  constant_ = checked_add(constant_, o.constant_);
  return *this;
}

Linear& Linear::operator-=(const Linear& o) { return *this += o * -1; }

Linear& Linear::operator*=(Int k) {
  if (k == 0) {
    terms_.clear();
    constant_ = 0;
    return *this;
  }
  for (auto& t : terms_) t.second = checked_mul(t.second, k);
  constant_ = checked_mul(constant_, k);
  return *this;
}

Linear Linear::substitute(const std::function<std::optional<Linear>(Sym)>& f) const {
  Linear out(constant_);
  for (const auto& [s, c] : terms_) {
    if (auto r = f(s)) {
      out += *r * c;
    } else {
      out += Linear::of(s, c);
    }
  }
  return out;
}

Linear Linear::rename(const std::function<Sym(Sym)>& f) const {
  Linear out(constant_);
  for (const auto& [s, c] : terms_) out += Linear::of(f(s), c);
  return out;
}

std::optional<Int> Linear::evaluate(const std::function<std::optional<Int>(Sym)>& f) const {
  Int acc = constant_;
  for (const auto& [s, c] : terms_) {
    auto v = f(s);
    if (!v) return std::nullopt;
    acc = checked_add(acc, checked_mul(c, *v));
  }
  return acc;
}

Int Linear::evaluate(const Valuation& v) const {
  Int acc = constant_;
  for (const auto& [s, c] : terms_) {
    auto it = v.find(s);
    Int x = it == v.end() ? 0 : it->second;
    acc = checked_add(acc, checked_mul(c, x));
  }
  return acc;
}

Int Linear::gcd_of_coefs() const {
  Int g = 0;
  for (const auto& t : terms_) g = std::gcd(g, t.second < 0 ? -t.second : t.second);
  return g;
}

static void put_terms(std::ostream& os, const std::vector<Linear::Term>& terms, Int sign,
                      const SymNamer& name) {
  bool first = true;
  for (const auto& [s, c0] : terms) {
    Int c = c0 * sign;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    Int a = c < 0 ? -c : c;
    if (a != 1) os << a << "*";
    os << name(s);
    first = false;
  }
}

std::string Linear::str(const SymNamer& name) const {
  std::ostringstream os;
  if (terms_.empty()) {
    os << constant_;
    return os.str();
  }
  put_terms(os, terms_, 1, name);
  if (constant_ > 0) os << " + " << constant_;
  if (constant_ < 0) os << " - " << -constant_;
  return os.str();
}

Atom Atom::truth() { return Atom(Linear(0), Rel::Le); }
Atom Atom::falsity() { return Atom(Linear(1), Rel::Le); }

Atom Atom::canonical(Linear e, Rel rel) {
  switch (rel) {
    case Rel::Lt: return canonical(e + Linear(1), Rel::Le);
    case Rel::Gt: return canonical(Linear(1) - e, Rel::Le);
    case Rel::Ge: return canonical(-e, Rel::Le);
    default: break;
  }
  if (e.is_constant()) {
    Int c = e.constant();
    bool v = rel == Rel::Le ? c <= 0 : rel == Rel::Eq ? c == 0 : c != 0;
    return v ? truth() : falsity();
  }
  Int g = e.gcd_of_coefs();
  Int c = e.constant();
  Linear terms = e - Linear(c);
  if (rel == Rel::Le) {
    Linear out;
    for (const auto& [s, k] : terms.terms()) out += Linear::of(s, k / g);
    out += Linear(ceil_div(c, g));
    return Atom(std::move(out), Rel::Le);
  }
  if (c % g != 0) return rel == Rel::Eq ? falsity() : truth();
  Int sign = terms.terms().front().second < 0 ? -1 : 1;
  Linear out;
  for (const auto& [s, k] : terms.terms()) out += Linear::of(s, sign * k / g);
  out += Linear(sign * c / g);
  return Atom(std::move(out), rel);
}

Atom Atom::make(const Linear& lhs, Rel rel, const Linear& rhs) { return canonical(lhs - rhs, rel); }

Atom Atom::negated() const {
  switch (rel_) {
    case Rel::Eq: return canonical(lhs_, Rel::Ne);
    case Rel::Ne: return canonical(lhs_, Rel::Eq);
    default: return canonical(lhs_, Rel::Gt);
  }
}

bool Atom::holds(Int v) const {
  switch (rel_) {
    case Rel::Le: return v <= 0;
    case Rel::Eq: return v == 0;
    case Rel::Ne: return v != 0;
    default: return false;
  }
}

bool Atom::is_true() const { return is_constant() && holds(lhs_.constant()); }
bool Atom::is_false() const { return is_constant() && !holds(lhs_.constant()); }

Atom Atom::substitute(const std::function<std::optional<Linear>(Sym)>& f) const {
  return canonical(lhs_.substitute(f), rel_);
}

Atom Atom::rename(const std::function<Sym(Sym)>& f) const { return canonical(lhs_.rename(f), rel_); }

std::string Atom::str(const SymNamer& name) const {
  if (is_true()) return "true";
  if (is_false()) return "false";
  std::ostringstream os;
  Int c = lhs_.constant();
  if (rel_ == Rel::Le) {
    bool all_neg = std::all_of(lhs_.terms().begin(), lhs_.terms().end(),
                               [](const Linear::Term& t) { return t.second < 0; });
    if (all_neg) {
      put_terms(os, lhs_.terms(), -1, name);
      os << " >= " << c;
    } else {
      put_terms(os, lhs_.terms(), 1, name);
      os << " <= " << -c;
    }
    return os.str();
  }
  put_terms(os, lhs_.terms(), 1, name);
  os << (rel_ == Rel::Eq ? " == " : " != ") << -c;
  return os.str();
}

std::string conj_str(const Conj& c, const SymNamer& name) {
  if (c.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += " && ";
    out += c[i].str(name);
  }
  return out;
}

}  // namespace agct
