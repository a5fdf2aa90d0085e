#include "agct/parser.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace agct {

ParseError::ParseError(int l, int c, const std::string& msg)
    : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), col(c) {}

namespace {

const std::set<std::string, std::less<>> kKeywords = {"var", "if", "else", "while", "input", "true", "false"};

struct Token {
  enum class Kind { Ident, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  Int value = 0;
  int line = 1;
  int col = 1;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (s.substr(i, 2) == "//") {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    if (s.substr(i, 2) == "/*") {
      int l0 = line, c0 = col;
      auto end = s.find("*/", i + 2);
      if (end == std::string_view::npos) throw ParseError(l0, c0, "unterminated comment");
      advance(end + 2 - i);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(s.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      t.kind = Token::Kind::Int;
      t.text = std::string(s.substr(i, j - i));
      try {
        t.value = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        throw ParseError(line, col, "integer literal out of range");
      }
      advance(j - i);
    } else {
      static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||"};
      t.kind = Token::Kind::Punct;
      for (const char* op : two)
        if (s.substr(i, 2) == op) t.text = op;
      if (t.text.empty()) {
        if (std::string_view("=<>!(){};+-*").find(c) == std::string_view::npos)
          throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// Polynomial of degree at most two, the intermediate form of expressions.
struct Poly {
  Int c = 0;
  std::map<VarId, Int> lin;
  std::map<std::pair<VarId, VarId>, Int> quad;

  bool is_const() const { return lin.empty() && quad.empty(); }
  void prune() {
    std::erase_if(lin, [](const auto& kv) { return kv.second == 0; });
    std::erase_if(quad, [](const auto& kv) { return kv.second == 0; });
  }
};

Poly add(Poly a, const Poly& b, Int sign) {
  a.c = checked_add(a.c, checked_mul(sign, b.c));
  for (const auto& [v, k] : b.lin) a.lin[v] = checked_add(a.lin[v], checked_mul(sign, k));
  for (const auto& [v, k] : b.quad) a.quad[v] = checked_add(a.quad[v], checked_mul(sign, k));
  a.prune();
  return a;
}

std::optional<Poly> mul(const Poly& a, const Poly& b) {
  if (!a.quad.empty() && !b.is_const()) return std::nullopt;
  if (!b.quad.empty() && !a.is_const()) return std::nullopt;
  Poly r;
  r.c = checked_mul(a.c, b.c);
  for (const auto& [v, k] : a.lin) r.lin[v] = checked_add(r.lin[v], checked_mul(k, b.c));
  for (const auto& [v, k] : b.lin) r.lin[v] = checked_add(r.lin[v], checked_mul(k, a.c));
  for (const auto& [v, k] : a.quad) r.quad[v] = checked_add(r.quad[v], checked_mul(k, b.c));
  for (const auto& [v, k] : b.quad) r.quad[v] = checked_add(r.quad[v], checked_mul(k, a.c));
  for (const auto& [x, p] : a.lin)
    for (const auto& [y, q] : b.lin) {
      auto key = std::minmax(x, y);
      r.quad[key] = checked_add(r.quad[key], checked_mul(p, q));
    }
  r.prune();
  return r;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  ast::Source parse() {
    ast::Source src;
    while (is_ident("var")) src.decls.push_back(parse_decl());
    while (!at_end()) src.body.push_back(parse_stmt());
    return src;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, VarId, std::less<>> vars_;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool is_punct(std::string_view p, std::size_t k = 0) const {
    return peek(k).kind == Token::Kind::Punct && peek(k).text == p;
  }
  bool is_ident(std::string_view p) const { return peek().kind == Token::Kind::Ident && peek().text == p; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(peek().line, peek().col, msg); }
  void expect(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "'" + found());
    ++pos_;
  }
  void expect_kw(std::string_view k) {
    if (!is_ident(k)) fail("expected '" + std::string(k) + "'" + found());
    ++pos_;
  }
  std::string found() const {
    if (at_end()) return " but reached end of input";
    return " but found '" + peek().text + "'";
  }

  ast::Decl parse_decl() {
    expect_kw("var");
    if (peek().kind != Token::Kind::Ident) fail("expected variable name" + found());
    ast::Decl d;
    d.name = peek().text;
    if (kKeywords.contains(d.name)) fail("keyword '" + d.name + "' used as variable name");
    if (is_reserved_name(d.name)) fail("use of reserved name '" + d.name + "'");
    if (vars_.contains(d.name)) fail("duplicate declaration of '" + d.name + "'");
    ++pos_;
    if (is_punct("=")) {
      ++pos_;
      Int sign = 1;
      if (is_punct("-")) {
        sign = -1;
        ++pos_;
      }
      if (peek().kind != Token::Kind::Int) fail("initializer must be an integer literal" + found());
      d.init = sign * peek().value;
      ++pos_;
    }
    expect(";");
    vars_.emplace(d.name, static_cast<VarId>(vars_.size()));
    return d;
  }

  VarId lookup(const Token& t) const {
    auto it = vars_.find(t.text);
    if (it == vars_.end()) throw ParseError(t.line, t.col, "undeclared variable '" + t.text + "'");
    return it->second;
  }

  std::vector<ast::Stmt> parse_block() {
    expect("{");
    std::vector<ast::Stmt> out;
    while (!is_punct("}")) {
      if (at_end()) fail("unterminated block");
      out.push_back(parse_stmt());
    }
    expect("}");
    return out;
  }

  ast::Stmt parse_stmt() {
    ast::Stmt s;
    s.line = peek().line;
    if (is_ident("if")) {
      ++pos_;
      s.kind = ast::Stmt::Kind::If;
      expect("(");
      s.cond = parse_cond();
      expect(")");
      s.body = parse_block();
      if (is_ident("else")) {
        ++pos_;
        s.has_else = true;
        if (is_ident("if")) {
          s.orelse.push_back(parse_stmt());
        } else {
          s.orelse = parse_block();
        }
      }
      return s;
    }
    if (is_ident("while")) {
      ++pos_;
      s.kind = ast::Stmt::Kind::While;
      expect("(");
      s.cond = parse_cond();
      expect(")");
      s.body = parse_block();
      return s;
    }
    if (peek().kind != Token::Kind::Ident || kKeywords.contains(peek().text)) fail("expected statement" + found());
    s.var = lookup(peek());
    ++pos_;
    expect("=");
    if (is_ident("input")) {
      ++pos_;
      expect("(");
      expect(")");
      s.kind = ast::Stmt::Kind::Input;
    } else {
      s.kind = ast::Stmt::Kind::Assign;
      const Token& at = peek();
      s.value = to_expr(parse_expr(), at);
    }
    expect(";");
    return s;
  }

  Expr to_expr(const Poly& p, const Token& at) const {
    if (p.quad.size() > 1) throw ParseError(at.line, at.col, "at most one nonlinear factor is allowed");
    Expr e;
    e.linear = Linear(p.c);
    for (const auto& [v, k] : p.lin) e.linear += Linear::of(Sym::var(v), k);
    if (!p.quad.empty()) {
      const auto& [key, k] = *p.quad.begin();
      e.product = NonlinearTerm{k, key.first, key.second};
    }
    return e;
  }

  Poly parse_expr() {
    Poly acc = parse_term();
    while (is_punct("+") || is_punct("-")) {
      Int sign = is_punct("+") ? 1 : -1;
      ++pos_;
      acc = add(acc, parse_term(), sign);
    }
    return acc;
  }

  Poly parse_term() {
    Poly acc = parse_factor();
    while (is_punct("*")) {
      const Token& at = peek();
      ++pos_;
      auto r = mul(acc, parse_factor());
      if (!r) throw ParseError(at.line, at.col, "expression is not of degree two or less");
      acc = *r;
    }
    return acc;
  }

  Poly parse_factor() {
    Poly p;
    if (is_punct("-")) {
      ++pos_;
      return add(Poly{}, parse_factor(), -1);
    }
    if (is_punct("(")) {
      ++pos_;
      p = parse_expr();
      expect(")");
      return p;
    }
    const Token& t = peek();
    if (t.kind == Token::Kind::Int) {
      ++pos_;
      p.c = t.value;
      return p;
    }
    if (t.kind == Token::Kind::Ident && (t.text == "true" || t.text == "false")) {
      ++pos_;
      p.c = t.text == "true" ? 1 : 0;
      return p;
    }
    if (t.kind == Token::Kind::Ident && !kKeywords.contains(t.text)) {
      ++pos_;
      p.lin[lookup(t)] = 1;
      return p;
    }
    fail("expected expression" + found());
  }

  static std::optional<Rel> relop(const Token& t) {
    if (t.kind != Token::Kind::Punct) return std::nullopt;
    if (t.text == "<") return Rel::Lt;
    if (t.text == "<=") return Rel::Le;
    if (t.text == "==") return Rel::Eq;
    if (t.text == "!=") return Rel::Ne;
    if (t.text == ">") return Rel::Gt;
    if (t.text == ">=") return Rel::Ge;
    return std::nullopt;
  }

  ast::Cond parse_cond() {
    ast::Cond first = parse_conj();
    if (!is_punct("||")) return first;
    ast::Cond c;
    c.kind = ast::Cond::Kind::Or;
    c.kids.push_back(std::move(first));
    while (is_punct("||")) {
      ++pos_;
      c.kids.push_back(parse_conj());
    }
    return c;
  }

  ast::Cond parse_conj() {
    ast::Cond first = parse_unary();
    if (!is_punct("&&")) return first;
    ast::Cond c;
    c.kind = ast::Cond::Kind::And;
    c.kids.push_back(std::move(first));
    while (is_punct("&&")) {
      ++pos_;
      c.kids.push_back(parse_unary());
    }
    return c;
  }

  ast::Cond parse_unary() {
    if (is_punct("!")) {
      ++pos_;
      ast::Cond c;
      c.kind = ast::Cond::Kind::Not;
      c.kids.push_back(parse_unary());
      return c;
    }
    std::size_t save = pos_;
    try {
      return parse_comparison();
    } catch (const ParseError&) {
      if (toks_[save].kind != Token::Kind::Punct || toks_[save].text != "(") throw;
      pos_ = save;
    }
    expect("(");
    ast::Cond c = parse_cond();
    expect(")");
    return c;
  }

  ast::Cond parse_comparison() {
    const Token& at = peek();
    Poly lhs = parse_expr();
    Poly rhs;
    Rel rel = Rel::Ne;
    if (auto r = relop(peek())) {
      rel = *r;
      ++pos_;
      rhs = parse_expr();
      if (relop(peek())) fail("comparisons cannot be chained");
    }
    Poly diff = add(lhs, rhs, -1);
    if (!diff.quad.empty()) throw ParseError(at.line, at.col, "nonlinear factor is only allowed in assignments");
    ast::Cond c;
    c.atom = Atom::make(to_expr(diff, at).linear, rel);
    return c;
  }
};

struct Lowering {
  const ast::Source& src;
  Program p;
  std::vector<Transition> edges;
  int nlocs = 0;

  Loc fresh() { return nlocs++; }

  void emit(Loc s, Loc d, Command c) {
    Transition t;
    t.src = s;
    t.dst = d;
    t.command = std::move(c);
    edges.push_back(std::move(t));
  }

  void cond(const ast::Cond& c, Loc s, Loc t, Loc f) {
    switch (c.kind) {
      case ast::Cond::Kind::Leaf:
        emit(s, t, Command::assume(c.atom));
        emit(s, f, Command::assume(c.atom.negated()));
        return;
      case ast::Cond::Kind::Not:
        cond(c.kids[0], s, f, t);
        return;
      case ast::Cond::Kind::And:
      case ast::Cond::Kind::Or: {
        bool is_and = c.kind == ast::Cond::Kind::And;
        Loc cur = s;
        for (std::size_t i = 0; i < c.kids.size(); ++i) {
          bool last = i + 1 == c.kids.size();
          Loc next = last ? (is_and ? t : f) : fresh();
          if (is_and) {
            cond(c.kids[i], cur, last ? t : next, f);
          } else {
            cond(c.kids[i], cur, t, last ? f : next);
          }
          cur = next;
        }
        return;
      }
    }
  }

  Loc block(const std::vector<ast::Stmt>& body, Loc s, std::optional<Loc> dst) {
    Loc cur = s;
    for (std::size_t i = 0; i < body.size(); ++i)
      cur = stmt(body[i], cur, i + 1 == body.size() ? dst : std::nullopt);
    return cur;
  }

  Loc stmt(const ast::Stmt& st, Loc s, std::optional<Loc> dst) {
    switch (st.kind) {
      case ast::Stmt::Kind::Assign: {
        Loc d = dst ? *dst : fresh();
        emit(s, d, Command::assign({Update{st.var, st.value}}));
        return d;
      }
      case ast::Stmt::Kind::Input: {
        Loc d = dst ? *dst : fresh();
        emit(s, d, Command::input(st.var));
        return d;
      }
      case ast::Stmt::Kind::If: {
        Loc then_entry, join;
        if (!st.body.empty()) {
          then_entry = fresh();
          join = block(st.body, then_entry, dst);
        } else {
          join = dst ? *dst : fresh();
          then_entry = join;
        }
        Loc else_entry = join;
        if (!st.orelse.empty()) {
          else_entry = fresh();
          block(st.orelse, else_entry, join);
        }
        cond(st.cond, s, then_entry, else_entry);
        return join;
      }
      case ast::Stmt::Kind::While: {
        Loc head = s;
        Loc body_entry = head;
        if (!st.body.empty()) {
          body_entry = fresh();
          block(st.body, body_entry, head);
        }
        Loc exit = dst ? *dst : fresh();
        cond(st.cond, head, body_entry, exit);
        return exit;
      }
    }
    return s;
  }
};

void collect_reads(const Expr& e, std::vector<VarId>& out) {
  for (const auto& [s, k] : e.linear.terms()) out.push_back(s.id);
  if (e.product) {
    out.push_back(e.product->lhs);
    out.push_back(e.product->rhs);
  }
}

void collect_reads(const ast::Cond& c, std::vector<VarId>& out) {
  for (const auto& [s, k] : c.atom.lhs().terms()) out.push_back(s.id);
  for (const auto& k : c.kids) collect_reads(k, out);
}

// Definite assignment over the structured source: a loop body may run zero
// times, so nothing it assigns is known after the loop.
void check_assigned(const ast::Source& src, const std::vector<ast::Stmt>& body, std::vector<bool>& known) {
  auto check = [&](const std::vector<VarId>& reads, int line) {
    for (VarId v : reads)
      if (!known[v]) throw ParseError(line, 1, "variable '" + src.decls[v].name + "' may be read before assignment");
  };
  for (const auto& s : body) {
    std::vector<VarId> reads;
    switch (s.kind) {
      case ast::Stmt::Kind::Assign:
        collect_reads(s.value, reads);
        check(reads, s.line);
        known[s.var] = true;
        break;
      case ast::Stmt::Kind::Input:
        known[s.var] = true;
        break;
      case ast::Stmt::Kind::If: {
        collect_reads(s.cond, reads);
        check(reads, s.line);
        auto a = known, b = known;
        check_assigned(src, s.body, a);
        check_assigned(src, s.orelse, b);
        for (std::size_t i = 0; i < known.size(); ++i) known[i] = a[i] && b[i];
        break;
      }
      case ast::Stmt::Kind::While: {
        collect_reads(s.cond, reads);
        check(reads, s.line);
        auto inner = known;
        check_assigned(src, s.body, inner);
        break;
      }
    }
  }
}

void put_indent(std::ostringstream& os, int d) { os << std::string(2 * d, ' '); }

std::string cond_str(const ast::Cond& c, const SymNamer& name, bool nested) {
  switch (c.kind) {
    case ast::Cond::Kind::Leaf: return c.atom.str(name);
    case ast::Cond::Kind::Not: return "!(" + cond_str(c.kids[0], name, false) + ")";
    default: {
      std::string op = c.kind == ast::Cond::Kind::And ? " && " : " || ";
      std::string out;
      for (std::size_t i = 0; i < c.kids.size(); ++i) {
        if (i) out += op;
        out += cond_str(c.kids[i], name, true);
      }
      return nested ? "(" + out + ")" : out;
    }
  }
}

std::string expr_str(const Expr& e, const SymNamer& name, const std::vector<ast::Decl>& decls) {
  if (!e.product) return e.linear.str(name);
  const auto& nl = *e.product;
  std::string prod = std::to_string(nl.coef) + "*" + decls[nl.lhs].name + "*" + decls[nl.rhs].name;
  if (e.linear == Linear()) return prod;
  return prod + " + " + e.linear.str(name);
}

void format_block(std::ostringstream& os, const ast::Source& src, const std::vector<ast::Stmt>& body, int d,
                  const SymNamer& name) {
  for (const auto& s : body) {
    put_indent(os, d);
    switch (s.kind) {
      case ast::Stmt::Kind::Assign:
        os << src.decls[s.var].name << " = " << expr_str(s.value, name, src.decls) << ";\n";
        break;
      case ast::Stmt::Kind::Input:
        os << src.decls[s.var].name << " = input();\n";
        break;
      case ast::Stmt::Kind::If:
        os << "if (" << cond_str(s.cond, name, false) << ") {\n";
        format_block(os, src, s.body, d + 1, name);
        put_indent(os, d);
        if (s.has_else) {
          os << "} else {\n";
          format_block(os, src, s.orelse, d + 1, name);
          put_indent(os, d);
        }
        os << "}\n";
        break;
      case ast::Stmt::Kind::While:
        os << "while (" << cond_str(s.cond, name, false) << ") {\n";
        format_block(os, src, s.body, d + 1, name);
        put_indent(os, d);
        os << "}\n";
        break;
    }
  }
}

}  // namespace

bool is_reserved_name(std::string_view name) {
  if (name.empty() || name[0] != 'r') return false;
  std::string_view rest = name.substr(1);
  if (!rest.empty() && rest[0] == '_') rest = rest.substr(1);
  for (char c : rest)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

ast::Source parse_source(std::string_view text) { return Parser(text).parse(); }

Program lower(const ast::Source& src) {
  std::vector<bool> known(src.decls.size(), false);
  for (std::size_t i = 0; i < src.decls.size(); ++i) known[i] = src.decls[i].init.has_value();
  check_assigned(src, src.body, known);

  Lowering lw{src, {}, {}, 0};
  Loc cur = lw.fresh();
  std::vector<Update> inits;
  for (std::size_t i = 0; i < src.decls.size(); ++i)
    if (src.decls[i].init) inits.push_back(Update{static_cast<VarId>(i), Expr{Linear(*src.decls[i].init), {}}});
  if (!inits.empty()) {
    Loc next = lw.fresh();
    lw.emit(cur, next, Command::assign(std::move(inits)));
    cur = next;
  }
  lw.block(src.body, cur, std::nullopt);

  // Edge ids are positional per source location, in emission order.
  std::vector<std::string> vars;
  for (const auto& d : src.decls) vars.push_back(d.name);
  Program p = make_program(std::move(vars), lw.nlocs, 0, std::move(lw.edges));
  validate(p);
  return p;
}

std::string format_source(const ast::Source& src) {
  std::ostringstream os;
  for (const auto& d : src.decls) {
    os << "var " << d.name;
    if (d.init) os << " = " << *d.init;
    os << ";\n";
  }
  SymNamer name = [&](Sym s) { return src.decls.at(s.id).name; };
  format_block(os, src, src.body, 0, name);
  return os.str();
}

Program parse_program(std::string_view text) {
  try {
    return lower(parse_source(text));
  } catch (const OverflowError&) {
    throw ParseError(0, 0, "integer overflow in constant expression");
  }
}

Program load_program(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ProgramError("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

}  // namespace agct
