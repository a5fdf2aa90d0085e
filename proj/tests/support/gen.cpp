#include "support/gen.hpp"

#include <sstream>
#include <vector>

namespace gen {

namespace {

struct Gen {
  std::mt19937_64& rng;
  const Options& opt;
  std::ostringstream os;
  int inputs = 0;

  int pick(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }
  const char* var() {
    static const char* v[] = {"a", "b", "c", "x"};
    return v[pick(0, 3)];
  }
  const char* target() {
    static const char* v[] = {"a", "b", "c"};
    return v[pick(0, 2)];
  }
  void indent(int d) { os << std::string(2 * d, ' '); }

  std::string atom() {
    static const char* rel[] = {"<", "<=", "==", "!=", ">", ">="};
    std::ostringstream a;
    switch (pick(0, 2)) {
      case 0: a << var() << " " << rel[pick(0, 5)] << " " << pick(-3, 6); break;
      case 1: a << var() << " " << rel[pick(0, 5)] << " " << var() << " + " << pick(-2, 2); break;
      default: a << var() << " + " << var() << " " << rel[pick(0, 5)] << " " << pick(-4, 8); break;
    }
    return a.str();
  }

  std::string cond() {
    switch (pick(0, 5)) {
      case 0: return atom() + " && " + atom();
      case 1: return atom() + " || " + atom();
      case 2: return "!(" + atom() + ")";
      default: return atom();
    }
  }

  void assign(int d) {
    indent(d);
    const char* t = target();
    switch (pick(0, 3)) {
      case 0: os << t << " = " << var() << " + " << pick(-2, 3) << ";\n"; break;
      case 1: os << t << " = " << var() << " - " << var() << " + " << pick(-1, 2) << ";\n"; break;
      case 2: os << t << " = " << pick(-2, 5) << ";\n"; break;
      default: os << t << " = 2*" << var() << ";\n"; break;
    }
  }

  void block(int d, int depth, int n) {
    for (int i = 0; i < n; ++i) stmt(d, depth, false);
  }

  void stmt(int d, int depth, bool top) {
    int kind = pick(0, 9);
    if (top && inputs < opt.max_inputs && kind <= 2) {
      indent(d);
      os << "x = input();\n";
      ++inputs;
      return;
    }
    if (depth < 2 && kind >= 6 && kind <= 7) {
      indent(d);
      os << "if (" << cond() << ") {\n";
      block(d + 1, depth + 1, pick(1, 2));
      indent(d);
      if (pick(0, 1)) {
        os << "} else {\n";
        block(d + 1, depth + 1, pick(1, 2));
        indent(d);
      }
      os << "}\n";
      return;
    }
    if (opt.loops && depth < 2 && kind >= 8) {
      std::string l = depth == 0 ? "l0" : "l1";
      indent(d);
      os << l << " = 0;\n";
      indent(d);
      os << "while (" << l << " < " << pick(1, 3) << ") {\n";
      block(d + 1, depth + 1, pick(1, 2));
      indent(d + 1);
      os << l << " = " << l << " + 1;\n";
      indent(d);
      os << "}\n";
      return;
    }
    assign(d);
  }
};

}  // namespace

std::string random_program(std::mt19937_64& rng, const Options& opt) {
  Gen g{rng, opt, {}, 0};
  g.os << "var a = " << g.pick(-2, 2) << ";\nvar b = " << g.pick(-2, 2) << ";\nvar c = 0;\nvar x = 0;\n";
  g.os << "var l0 = 0;\nvar l1 = 0;\n";
  for (int i = 0; i < opt.top_stmts; ++i) g.stmt(0, 0, true);
  return g.os.str();
}

}  // namespace gen
