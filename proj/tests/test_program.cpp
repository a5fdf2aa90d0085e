#include <random>

#include "doctest.h"

#include "agct/parser.hpp"
#include "agct/program.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace agct;

namespace {

const Transition* find_edge(const Program& p, const std::string& src, const std::string& dst) {
  for (const auto& e : p.edges)
    if (p.loc_names[e.src] == src && p.loc_names[e.dst] == dst) return &e;
  return nullptr;
}

Program one_state_monitor(const Program& p) {
  Program m;
  m.vars = p.vars;
  m.loc_names = {"m"};
  for (const auto& e : p.edges) {
    Transition t;
    t.label = e.label;
    t.origin = e.origin;
    t.command = e.command;
    m.edges.push_back(t);
  }
  m.finalize(true);
  return m;
}

}  // namespace

TEST_SUITE("program") {

TEST_CASE("motivating example lowers to the nine-location graph") {
  Program p = load_program(oracle::corpus("loop_tens.imp"));
  CHECK(p.num_locs() == 9);
  CHECK(p.edges.size() == 11);
  CHECK(p.loc_names[p.init] == "1");
  auto name = p.namer();
  struct Want {
    const char* src;
    const char* dst;
    const char* guard;
  };
  Want want[] = {{"2", "3", "i <= 29"}, {"2", "7", "i >= 30"}, {"4", "5", "x != 10"},
                 {"4", "6", "x == 10"}, {"7", "8", "b == 0"},  {"7", "9", "b != 0"}};
  for (const auto& w : want) {
    const Transition* e = find_edge(p, w.src, w.dst);
    REQUIRE(e != nullptr);
    CHECK(e->command.guard.str(name) == w.guard);
  }
  CHECK(find_edge(p, "3", "4")->command.kind == Command::Kind::Input);
  CHECK(find_edge(p, "6", "2")->command.kind == Command::Kind::Assign);
  CHECK(find_edge(p, "1", "2")->command.updates.size() == 3);
  CHECK(enumerate_branches(p) == GoalSet{"2#0", "2#1", "4#0", "4#1", "7#0", "7#1"});
  CHECK(p.edge("7#0").dst == 7);
}

TEST_CASE("corpus branch counts") {
  CHECK(enumerate_branches(load_program(oracle::corpus("simple_while.imp"))).size() == 12);
  CHECK(enumerate_branches(load_program(oracle::corpus("branches.imp"))).size() == 12);
  CHECK(enumerate_branches(load_program(oracle::corpus("unreach.imp"))).size() == 10);
}

TEST_CASE("straight-line program") {
  Program p = parse_program("var x = 1; x = x + 1;");
  CHECK(p.num_locs() == 3);
  CHECK(p.edges.size() == 2);
  CHECK(enumerate_branches(p).empty());
  CHECK(parse_program("").num_locs() == 1);
}

TEST_CASE("conjunction lowers to a branch per atom") {
  Program p = parse_program("var a; var b; a = input(); b = input(); if (a > 0 && b > 0) { a = 0; }");
  CHECK(enumerate_branches(p).size() == 4);
  Program q = parse_program("var a; a = input(); if (!(a > 0) || a == 5) { a = 0; } else { a = 1; }");
  CHECK(enumerate_branches(q).size() == 4);
  validate(q);
}

TEST_CASE("parse errors carry a position") {
  try {
    parse_program("var x = 1;\nx = x + 1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
  CHECK_THROWS_AS(parse_program("var r = 0;"), ParseError);
  CHECK_THROWS_AS(parse_program("var r12;"), ParseError);
  CHECK_NOTHROW(parse_program("var res = 0;"));
  CHECK_THROWS_AS(parse_program("var x; var y = 0; y = x;"), ParseError);
  CHECK_THROWS_AS(parse_program("var x = 0; x = y;"), ParseError);
  CHECK_THROWS_AS(parse_program("var x = 0; var x = 1;"), ParseError);
  CHECK_THROWS_AS(parse_program("var x = 1; var y = 2; if (x * y > 0) { x = 0; }"), ParseError);
  CHECK_THROWS_AS(parse_program("var x = 1; var y = 2; x = x * y + y * y;"), ParseError);
  CHECK_THROWS_AS(parse_program("var x = 1; x = x * x * x;"), ParseError);
  CHECK_THROWS_AS(parse_program("var x = 1; if (x < 2 < 3) { x = 0; }"), ParseError);
}

TEST_CASE("definite assignment follows both arms and ignores loop bodies") {
  CHECK_NOTHROW(parse_program("var x; var c; c = input(); if (c > 0) { x = 1; } else { x = 2; } c = x;"));
  CHECK_THROWS_AS(parse_program("var x; var c; c = input(); if (c > 0) { x = 1; } c = x;"), ParseError);
  CHECK_THROWS_AS(parse_program("var x; var c = 0; while (c < 2) { x = 1; c = c + 1; } c = x;"), ParseError);
  CHECK_NOTHROW(parse_program("var x; var c = 0; while (c < 2) { x = 1; c = x + c; }"));
}

TEST_CASE("nonlinear factor in an assignment") {
  Program p = parse_program("var x = 2; var y = 3; x = 2*x*y + 1;");
  const auto& u = p.edges[1].command.updates.at(0);
  REQUIRE(u.value.product.has_value());
  CHECK(u.value.product->coef == 2);
  CHECK(u.value.evaluate({2, 3}) == 13);
}

TEST_CASE("validation rejects malformed graphs") {
  Program p;
  p.vars = {"x"};
  p.loc_names = {"1", "2"};
  Atom g = Atom::make(Linear::of(Sym::var(0)), Rel::Gt);
  for (int i = 0; i < 3; ++i) {
    Transition t;
    t.src = 0;
    t.dst = 1;
    t.command = Command::assume(g);
    p.edges.push_back(t);
  }
  p.finalize(true);
  CHECK_THROWS_AS(validate(p), ProgramError);
  p.edges.pop_back();
  p.finalize(true);
  CHECK_THROWS_AS(validate(p), ProgramError);
  p.edges[1].command.guard = g.negated();
  p.finalize(true);
  CHECK_NOTHROW(validate(p));
}

TEST_CASE("product with itself or a one-state monitor changes nothing") {
  for (const char* f : {"loop_tens.imp", "simple_while.imp", "branches.imp", "unreach.imp"}) {
    Program p = load_program(oracle::corpus(f));
    CHECK(isomorphic(product(p, p), p));
    CHECK(isomorphic(product(p, one_state_monitor(p)), p));
    CHECK(product(p, p).num_locs() == p.num_locs());
  }
}

TEST_CASE("product drops edges the second component lacks") {
  Program p = load_program(oracle::corpus("loop_tens.imp"));
  Program m = one_state_monitor(p);
  std::erase_if(m.edges, [](const Transition& t) { return t.label == "4#0"; });
  m.finalize(true);
  Program q = product(p, m);
  GoalSet br = graph_reachable_branches(q);
  CHECK(q.num_locs() == 8);
  CHECK(enumerate_branches(q).size() == 4);
  CHECK(br.size() == 4);
  CHECK(!isomorphic(q, p));
}

TEST_CASE("formatted source parses back to the same graph") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    std::string text = gen::random_program(rng, {});
    Program p = parse_program(text);
    std::string again = format_source(parse_source(text));
    Program q = parse_program(again);
    REQUIRE(isomorphic(p, q));
    REQUIRE(p.edges.size() == q.edges.size());
    for (std::size_t k = 0; k < p.edges.size(); ++k) CHECK(p.edges[k].id == q.edges[k].id);
    CHECK(format_source(parse_source(again)) == again);
  }
}

TEST_CASE("graph dump labels edges with id, guard and command") {
  Program p = load_program(oracle::corpus("loop_tens.imp"));
  std::string dot = program_dot(p);
  CHECK(dot.find("7#0: b == 0 / skip") != std::string::npos);
  CHECK(dot.find("3#0: true / x := input()") != std::string::npos);
  CHECK(dot.find("6#0: true / i := i + 1") != std::string::npos);
}

}
