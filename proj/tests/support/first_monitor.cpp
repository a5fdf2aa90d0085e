#include "support/first_monitor.hpp"

#include <map>

namespace oracle {

using namespace agct;

Program expected_first_monitor(const Program& loop) {
  const char* states[] = {"1", "2b", "3b", "4b", "5b", "6b", "7b", "8b", "9b",
                          "2n", "3n", "4n", "5n", "6n", "7n", "9n"};
  struct E {
    const char* src;
    const char* dst;
    const char* label;
  };
  E edges[] = {{"1", "2b", "1#0"},  {"2b", "3b", "2#0"}, {"2b", "7b", "2#1"}, {"3b", "4b", "3#0"},
               {"4b", "5b", "4#0"}, {"4b", "6b", "4#1"}, {"5b", "6n", "5#0"}, {"6b", "2b", "6#0"},
               {"7b", "8b", "7#0"}, {"8b", "9b", "8#0"}, {"6n", "2n", "6#0"}, {"2n", "3n", "2#0"},
               {"2n", "7n", "2#1"}, {"3n", "4n", "3#0"}, {"4n", "5n", "4#0"}, {"4n", "6n", "4#1"},
               {"5n", "6n", "5#0"}, {"7n", "9n", "7#1"}};
  Program m;
  m.vars = loop.vars;
  std::map<std::string, Loc> at;
  for (const char* s : states) {
    at[s] = m.num_locs();
    m.loc_names.push_back(s);
  }
  for (const auto& e : edges) {
    Transition t;
    t.src = at.at(e.src);
    t.dst = at.at(e.dst);
    const auto& orig = loop.edge(e.label);
    t.label = orig.label;
    t.origin = orig.origin;
    t.command = orig.command;
    m.edges.push_back(t);
  }
  m.init = at.at("1");
  m.finalize(true);
  return m;
}

PredicateSet b_predicates(const Program& loop) {
  VarId b = -1;
  for (VarId v = 0; v < static_cast<VarId>(loop.vars.size()); ++v)
    if (loop.vars[v] == "b") b = v;
  PredicateSet pi;
  pi.add(Atom::make(Linear::of(Sym::var(b)), Rel::Eq, Linear(0)));
  return pi;
}

}  // namespace oracle
