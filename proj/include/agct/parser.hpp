#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "agct/program.hpp"

namespace agct {

struct ParseError : std::runtime_error {
  ParseError(int line, int col, const std::string& msg);
  int line;
  int col;
};

namespace ast {

struct Cond {
  enum class Kind { Leaf, And, Or, Not };
  Kind kind = Kind::Leaf;
  Atom atom = Atom::truth();
  std::vector<Cond> kids;
};

struct Stmt {
  enum class Kind { Assign, Input, If, While };
  Kind kind = Kind::Assign;
  VarId var = -1;
  Expr value;
  Cond cond;
  std::vector<Stmt> body;
  std::vector<Stmt> orelse;
  bool has_else = false;
  int line = 0;
};

struct Decl {
  std::string name;
  std::optional<Int> init;
};

struct Source {
  std::vector<Decl> decls;
  std::vector<Stmt> body;
};

}  // namespace ast

ast::Source parse_source(std::string_view text);
std::string format_source(const ast::Source& src);

// Lowers to guarded commands. Declaration initializers become one parallel
// assignment out of the initial location; conditions are lowered with
// short-circuit branching so every branch tests a single atom.
Program lower(const ast::Source& src);

Program parse_program(std::string_view text);
Program load_program(const std::filesystem::path& file);

bool is_reserved_name(std::string_view name);

}  // namespace agct
