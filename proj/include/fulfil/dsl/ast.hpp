#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fulfil/dsl/value.hpp"

namespace fulfil::dsl {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Arg {
  std::string keyword;  // empty for positional
  ExprPtr value;
};

/// Piece of an interpolated string: literal text, or a `{expr}` hole.
struct StringPart {
  std::string text;
  ExprPtr hole;
};

struct Expr {
  enum class Kind {
    Literal,    // literal
    FString,    // parts
    Name,       // name
    HostAttr,   // name = "model.feasible" / "model.objVal"
    Call,       // name = "retrieve", "len" or a host method; args
    Index,      // items[0][items[1]]
    List,       // items
    Unary,      // op in {"-", "+", "not"}; items[0]
    Binary,     // op in {"+", "-", "*", "/", "//", "%"}; items[0], items[1]
    Compare,    // ops[i] between items[i] and items[i+1]
    And,        // items
    Or,         // items
  };

  Kind kind = Kind::Literal;
  int line = 0;
  int column = 0;
  Value literal;
  std::string name;
  std::string op;
  std::vector<std::string> ops;
  std::vector<ExprPtr> items;
  std::vector<Arg> args;
  std::vector<StringPart> parts;
};

struct Stmt;
using Block = std::vector<Stmt>;

struct Branch {
  ExprPtr condition;
  Block body;
};

struct Stmt {
  enum class Kind { Assign, AugAssign, Expr, If, For, Pass };

  Kind kind = Kind::Expr;
  int line = 0;
  int column = 0;
  std::string target;  // Assign, AugAssign, For loop variable
  std::string op;      // AugAssign: "+", "-", "*"
  ExprPtr value;       // Assign/AugAssign/Expr value, For iterable
  std::vector<Branch> branches;  // If: if + elif arms
  Block body;                    // For body, If else arm
};

struct Script {
  Block statements;
};

}  // namespace fulfil::dsl
