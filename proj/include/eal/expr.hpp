#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace eal::expr {

enum class NodeKind {
  Constant,
  Variable,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Exp,
  Log,
  Sin,
  Cos,
  Sqrt,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;     // Constant only
  NodePtr left, right;    // unary ops use left
  bool int_exponent = false;  // Pow whose exponent is an integer constant
};

NodePtr constant(double v);
NodePtr variable();
NodePtr make_binary(NodeKind k, NodePtr l, NodePtr r);
NodePtr make_unary(NodeKind k, NodePtr child);

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(std::size_t off, const std::string& what)
      : std::runtime_error(what), offset(off) {}
};

struct EvalError : std::runtime_error {
  std::string node_text;  // printed form of the offending node
  double arg;
  EvalError(std::string node, double a, const std::string& what)
      : std::runtime_error(what), node_text(std::move(node)), arg(a) {}
};

struct RootFindError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arithmetic grammar over +, -, *, /, ^ (right-associative) with
// exp, log, sin, cos, sqrt and the single variable x.
NodePtr parse(std::string_view text);

std::string to_string(const NodePtr& e);

double eval(const NodePtr& e, double x);

// Exact symbolic derivative (lightly simplified; evaluation-equivalent).
NodePtr differentiate(const NodePtr& e);

bool structurally_equal(const NodePtr& a, const NodePtr& b);

enum class Monotone { Increasing, Decreasing, Unknown };

// A closed-form iterate function with its first three derivatives and
// domain half-line (domain_start, inf).
struct FunctionSpec {
  std::function<double(double)> value;
  std::function<double(double)> deriv1;
  std::function<double(double)> deriv2;
  std::function<double(double)> deriv3;
  double domain_start = 0.0;
  Monotone monotone_hint = Monotone::Unknown;
  std::string name;

  // set for DSL-backed specs, null for algorithmic ones (inverses)
  NodePtr ast, ast_d1, ast_d2, ast_d3;

  // set by compose_inverse: the function this one inverts
  std::shared_ptr<const FunctionSpec> inverse_of;
};

// Builds a FunctionSpec from DSL text. domain_start defaults to the
// smallest c in {0, 1, e, e^e, e^(e^e)} whose probe grid evaluates finite.
FunctionSpec make_function(std::string_view dsl,
                           std::optional<double> domain_start = std::nullopt);

FunctionSpec make_function_from_ast(NodePtr ast, std::string name,
                                    std::optional<double> domain_start = std::nullopt);

struct Interval {
  double lo, hi;
};

// Solves f(x) = y for eventually monotone f: bracket expansion, bisection,
// Newton polish with deriv1. |f(x)-y| <= 1e-10 * max(1,|y|).
double inverse_eval(const FunctionSpec& f, double y,
                    std::optional<Interval> bracket_hint = std::nullopt);

}  // namespace eal::expr
