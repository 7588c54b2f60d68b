#include "eal/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <vector>

namespace eal::expr {

namespace {

bool is_const(const NodePtr& e, double v) {
  return e->kind == NodeKind::Constant && e->value == v;
}

bool is_int_value(double v) {
  return std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15;
}

}  // namespace

NodePtr constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->value = v;
  return n;
}

NodePtr variable() {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Variable;
  return n;
}

NodePtr make_binary(NodeKind k, NodePtr l, NodePtr r) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->left = std::move(l);
  n->right = std::move(r);
  if (k == NodeKind::Pow) {
    n->int_exponent = n->right->kind == NodeKind::Constant &&
                      is_int_value(n->right->value);
  }
  return n;
}

NodePtr make_unary(NodeKind k, NodePtr child) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->left = std::move(child);
  return n;
}

// ---------------------------------------------------------------- parser

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(std::size_t at, const std::string& msg) {
    throw ParseError(at, msg + " at offset " + std::to_string(at));
  }

  bool peek(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    for (;;) {
      if (accept('+')) {
        e = make_binary(NodeKind::Add, e, parse_term());
      } else if (accept('-')) {
        e = make_binary(NodeKind::Sub, e, parse_term());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_unary();
    for (;;) {
      if (accept('*')) {
        e = make_binary(NodeKind::Mul, e, parse_unary());
      } else if (accept('/')) {
        e = make_binary(NodeKind::Div, e, parse_unary());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    if (pos < text.size() && text[pos] == '-') {
      std::size_t at = pos;
      ++pos;
      skip_ws();
      // a minus directly before a literal folds into the constant, so
      // printed negative constants re-parse to the identical node
      if (pos < text.size() &&
          (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) {
        NodePtr num = parse_number();
        NodePtr neg = constant(-num->value);
        return parse_power_tail(neg, at);
      }
      NodePtr operand = parse_unary();
      return make_binary(NodeKind::Sub, constant(0.0), operand);
    }
    return parse_power();
  }

  NodePtr parse_power() {
    std::size_t at = pos;
    NodePtr base = parse_primary();
    return parse_power_tail(base, at);
  }

  NodePtr parse_power_tail(NodePtr base, std::size_t) {
    if (accept('^')) {
      // right-associative; exponent may carry a unary minus
      NodePtr expo = parse_unary_power();
      return make_binary(NodeKind::Pow, base, expo);
    }
    return base;
  }

  // exponent position: unary minus allowed, then another power level
  NodePtr parse_unary_power() {
    skip_ws();
    if (pos < text.size() && text[pos] == '-') {
      ++pos;
      skip_ws();
      if (pos < text.size() &&
          (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) {
        NodePtr num = parse_number();
        NodePtr neg = constant(-num->value);
        return parse_power_tail(neg, pos);
      }
      return make_binary(NodeKind::Sub, constant(0.0), parse_unary_power());
    }
    return parse_power();
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos >= text.size()) fail(pos, "unexpected end of input");
    char c = text[pos];
    if (c == '(') {
      ++pos;
      NodePtr e = parse_expr();
      if (!accept(')')) fail(pos, "expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
        ++pos;
      std::string_view ident = text.substr(start, pos - start);
      if (ident == "x") return variable();
      NodeKind k;
      if (ident == "exp") k = NodeKind::Exp;
      else if (ident == "log") k = NodeKind::Log;
      else if (ident == "sin") k = NodeKind::Sin;
      else if (ident == "cos") k = NodeKind::Cos;
      else if (ident == "sqrt") k = NodeKind::Sqrt;
      else fail(start, "unknown identifier '" + std::string(ident) + "'");
      if (!accept('(')) fail(pos, "expected '(' after function name");
      NodePtr arg = parse_expr();
      if (!accept(')')) fail(pos, "expected ')'");
      return make_unary(k, arg);
    }
    fail(pos, std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.'))
      ++pos;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      } else {
        pos = mark;  // 'e' was not an exponent
      }
    }
    std::string tok(text.substr(start, pos - start));
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || !std::isfinite(v))
      fail(start, "malformed number '" + tok + "'");
    return constant(v);
  }
};

}  // namespace

NodePtr parse(std::string_view text) {
  Parser p{text};
  NodePtr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail(p.pos, "trailing input");
  return e;
}

// --------------------------------------------------------------- printing

namespace {

int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Pow: return 3;
    default: return 4;  // atoms and function calls
  }
}

void print_node(const NodePtr& e, std::string& out, int parent_prec, bool right_side) {
  switch (e->kind) {
    case NodeKind::Constant: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e->value);
      out += buf;
      return;
    }
    case NodeKind::Variable:
      out += 'x';
      return;
    case NodeKind::Exp:
    case NodeKind::Log:
    case NodeKind::Sin:
    case NodeKind::Cos:
    case NodeKind::Sqrt: {
      switch (e->kind) {
        case NodeKind::Exp: out += "exp("; break;
        case NodeKind::Log: out += "log("; break;
        case NodeKind::Sin: out += "sin("; break;
        case NodeKind::Cos: out += "cos("; break;
        default: out += "sqrt("; break;
      }
      print_node(e->left, out, 0, false);
      out += ')';
      return;
    }
    default: break;
  }
  int prec = precedence(e->kind);
  // left-assoc ops need parens on an equal-precedence right child;
  // '^' is the mirror case
  bool need =
      prec < parent_prec ||
      (prec == parent_prec && right_side && e->kind != NodeKind::Pow) ||
      (prec == parent_prec && !right_side && e->kind == NodeKind::Pow);
  if (need) out += '(';
  const char* op = nullptr;
  switch (e->kind) {
    case NodeKind::Add: op = " + "; break;
    case NodeKind::Sub: op = " - "; break;
    case NodeKind::Mul: op = " * "; break;
    case NodeKind::Div: op = " / "; break;
    case NodeKind::Pow: op = "^"; break;
    default: op = "?"; break;
  }
  print_node(e->left, out, prec, false);
  out += op;
  print_node(e->right, out, prec, true);
  if (need) out += ')';
}

}  // namespace

std::string to_string(const NodePtr& e) {
  std::string out;
  print_node(e, out, 0, false);
  return out;
}

// ------------------------------------------------------------- evaluation

double eval(const NodePtr& e, double x) {
  switch (e->kind) {
    case NodeKind::Constant: return e->value;
    case NodeKind::Variable: return x;
    case NodeKind::Add: return eval(e->left, x) + eval(e->right, x);
    case NodeKind::Sub: return eval(e->left, x) - eval(e->right, x);
    case NodeKind::Mul: return eval(e->left, x) * eval(e->right, x);
    case NodeKind::Div: return eval(e->left, x) / eval(e->right, x);
    case NodeKind::Pow: {
      double b = eval(e->left, x);
      double p = eval(e->right, x);
      if (!e->int_exponent && b < 0.0)
        throw EvalError(to_string(e), b, "pow with non-integer exponent needs a positive base");
      return std::pow(b, p);
    }
    case NodeKind::Exp: return std::exp(eval(e->left, x));
    case NodeKind::Log: {
      double v = eval(e->left, x);
      if (v <= 0.0) throw EvalError(to_string(e), v, "log of non-positive value");
      return std::log(v);
    }
    case NodeKind::Sin: return std::sin(eval(e->left, x));
    case NodeKind::Cos: return std::cos(eval(e->left, x));
    case NodeKind::Sqrt: {
      double v = eval(e->left, x);
      if (v < 0.0) throw EvalError(to_string(e), v, "sqrt of negative value");
      return std::sqrt(v);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// --------------------------------------------------------- differentiation

namespace {

NodePtr simp_add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant)
    return constant(a->value + b->value);
  return make_binary(NodeKind::Add, std::move(a), std::move(b));
}

NodePtr simp_sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant)
    return constant(a->value - b->value);
  return make_binary(NodeKind::Sub, std::move(a), std::move(b));
}

NodePtr simp_mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant)
    return constant(a->value * b->value);
  return make_binary(NodeKind::Mul, std::move(a), std::move(b));
}

NodePtr simp_div(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return constant(0.0);
  if (is_const(b, 1.0)) return a;
  if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant && b->value != 0.0)
    return constant(a->value / b->value);
  return make_binary(NodeKind::Div, std::move(a), std::move(b));
}

NodePtr simp_pow(NodePtr b, NodePtr p) {
  if (is_const(p, 1.0)) return b;
  if (is_const(p, 0.0)) return constant(1.0);
  return make_binary(NodeKind::Pow, std::move(b), std::move(p));
}

}  // namespace

NodePtr differentiate(const NodePtr& e) {
  switch (e->kind) {
    case NodeKind::Constant: return constant(0.0);
    case NodeKind::Variable: return constant(1.0);
    case NodeKind::Add: return simp_add(differentiate(e->left), differentiate(e->right));
    case NodeKind::Sub: return simp_sub(differentiate(e->left), differentiate(e->right));
    case NodeKind::Mul:
      return simp_add(simp_mul(differentiate(e->left), e->right),
                      simp_mul(e->left, differentiate(e->right)));
    case NodeKind::Div:
      return simp_div(simp_sub(simp_mul(differentiate(e->left), e->right),
                               simp_mul(e->left, differentiate(e->right))),
                      simp_pow(e->right, constant(2.0)));
    case NodeKind::Pow: {
      const NodePtr& b = e->left;
      const NodePtr& p = e->right;
      if (p->kind == NodeKind::Constant) {
        // c * b^(c-1) * b'
        NodePtr inner = simp_pow(b, constant(p->value - 1.0));
        return simp_mul(simp_mul(constant(p->value), inner), differentiate(b));
      }
      // b^p * (p' log b + p b'/b)
      NodePtr t1 = simp_mul(differentiate(p), make_unary(NodeKind::Log, b));
      NodePtr t2 = simp_div(simp_mul(p, differentiate(b)), b);
      return simp_mul(make_binary(NodeKind::Pow, b, p), simp_add(t1, t2));
    }
    case NodeKind::Exp:
      return simp_mul(make_unary(NodeKind::Exp, e->left), differentiate(e->left));
    case NodeKind::Log:
      return simp_div(differentiate(e->left), e->left);
    case NodeKind::Sin:
      return simp_mul(make_unary(NodeKind::Cos, e->left), differentiate(e->left));
    case NodeKind::Cos:
      return simp_mul(constant(-1.0),
                      simp_mul(make_unary(NodeKind::Sin, e->left), differentiate(e->left)));
    case NodeKind::Sqrt:
      return simp_div(differentiate(e->left),
                      simp_mul(constant(2.0), make_unary(NodeKind::Sqrt, e->left)));
  }
  return constant(std::numeric_limits<double>::quiet_NaN());
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::Constant:
      return a->value == b->value ||
             (std::isnan(a->value) && std::isnan(b->value));
    case NodeKind::Variable: return true;
    case NodeKind::Exp:
    case NodeKind::Log:
    case NodeKind::Sin:
    case NodeKind::Cos:
    case NodeKind::Sqrt:
      return structurally_equal(a->left, b->left);
    default:
      return structurally_equal(a->left, b->left) &&
             structurally_equal(a->right, b->right);
  }
}

// ------------------------------------------------------------ FunctionSpec

namespace {

bool probe_grid_ok(const NodePtr& ast, double c) {
  // 24 points fanning out from just past c; overflow to inf is tolerated,
  // only genuine domain errors disqualify a candidate
  for (int j = 0; j < 24; ++j) {
    double x = c + 0.25 * std::pow(1.9, j);
    if (x > 1e8) break;
    try {
      double v = eval(ast, x);
      if (std::isnan(v)) return false;
    } catch (const EvalError&) {
      return false;
    }
  }
  return true;
}

}  // namespace

FunctionSpec make_function(std::string_view dsl, std::optional<double> domain_start) {
  return make_function_from_ast(parse(dsl), std::string(dsl), domain_start);
}

FunctionSpec make_function_from_ast(NodePtr ast, std::string name,
                                    std::optional<double> domain_start) {
  FunctionSpec f;
  f.name = std::move(name);
  f.ast = std::move(ast);
  f.ast_d1 = differentiate(f.ast);
  f.ast_d2 = differentiate(f.ast_d1);
  f.ast_d3 = differentiate(f.ast_d2);

  if (domain_start) {
    f.domain_start = *domain_start;
  } else {
    const double ee = std::exp(std::exp(1.0));
    const double candidates[] = {0.0, 1.0, std::exp(1.0), ee, std::exp(ee)};
    bool found = false;
    for (double c : candidates) {
      if (probe_grid_ok(f.ast, c)) {
        f.domain_start = c;
        found = true;
        break;
      }
    }
    if (!found)
      throw RootFindError("no usable domain start found for '" + f.name + "'");
  }

  NodePtr a = f.ast, d1 = f.ast_d1, d2 = f.ast_d2, d3 = f.ast_d3;
  f.value = [a](double x) { return eval(a, x); };
  f.deriv1 = [d1](double x) { return eval(d1, x); };
  f.deriv2 = [d2](double x) { return eval(d2, x); };
  f.deriv3 = [d3](double x) { return eval(d3, x); };

  // monotone hint from the derivative sign on a coarse grid
  int pos = 0, neg = 0, n = 0;
  for (int j = 0; j < 16; ++j) {
    double x = f.domain_start + 1.0 + std::pow(2.7, j);
    try {
      double d = f.deriv1(x);
      if (!std::isfinite(d)) continue;
      ++n;
      if (d > 0) ++pos;
      if (d < 0) ++neg;
    } catch (const EvalError&) {
    }
  }
  if (n >= 8 && pos == n) f.monotone_hint = Monotone::Increasing;
  else if (n >= 8 && neg == n) f.monotone_hint = Monotone::Decreasing;

  return f;
}

// ------------------------------------------------------------ inverse_eval

namespace {

double safe_value(const FunctionSpec& f, double x) {
  try {
    return f.value(x);
  } catch (const EvalError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

double inverse_eval(const FunctionSpec& f, double y, std::optional<Interval> bracket_hint) {
  constexpr double kBracketBound = 1e18;
  double lo, hi;
  if (bracket_hint) {
    lo = bracket_hint->lo;
    hi = bracket_hint->hi;
  } else {
    // expand outward from domain_start + 1
    double x0 = f.domain_start + 1.0;
    double g0 = safe_value(f, x0) - y;
    if (g0 == 0.0) return x0;
    bool increasing;
    if (f.monotone_hint != Monotone::Unknown) {
      increasing = f.monotone_hint == Monotone::Increasing;
    } else {
      double g1 = safe_value(f, x0 * 4.0) - y;
      increasing = g1 > g0;
    }
    bool search_up = increasing ? (g0 < 0.0) : (g0 > 0.0);
    if (search_up) {
      lo = x0;
      hi = x0 * 2.0;
      while (true) {
        double gh = safe_value(f, hi) - y;
        if (std::isfinite(gh) && (gh == 0.0 || (gh > 0.0) != (g0 > 0.0))) break;
        hi *= 2.0;
        if (hi > kBracketBound)
          throw RootFindError("no bracket found for '" + f.name + "' up to 1e18");
      }
    } else {
      hi = x0;
      double span = 0.5;
      lo = f.domain_start + span;
      while (true) {
        double gl = safe_value(f, lo) - y;
        if (std::isfinite(gl) && (gl == 0.0 || (gl > 0.0) != (g0 > 0.0))) break;
        span *= 0.5;
        lo = f.domain_start + span;
        if (span < 1e-14 * std::max(1.0, std::abs(f.domain_start)))
          throw RootFindError("no bracket found for '" + f.name + "' near the domain start");
      }
    }
  }

  double glo = safe_value(f, lo) - y;
  double ghi = safe_value(f, hi) - y;
  if (!std::isfinite(glo) || !std::isfinite(ghi) || (glo > 0.0) == (ghi > 0.0)) {
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    throw RootFindError("bracket endpoints do not straddle the target for '" + f.name + "'");
  }

  // spot check monotonicity inside the bracket
  {
    double prev = glo;
    int dir = 0;
    for (int j = 1; j <= 4; ++j) {
      double xs = lo + (hi - lo) * j / 5.0;
      double gs = safe_value(f, xs) - y;
      if (!std::isfinite(gs)) continue;
      int d = (gs > prev) - (gs < prev);
      if (d != 0) {
        if (dir != 0 && d != dir)
          throw RootFindError("non-monotone behavior inside bracket for '" + f.name + "'");
        dir = d;
      }
      prev = gs;
    }
  }

  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
    double mid = 0.5 * (lo + hi);
    double gm = safe_value(f, mid) - y;
    if (gm == 0.0) { lo = hi = mid; break; }
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }

  double x = 0.5 * (lo + hi);
  const double tol = 1e-10 * std::max(1.0, std::abs(y));
  for (int it = 0; it < 8; ++it) {
    double gx = safe_value(f, x) - y;
    if (std::abs(gx) <= tol) return x;
    double dx;
    try {
      dx = f.deriv1(x);
    } catch (const EvalError&) {
      dx = 0.0;
    }
    if (!std::isfinite(dx) || dx == 0.0) break;
    double next = x - gx / dx;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  double gx = safe_value(f, x) - y;
  if (std::abs(gx) <= tol) return x;
  throw RootFindError("root refinement failed tolerance for '" + f.name + "'");
}

}  // namespace eal::expr
