#include "smd2cpn/expr.hpp"

#include "smd2cpn/error.hpp"

namespace smd2cpn {

Expr Expr::literal(Value v) {
  Node n;
  n.kind = Kind::Literal;
  n.value = std::move(v);
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::var(std::string name) {
  Node n;
  n.kind = Kind::Var;
  n.name = std::move(name);
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::tuple(std::vector<Expr> items) {
  Node n;
  n.kind = Kind::Tuple;
  n.operands = std::move(items);
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::unary(UnaryOp op, Expr operand) {
  Node n;
  n.kind = Kind::Unary;
  n.unary = op;
  n.operands.push_back(std::move(operand));
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  Node n;
  n.kind = Kind::Binary;
  n.binary = op;
  n.operands.push_back(std::move(lhs));
  n.operands.push_back(std::move(rhs));
  return Expr(std::make_shared<const Node>(std::move(n)));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Expr::Kind::Literal:
      return x.value == y.value;
    case Expr::Kind::Var:
      return x.name == y.name;
    case Expr::Kind::Tuple:
      return x.operands == y.operands;
    case Expr::Kind::Unary:
      return x.unary == y.unary && x.operands == y.operands;
    case Expr::Kind::Binary:
      return x.binary == y.binary && x.operands == y.operands;
  }
  return false;
}

void Expr::collect_vars(std::set<std::string>& out) const {
  if (kind() == Kind::Var) out.insert(name());
  for (const auto& op : operands()) op.collect_vars(out);
}

Expr Expr::substitute(const std::map<std::string, Expr>& subst) const {
  switch (kind()) {
    case Kind::Literal:
      return *this;
    case Kind::Var: {
      auto it = subst.find(name());
      return it == subst.end() ? *this : it->second;
    }
    case Kind::Tuple: {
      std::vector<Expr> items;
      for (const auto& op : operands()) items.push_back(op.substitute(subst));
      return tuple(std::move(items));
    }
    case Kind::Unary:
      return unary(unary_op(), operands()[0].substitute(subst));
    case Kind::Binary:
      return binary(binary_op(), operands()[0].substitute(subst), operands()[1].substitute(subst));
  }
  return *this;
}

Expr Expr::rename(const std::function<std::string(const std::string&)>& fn) const {
  switch (kind()) {
    case Kind::Literal:
      return *this;
    case Kind::Var:
      return var(fn(name()));
    case Kind::Tuple: {
      std::vector<Expr> items;
      for (const auto& op : operands()) items.push_back(op.rename(fn));
      return tuple(std::move(items));
    }
    case Kind::Unary:
      return unary(unary_op(), operands()[0].rename(fn));
    case Kind::Binary:
      return binary(binary_op(), operands()[0].rename(fn), operands()[1].rename(fn));
  }
  return *this;
}

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or:
      return 1;
    case BinaryOp::And:
      return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
      return 3;
    case BinaryOp::Add:
    case BinaryOp::Sub:
      return 4;
    case BinaryOp::Mul:
      return 5;
  }
  return 0;
}

bool is_comparison(BinaryOp op) { return precedence(op) == 3; }

Value evaluate(const Expr& e, const Env& env) {
  switch (e.kind()) {
    case Expr::Kind::Literal:
      return e.value();
    case Expr::Kind::Var: {
      auto v = env(e.name());
      if (!v) throw Error("unbound variable '" + e.name() + "'");
      return *v;
    }
    case Expr::Kind::Tuple: {
      std::vector<Value> items;
      items.reserve(e.operands().size());
      for (const auto& op : e.operands()) items.push_back(evaluate(op, env));
      return Value::tuple(std::move(items));
    }
    case Expr::Kind::Unary: {
      Value v = evaluate(e.operands()[0], env);
      return e.unary_op() == UnaryOp::Neg ? Value::integer(-v.as_int()) : Value::boolean(!v.as_bool());
    }
    case Expr::Kind::Binary:
      break;
  }
  const BinaryOp op = e.binary_op();
  Value lhs = evaluate(e.operands()[0], env);
  // short-circuit
  if (op == BinaryOp::And && !lhs.as_bool()) return Value::boolean(false);
  if (op == BinaryOp::Or && lhs.as_bool()) return Value::boolean(true);
  Value rhs = evaluate(e.operands()[1], env);
  switch (op) {
    case BinaryOp::Add:
      return Value::integer(lhs.as_int() + rhs.as_int());
    case BinaryOp::Sub:
      return Value::integer(lhs.as_int() - rhs.as_int());
    case BinaryOp::Mul:
      return Value::integer(lhs.as_int() * rhs.as_int());
    case BinaryOp::Eq:
      return Value::boolean(lhs == rhs);
    case BinaryOp::Ne:
      return Value::boolean(lhs != rhs);
    case BinaryOp::Lt:
      return Value::boolean(lhs.as_int() < rhs.as_int());
    case BinaryOp::Le:
      return Value::boolean(lhs.as_int() <= rhs.as_int());
    case BinaryOp::Gt:
      return Value::boolean(lhs.as_int() > rhs.as_int());
    case BinaryOp::Ge:
      return Value::boolean(lhs.as_int() >= rhs.as_int());
    case BinaryOp::And:
    case BinaryOp::Or:
      return Value::boolean(rhs.as_bool());
  }
  throw Error("unknown operator");
}

Value evaluate(const Expr& e, const std::map<std::string, Value>& env) {
  return evaluate(e, [&env](const std::string& name) -> std::optional<Value> {
    auto it = env.find(name);
    if (it == env.end()) return std::nullopt;
    return it->second;
  });
}

std::optional<ExprType> infer_type(const Expr& e, const std::set<std::string>& int_vars,
                                   std::set<std::string>* unknown) {
  switch (e.kind()) {
    case Expr::Kind::Literal:
      if (e.value().kind() == Value::Kind::Int) return ExprType::Int;
      if (e.value().kind() == Value::Kind::Bool) return ExprType::Bool;
      return std::nullopt;
    case Expr::Kind::Var:
      if (!int_vars.count(e.name())) {
        if (unknown) unknown->insert(e.name());
        return std::nullopt;
      }
      return ExprType::Int;
    case Expr::Kind::Tuple:
      return std::nullopt;
    case Expr::Kind::Unary: {
      auto t = infer_type(e.operands()[0], int_vars, unknown);
      if (e.unary_op() == UnaryOp::Neg) return t == ExprType::Int ? t : std::nullopt;
      return t == ExprType::Bool ? t : std::nullopt;
    }
    case Expr::Kind::Binary:
      break;
  }
  auto l = infer_type(e.operands()[0], int_vars, unknown);
  auto r = infer_type(e.operands()[1], int_vars, unknown);
  const BinaryOp op = e.binary_op();
  if (op == BinaryOp::And || op == BinaryOp::Or) {
    return l == ExprType::Bool && r == ExprType::Bool ? std::optional(ExprType::Bool) : std::nullopt;
  }
  if (op == BinaryOp::Eq || op == BinaryOp::Ne) {
    return l && l == r ? std::optional(ExprType::Bool) : std::nullopt;
  }
  if (l != ExprType::Int || r != ExprType::Int) return std::nullopt;
  return is_comparison(op) ? ExprType::Bool : ExprType::Int;
}

}  // namespace smd2cpn

namespace smd2cpn {

namespace {

const char* op_text(BinaryOp op, const ExprSyntax& s) {
  switch (op) {
    case BinaryOp::Add:
      return " + ";
    case BinaryOp::Sub:
      return " - ";
    case BinaryOp::Mul:
      return " * ";
    case BinaryOp::Eq:
      return s.eq;
    case BinaryOp::Ne:
      return s.ne;
    case BinaryOp::Lt:
      return " < ";
    case BinaryOp::Le:
      return " <= ";
    case BinaryOp::Gt:
      return " > ";
    case BinaryOp::Ge:
      return " >= ";
    case BinaryOp::And:
      return s.and_;
    case BinaryOp::Or:
      return s.or_;
  }
  return " ? ";
}

void render(const Expr& e, const ExprSyntax& s, std::string& out);

void render_operand(const Expr& e, const ExprSyntax& s, std::string& out, bool parens) {
  if (parens) out += '(';
  render(e, s, out);
  if (parens) out += ')';
}

void render(const Expr& e, const ExprSyntax& s, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Literal:
      if (e.value().kind() == Value::Kind::Int && e.value().as_int() < 0) {
        out += s.neg;
        out += std::to_string(e.value().as_int()).substr(1);
      } else {
        out += e.value().to_string();
      }
      return;
    case Expr::Kind::Var:
      out += e.name();
      return;
    case Expr::Kind::Tuple:
      out += '(';
      for (std::size_t i = 0; i < e.operands().size(); ++i) {
        if (i) out += ',';
        render(e.operands()[i], s, out);
      }
      out += ')';
      return;
    case Expr::Kind::Unary: {
      const Expr& operand = e.operands()[0];
      out += e.unary_op() == UnaryOp::Neg ? s.neg : s.not_;
      const bool parens = operand.kind() == Expr::Kind::Binary ||
                          (operand.kind() == Expr::Kind::Literal && operand.value().kind() == Value::Kind::Int);
      render_operand(operand, s, out, parens);
      return;
    }
    case Expr::Kind::Binary:
      break;
  }
  const int p = precedence(e.binary_op());
  const Expr& lhs = e.operands()[0];
  const Expr& rhs = e.operands()[1];
  auto needs = [&](const Expr& child, bool right) {
    if (child.kind() != Expr::Kind::Binary) return false;
    const int cp = precedence(child.binary_op());
    if (cp < p) return true;
    if (cp == p) return right || is_comparison(e.binary_op());
    return false;
  };
  render_operand(lhs, s, out, needs(lhs, false));
  out += op_text(e.binary_op(), s);
  render_operand(rhs, s, out, needs(rhs, true));
}

}  // namespace

std::string to_string(const Expr& e, const ExprSyntax& syntax) {
  std::string out;
  render(e, syntax, out);
  return out;
}

}  // namespace smd2cpn
