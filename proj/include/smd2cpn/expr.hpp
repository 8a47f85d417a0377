#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "smd2cpn/value.hpp"

namespace smd2cpn {

enum class UnaryOp : std::uint8_t { Neg, Not };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

/// Immutable expression tree shared by state machine guards/assignments and
/// net guards/arc inscriptions. Copies share structure.
class Expr {
 public:
  enum class Kind : std::uint8_t { Literal, Var, Tuple, Unary, Binary };

  static Expr literal(Value v);
  static Expr integer(std::int64_t i) { return literal(Value::integer(i)); }
  static Expr boolean(bool b) { return literal(Value::boolean(b)); }
  static Expr symbol(std::string s) { return literal(Value::symbol(std::move(s))); }
  static Expr unit() { return literal(Value::unit()); }
  static Expr var(std::string name);
  static Expr tuple(std::vector<Expr> items);
  static Expr unary(UnaryOp op, Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

  Kind kind() const { return node_->kind; }
  const Value& value() const { return node_->value; }
  const std::string& name() const { return node_->name; }
  UnaryOp unary_op() const { return node_->unary; }
  BinaryOp binary_op() const { return node_->binary; }
  const std::vector<Expr>& operands() const { return node_->operands; }

  friend bool operator==(const Expr& a, const Expr& b);

  /// Variables read anywhere in the tree.
  void collect_vars(std::set<std::string>& out) const;

  /// Replaces every variable read through `subst`; unmapped names stay.
  Expr substitute(const std::map<std::string, Expr>& subst) const;

  /// Renames variables; unmapped names stay.
  Expr rename(const std::function<std::string(const std::string&)>& fn) const;

 private:
  struct Node {
    Kind kind = Kind::Literal;
    Value value;
    std::string name;
    UnaryOp unary = UnaryOp::Neg;
    BinaryOp binary = BinaryOp::Add;
    std::vector<Expr> operands;
  };
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

using Env = std::function<std::optional<Value>(const std::string&)>;

/// Evaluates `e`; throws smd2cpn::Error on unbound variables or ill-typed
/// operands.
Value evaluate(const Expr& e, const Env& env);

Value evaluate(const Expr& e, const std::map<std::string, Value>& env);

enum class ExprType : std::uint8_t { Int, Bool };

/// Type of an integer/boolean expression over integer variables, or nullopt
/// when ill-typed. Unknown variables are reported through `unknown`.
std::optional<ExprType> infer_type(const Expr& e, const std::set<std::string>& int_vars,
                                   std::set<std::string>* unknown = nullptr);

int precedence(BinaryOp op);
bool is_comparison(BinaryOp op);

}  // namespace smd2cpn

namespace smd2cpn {

/// Surface spellings used when rendering an Expr as text.
struct ExprSyntax {
  const char* neg;
  const char* not_;
  const char* and_;
  const char* or_;
  const char* eq;
  const char* ne;
};

inline constexpr ExprSyntax kSmdlSyntax{"-", "not ", " and ", " or ", " == ", " != "};
inline constexpr ExprSyntax kCpnMlSyntax{"~", "not ", " andalso ", " orelse ", " = ", " <> "};

/// Renders `e` with the minimal parentheses needed to parse back to the same
/// tree under left-associative binary operators.
std::string to_string(const Expr& e, const ExprSyntax& syntax);

}  // namespace smd2cpn
