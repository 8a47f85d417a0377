#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "smd2cpn/error.hpp"
#include "smd2cpn/expr.hpp"

namespace smd2cpn {

struct Assignment {
  std::string variable;
  Expr value;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct BehaviourDef {
  std::string id;
  std::string label;
  std::vector<Assignment> assignments;  // applied in order

  friend bool operator==(const BehaviourDef&, const BehaviourDef&) = default;
};

enum class StateKind : std::uint8_t { Simple, Composite, Final };

struct StateNode {
  std::string name;
  std::optional<std::string> parent;  // nullopt: top-level region
  StateKind kind = StateKind::Simple;
  bool is_initial = false;
  std::optional<BehaviourDef> entry;
  std::optional<BehaviourDef> exit;
  std::optional<BehaviourDef> do_activity;
  bool has_history = false;

  friend bool operator==(const StateNode&, const StateNode&) = default;
};

struct TransitionDef {
  std::string id;
  std::string source;
  std::string target;       // a state, or a final state `X.F`
  bool to_history = false;  // `target.H`
  std::optional<std::string> trigger;
  std::optional<Expr> guard;
  std::optional<BehaviourDef> effect;

  friend bool operator==(const TransitionDef&, const TransitionDef&) = default;
};

struct VariableDecl {
  std::string name;
  std::int64_t initial = 0;

  friend bool operator==(const VariableDecl&, const VariableDecl&) = default;
};

/// A non-concurrent hierarchical state machine. Plain data: build it, then
/// run validate() before handing it to Hierarchy or the translator.
struct StateMachineModel {
  std::string name;
  std::vector<StateNode> states;
  std::vector<TransitionDef> transitions;
  std::vector<VariableDecl> variables;

  /// Trigger names, sorted.
  std::set<std::string> events() const;

  /// Structural equality, insensitive to the order of states, transitions
  /// and variables.
  friend bool operator==(const StateMachineModel& a, const StateMachineModel& b);
};

/// Name of the final state owned by `owner` (a composite, or the machine for
/// the top-level region).
std::string final_state_name(std::string_view owner);

/// Reserved words that may not be used as state or event names.
bool is_reserved_name(std::string_view name);

struct Violation {
  std::string element;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate(const StateMachineModel& model);

class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report)
      : Error("invalid state machine:\n" + report.to_string()), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct StateId {
  std::uint32_t value = 0;
  friend auto operator<=>(const StateId&, const StateId&) = default;
};

/// Region owning a set of sibling states: a composite, or the top level.
using Region = std::optional<StateId>;
inline constexpr Region kRootRegion = std::nullopt;

/// Indexed, read-only view of a validated model answering structural
/// queries. Owns a copy of the model.
class Hierarchy {
 public:
  /// Throws ValidationError if the model does not validate.
  explicit Hierarchy(StateMachineModel model);

  const StateMachineModel& model() const { return model_; }
  std::size_t size() const { return model_.states.size(); }

  std::optional<StateId> find(std::string_view name) const;
  /// Throws LookupError for unknown names.
  StateId at(std::string_view name) const;
  const StateNode& node(StateId s) const { return model_.states[s.value]; }
  const std::string& name(StateId s) const { return node(s).name; }

  Region parent(StateId s) const { return parent_[s.value]; }
  std::span<const StateId> children(Region r) const;
  std::optional<StateId> initial_child(Region r) const;
  std::optional<StateId> final_child(Region r) const;
  std::size_t depth(StateId s) const { return depth_[s.value]; }

  bool is_simple(StateId s) const { return node(s).kind == StateKind::Simple; }
  bool is_composite(StateId s) const { return node(s).kind == StateKind::Composite; }
  bool is_final(StateId s) const { return node(s).kind == StateKind::Final; }

  bool is_ancestor_or_self(StateId ancestor, StateId s) const;

  /// All states in depth-first pre-order, siblings in model order.
  const std::vector<StateId>& preorder() const { return preorder_; }

  /// Simple states below `s` (or `s` itself when simple), pre-order. Linear
  /// in the subtree size; `visited`, when given, is increased by the number
  /// of tree nodes touched.
  std::vector<StateId> substates(StateId s, std::size_t* visited = nullptr) const;

  /// States from `from` up to `boundary`, both inclusive, innermost first.
  /// Throws LookupError if `boundary` is not an ancestor-or-self of `from`.
  std::vector<StateId> path_up(StateId from, StateId boundary) const;

  /// Exit behaviours along path_up(from, boundary).
  std::vector<BehaviourDef> exit_chain(StateId from, StateId boundary) const;

  /// Entry behaviours from `boundary` down to `to`, outermost first.
  std::vector<BehaviourDef> entry_chain(StateId boundary, StateId to) const;

  /// Deepest common ancestor-or-self; kRootRegion when there is none.
  Region least_common_ancestor(StateId a, StateId b) const;

  /// Follows initial children from `r` down to a simple state.
  StateId default_configuration(Region r) const;

  /// Ancestor-or-self of `s` whose parent is `r`. Precondition: `s` lies
  /// strictly inside `r`.
  StateId child_towards(Region r, StateId s) const;

 private:
  StateMachineModel model_;
  std::unordered_map<std::string, StateId> by_name_;
  std::vector<Region> parent_;
  std::vector<std::size_t> depth_;
  std::vector<std::vector<StateId>> children_;  // per state
  std::vector<StateId> top_level_;
  std::vector<StateId> preorder_;
};

}  // namespace smd2cpn
