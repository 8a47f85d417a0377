#include "smd2cpn/smd_model.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

namespace smd2cpn {

namespace {

constexpr std::array kReserved = {
    // SML / CPN ML
    "abstype", "and", "andalso", "as", "case", "datatype", "do", "else", "end", "eqtype",
    "exception", "fn", "fun", "functor", "handle", "if", "in", "include", "infix", "infixr",
    "let", "local", "nonfix", "of", "op", "open", "orelse", "raise", "rec", "sharing", "sig",
    "signature", "struct", "structure", "then", "type", "val", "where", "while", "with",
    "withtype", "colset", "var", "globref", "channel", "true", "false", "nil", "ref", "not",
    "SOME", "unit", "int", "bool",
    // names used by generated nets
    "NONE", "VARS", "EVENTS", "HIST", "EVENT", "UNIT", "INT"};

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  if (!alpha(s[0])) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

template <typename T, typename Key>
std::vector<T> sorted_by(std::vector<T> v, Key key) {
  std::sort(v.begin(), v.end(), [&](const T& a, const T& b) { return key(a) < key(b); });
  return v;
}

class Validator {
 public:
  explicit Validator(const StateMachineModel& m) : m_(m) {}

  ValidationReport run() {
    check_names();
    check_tree();
    check_variables();
    check_behaviours();
    check_transitions();
    return std::move(report_);
  }

 private:
  void add(const std::string& element, std::string message) {
    report_.violations.push_back({element, std::move(message)});
  }

  void check_user_name(const std::string& what, const std::string& name) {
    if (!is_identifier(name)) {
      add(name, what + " name '" + name + "' is not an identifier");
    } else if (name.find("__") != std::string::npos) {
      add(name, what + " name '" + name + "' contains '__', which is reserved for generated names");
    } else if (is_reserved_name(name)) {
      add(name, what + " name '" + name + "' is reserved");
    }
  }

  void check_names() {
    if (!is_identifier(m_.name)) add(m_.name, "machine name is not an identifier");
    for (const auto& s : m_.states) {
      if (s.kind == StateKind::Final) {
        const std::string owner = s.parent.value_or(m_.name);
        if (s.name != final_state_name(owner)) {
          add(s.name, "final state must be named '" + final_state_name(owner) + "'");
        }
      } else {
        check_user_name("state", s.name);
        if (s.name == m_.name) add(s.name, "state '" + s.name + "' has the machine's name");
      }
      if (!by_name_.emplace(s.name, &s).second) add(s.name, "duplicate state name '" + s.name + "'");
    }
  }

  void check_tree() {
    std::map<std::string, std::vector<const StateNode*>> children;  // "" = top level
    for (const auto& s : m_.states) {
      if (s.parent) {
        auto it = by_name_.find(*s.parent);
        if (it == by_name_.end()) {
          add(s.name, "parent '" + *s.parent + "' of state '" + s.name + "' does not exist");
          continue;
        }
        if (it->second->kind == StateKind::Final) {
          add(s.name, "state '" + s.name + "' is nested in final state '" + *s.parent + "'");
        }
      }
      children[s.parent.value_or("")].push_back(&s);
    }
    // cycles: a walk up the parent links longer than the state count
    for (const auto& s : m_.states) {
      const StateNode* cur = &s;
      std::size_t steps = 0;
      while (cur->parent && steps <= m_.states.size()) {
        auto it = by_name_.find(*cur->parent);
        if (it == by_name_.end()) break;
        cur = it->second;
        ++steps;
      }
      if (steps > m_.states.size()) add(s.name, "parent links of state '" + s.name + "' form a cycle");
    }
    for (const auto& s : m_.states) {
      const bool has_children = children.count(s.name) > 0;
      switch (s.kind) {
        case StateKind::Simple:
          if (has_children) add(s.name, "simple state '" + s.name + "' has children");
          break;
        case StateKind::Composite:
          if (!has_children) add(s.name, "composite state '" + s.name + "' has no children");
          break;
        case StateKind::Final:
          if (s.entry || s.exit || s.do_activity) add(s.name, "final state '" + s.name + "' has behaviours");
          if (s.is_initial) add(s.name, "final state '" + s.name + "' is marked initial");
          break;
      }
      if (s.has_history && s.kind != StateKind::Composite) {
        add(s.name, "history on non-composite state '" + s.name + "'");
      }
      if (s.do_activity && s.kind != StateKind::Simple) {
        add(s.name, "do behaviour on non-simple state '" + s.name + "'");
      }
    }
    for (const auto& [owner, kids] : children) {
      const std::string region = owner.empty() ? m_.name : owner;
      const auto initials = std::count_if(kids.begin(), kids.end(), [](auto* k) { return k->is_initial; });
      const auto finals =
          std::count_if(kids.begin(), kids.end(), [](auto* k) { return k->kind == StateKind::Final; });
      if (initials == 0) add(region, "region '" + region + "' has no initial state");
      if (initials > 1) add(region, "region '" + region + "' has more than one initial state");
      if (finals > 1) add(region, "region '" + region + "' has more than one final state");
    }
    if (m_.states.empty()) add(m_.name, "machine has no states");
  }

  void check_variables() {
    std::set<std::string> seen;
    for (const auto& v : m_.variables) {
      check_user_name("variable", v.name);
      if (!seen.insert(v.name).second) add(v.name, "duplicate variable '" + v.name + "'");
      vars_.insert(v.name);
    }
  }

  void check_behaviour(const std::string& owner, const BehaviourDef& b) {
    if (!is_identifier(b.label)) add(owner, "behaviour label '" + b.label + "' is not an identifier");
    for (const auto& a : b.assignments) {
      if (!vars_.count(a.variable)) {
        add(owner, "behaviour '" + b.label + "' assigns undeclared variable '" + a.variable + "'");
      }
      check_expr(owner, a.value, ExprType::Int, "assignment to '" + a.variable + "'");
    }
  }

  void check_expr(const std::string& owner, const Expr& e, ExprType want, const std::string& what) {
    std::set<std::string> unknown;
    auto t = infer_type(e, vars_, &unknown);
    for (const auto& u : unknown) add(owner, what + " reads undeclared variable '" + u + "'");
    if (unknown.empty() && t != want) {
      add(owner, what + (want == ExprType::Bool ? " is not a boolean expression" : " is not an integer expression"));
    }
  }

  void check_behaviours() {
    for (const auto& s : m_.states) {
      if (s.entry) check_behaviour(s.name, *s.entry);
      if (s.exit) check_behaviour(s.name, *s.exit);
      if (s.do_activity) check_behaviour(s.name, *s.do_activity);
    }
  }

  bool has_final_child(const std::string& composite) const {
    const std::string f = final_state_name(composite);
    auto it = by_name_.find(f);
    return it != by_name_.end() && it->second->parent == composite;
  }

  void check_transitions() {
    std::set<std::string> ids;
    std::set<std::string> events;
    for (const auto& t : m_.transitions) {
      check_user_name("transition", t.id);
      if (!ids.insert(t.id).second) add(t.id, "duplicate transition id '" + t.id + "'");
      auto src = by_name_.find(t.source);
      if (src == by_name_.end()) {
        add(t.id, "transition '" + t.id + "' has unknown source '" + t.source + "'");
      } else if (src->second->kind == StateKind::Final) {
        add(t.id, "transition '" + t.id + "' leaves final state '" + t.source + "'");
      } else if (src->second->kind == StateKind::Composite && !t.trigger && !has_final_child(t.source)) {
        add(t.id, "completion transition '" + t.id + "' leaves composite '" + t.source +
                      "' which has no final state");
      }
      auto dst = by_name_.find(t.target);
      if (dst == by_name_.end()) {
        add(t.id, "transition '" + t.id + "' has unknown target '" + t.target + "'");
      } else if (t.to_history && !dst->second->has_history) {
        add(t.id, "transition '" + t.id + "' targets the history of '" + t.target + "' which has none");
      }
      if (t.trigger) {
        events.insert(*t.trigger);
        check_user_name("event", *t.trigger);
        if (by_name_.count(*t.trigger)) {
          add(t.id, "event '" + *t.trigger + "' has the same name as a state");
        }
      }
      if (t.guard) check_expr(t.id, *t.guard, ExprType::Bool, "guard");
      if (t.effect) check_behaviour(t.id, *t.effect);
    }
  }

  const StateMachineModel& m_;
  std::map<std::string, const StateNode*> by_name_;
  std::set<std::string> vars_;
  ValidationReport report_;
};

}  // namespace

std::set<std::string> StateMachineModel::events() const {
  std::set<std::string> out;
  for (const auto& t : transitions) {
    if (t.trigger) out.insert(*t.trigger);
  }
  return out;
}

bool operator==(const StateMachineModel& a, const StateMachineModel& b) {
  auto state_key = [](const StateNode& s) { return s.name; };
  auto trans_key = [](const TransitionDef& t) { return t.id; };
  auto var_key = [](const VariableDecl& v) { return v.name; };
  return a.name == b.name && sorted_by(a.states, state_key) == sorted_by(b.states, state_key) &&
         sorted_by(a.transitions, trans_key) == sorted_by(b.transitions, trans_key) &&
         sorted_by(a.variables, var_key) == sorted_by(b.variables, var_key);
}

std::string final_state_name(std::string_view owner) { return std::string(owner) + ".F"; }

bool is_reserved_name(std::string_view name) {
  return std::find(kReserved.begin(), kReserved.end(), name) != kReserved.end();
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& v : violations) out << "  [" << v.element << "] " << v.message << "\n";
  return out.str();
}

ValidationReport validate(const StateMachineModel& model) { return Validator(model).run(); }

Hierarchy::Hierarchy(StateMachineModel model) : model_(std::move(model)) {
  if (auto report = validate(model_); !report.ok()) throw ValidationError(std::move(report));
  const std::size_t n = model_.states.size();
  parent_.resize(n);
  depth_.resize(n, 0);
  children_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) by_name_.emplace(model_.states[i].name, StateId{i});
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto& s = model_.states[i];
    if (s.parent) {
      const StateId p = by_name_.at(*s.parent);
      parent_[i] = p;
      children_[p.value].push_back(StateId{i});
    } else {
      top_level_.push_back(StateId{i});
    }
  }
  // iterative pre-order; deep chains must not overflow the stack
  std::vector<std::pair<StateId, std::size_t>> stack;
  for (auto it = top_level_.rbegin(); it != top_level_.rend(); ++it) stack.emplace_back(*it, 0);
  while (!stack.empty()) {
    auto [s, d] = stack.back();
    stack.pop_back();
    depth_[s.value] = d;
    preorder_.push_back(s);
    const auto& kids = children_[s.value];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.emplace_back(*it, d + 1);
  }
}

std::optional<StateId> Hierarchy::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

StateId Hierarchy::at(std::string_view name) const {
  if (auto s = find(name)) return *s;
  throw LookupError("unknown state '" + std::string(name) + "'");
}

std::span<const StateId> Hierarchy::children(Region r) const {
  return r ? std::span<const StateId>(children_[r->value]) : std::span<const StateId>(top_level_);
}

std::optional<StateId> Hierarchy::initial_child(Region r) const {
  for (StateId c : children(r)) {
    if (node(c).is_initial) return c;
  }
  return std::nullopt;
}

std::optional<StateId> Hierarchy::final_child(Region r) const {
  for (StateId c : children(r)) {
    if (is_final(c)) return c;
  }
  return std::nullopt;
}

bool Hierarchy::is_ancestor_or_self(StateId ancestor, StateId s) const {
  if (depth(s) < depth(ancestor)) return false;
  Region cur = s;
  while (cur && depth(*cur) > depth(ancestor)) cur = parent(*cur);
  return cur == ancestor;
}

std::vector<StateId> Hierarchy::substates(StateId s, std::size_t* visited) const {
  std::vector<StateId> out;
  std::vector<StateId> stack{s};
  std::size_t touched = 0;
  while (!stack.empty()) {
    const StateId cur = stack.back();
    stack.pop_back();
    ++touched;
    if (is_simple(cur)) {
      out.push_back(cur);
      continue;
    }
    const auto& kids = children_[cur.value];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      if (!is_final(*it)) stack.push_back(*it);
    }
  }
  if (visited) *visited += touched;
  return out;
}

std::vector<StateId> Hierarchy::path_up(StateId from, StateId boundary) const {
  if (!is_ancestor_or_self(boundary, from)) {
    throw LookupError("state '" + name(boundary) + "' is not an ancestor of '" + name(from) + "'");
  }
  std::vector<StateId> out{from};
  while (out.back() != boundary) out.push_back(*parent(out.back()));
  return out;
}

std::vector<BehaviourDef> Hierarchy::exit_chain(StateId from, StateId boundary) const {
  std::vector<BehaviourDef> out;
  for (StateId s : path_up(from, boundary)) {
    if (node(s).exit) out.push_back(*node(s).exit);
  }
  return out;
}

std::vector<BehaviourDef> Hierarchy::entry_chain(StateId boundary, StateId to) const {
  auto path = path_up(to, boundary);
  std::vector<BehaviourDef> out;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    if (node(*it).entry) out.push_back(*node(*it).entry);
  }
  return out;
}

Region Hierarchy::least_common_ancestor(StateId a, StateId b) const {
  Region x = a;
  Region y = b;
  while (x && y && depth(*x) > depth(*y)) x = parent(*x);
  while (x && y && depth(*y) > depth(*x)) y = parent(*y);
  while (x && y && *x != *y) {
    x = parent(*x);
    y = parent(*y);
  }
  return x && y ? x : kRootRegion;
}

StateId Hierarchy::default_configuration(Region r) const {
  auto cur = initial_child(r);
  while (cur && !is_simple(*cur)) {
    auto next = initial_child(*cur);
    if (!next) break;
    cur = next;
  }
  if (!cur || !is_simple(*cur)) {
    throw LookupError("region '" + (r ? name(*r) : model_.name) + "' has no initial descent");
  }
  return *cur;
}

StateId Hierarchy::child_towards(Region r, StateId s) const {
  StateId cur = s;
  while (parent(cur) != r) {
    if (!parent(cur)) throw LookupError("state '" + name(s) + "' is not inside the given region");
    cur = *parent(cur);
  }
  return cur;
}

}  // namespace smd2cpn
