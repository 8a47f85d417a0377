#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "smd2cpn/error.hpp"
#include "smd2cpn/expr.hpp"
#include "smd2cpn/value.hpp"

namespace smd2cpn {

struct ColourSet {
  enum class Kind : std::uint8_t { Unit, Enum, Int, Product };

  Kind kind = Kind::Unit;
  std::vector<std::string> values;      // Enum constants
  std::vector<std::string> components;  // Product: component colour-set names
  std::vector<std::string> fields;      // Product: optional labels, written as a CPN ML record

  static ColourSet unit() { return {}; }
  static ColourSet integer() { return {Kind::Int, {}, {}, {}}; }
  static ColourSet enumeration(std::vector<std::string> values) { return {Kind::Enum, std::move(values), {}, {}}; }
  static ColourSet product(std::vector<std::string> components, std::vector<std::string> fields = {}) {
    return {Kind::Product, {}, std::move(components), std::move(fields)};
  }

  friend bool operator==(const ColourSet&, const ColourSet&) = default;
};

struct ColourDecl {
  std::string name;
  ColourSet set;
  friend bool operator==(const ColourDecl&, const ColourDecl&) = default;
};

/// A typed CPN variable usable in arc inscriptions and guards.
struct VariableDef {
  std::string name;
  std::string colour;
  friend bool operator==(const VariableDef&, const VariableDef&) = default;
};

using Multiset = std::map<Value, std::uint32_t>;

struct PlaceDef {
  std::string id;
  std::string name;
  std::string colour;
  Multiset initial_marking;
  friend bool operator==(const PlaceDef&, const PlaceDef&) = default;
};

struct TransDef {
  std::string id;
  std::string name;
  std::optional<Expr> guard;
  std::optional<std::string> observable_label;
  friend bool operator==(const TransDef&, const TransDef&) = default;
};

enum class Orientation : std::uint8_t { PtoT, TtoP };

struct ArcDef {
  std::string id;
  std::string place;
  std::string transition;
  Orientation orientation = Orientation::PtoT;
  /// Input arcs: a pattern (literal, variable, tuple of these). Output arcs:
  /// any expression over variables bound by the input arcs.
  Expr inscription = Expr::unit();
  friend bool operator==(const ArcDef&, const ArcDef&) = default;
};

struct ColouredNet {
  std::string name;
  std::vector<ColourDecl> colours;
  std::vector<VariableDef> variables;
  std::vector<PlaceDef> places;
  std::vector<TransDef> transitions;
  std::vector<ArcDef> arcs;

  const ColourDecl* find_colour(std::string_view name) const;
  const PlaceDef* find_place(std::string_view id) const;
  const TransDef* find_transition(std::string_view id) const;

  /// Order-insensitive structural equality (compares canonical() forms).
  friend bool operator==(const ColouredNet& a, const ColouredNet& b);
};

/// Numeric-aware ordering of ids so that `A_2` sorts before `A_10`.
bool natural_less(std::string_view a, std::string_view b);

/// Copy with every element list sorted by id (colours/variables by name).
ColouredNet canonical(ColouredNet net);

bool inhabits(const ColouredNet& net, std::string_view colour, const Value& v);

/// Well-formedness problems: duplicate ids, dangling arc endpoints, unknown
/// colours, initial tokens outside their colour, guard variables not bound
/// by an input arc. Empty when the net is well formed.
std::vector<std::string> check_net(const ColouredNet& net);

/// Token distribution, one multiset per place in `net.places` order.
using Marking = std::vector<Multiset>;
using Binding = std::map<std::string, Value>;

Marking initial_marking(const ColouredNet& net);
std::size_t token_count(const Multiset& m);
std::string to_string(const ColouredNet& net, const Marking& m);

/// Token game over a fixed net. Keeps a reference to `net`.
class TokenGame {
 public:
  explicit TokenGame(const ColouredNet& net);

  const ColouredNet& net() const { return net_; }
  std::size_t place_index(std::string_view id) const;
  std::size_t transition_index(std::string_view id) const;

  /// Bindings of the transition's input variables for which every input
  /// token is present and the guard holds. Sorted, without duplicates.
  std::vector<Binding> enabled_bindings(const Marking& m, std::size_t transition) const;

  /// Throws Error when `binding` does not enable the transition.
  Marking fire(const Marking& m, std::size_t transition, const Binding& binding) const;

  /// fire() without the enabledness check; `binding` must come from
  /// enabled_bindings().
  Marking apply(const Marking& m, std::size_t transition, const Binding& binding) const;

  /// Places adjacent to the transition (inputs and outputs).
  std::vector<std::size_t> adjacent_places(std::size_t transition) const;

 private:
  struct ArcRef {
    std::size_t place;
    const Expr* inscription;
  };

  void search(const Marking& m, std::size_t t, std::size_t arc, Binding& b,
              std::map<std::size_t, Multiset>& taken, std::vector<Binding>& out) const;

  const ColouredNet& net_;
  std::unordered_map<std::string, std::size_t> place_index_;
  std::unordered_map<std::string, std::size_t> transition_index_;
  std::vector<std::vector<ArcRef>> inputs_;
  std::vector<std::vector<ArcRef>> outputs_;
};

std::vector<Binding> enabled_bindings(const ColouredNet& net, const Marking& m, std::string_view transition);
Marking fire(const ColouredNet& net, const Marking& m, std::string_view transition, const Binding& binding);

/// Matches an input-arc pattern against a token, extending `binding`.
bool match_pattern(const Expr& pattern, const Value& token, Binding& binding);

struct ReachabilityGraph {
  struct Edge {
    std::size_t from;
    std::size_t to;
    std::string transition;
    Binding binding;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  std::vector<Marking> states;  // BFS order; states[0] is the start marking
  std::vector<Edge> edges;
  bool truncated = false;
};

/// Breadth-first reachability from `start`, expanding transitions in id
/// order and bindings in sorted order, keeping at most `bound` states.
ReachabilityGraph explore(const ColouredNet& net, const Marking& start, std::size_t bound);

}  // namespace smd2cpn
