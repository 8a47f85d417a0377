#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "smd2cpn/cpn_model.hpp"

namespace smd2cpn {

struct Point {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Canvas position of every place and transition, keyed by node id.
using LayoutAssignment = std::map<std::string, Point>;

inline constexpr double kNodeSpacing = 80.0;
inline constexpr double kLayerSpacing = 120.0;

/// Layered placement: nodes are layered by breadth-first distance along arc
/// direction from the initially marked places (components not reached from
/// them start their own search), one column per layer.
LayoutAssignment layout(const ColouredNet& net);

/// Single-page CPN Tools 4 document. Elements are written in canonical
/// order, so equal nets give byte-identical output. Throws Error when
/// `positions` misses a node.
std::string emit_cpn_xml(const ColouredNet& net, const LayoutAssignment& positions);

/// Reads a document written by emit_cpn_xml. Throws ParseError for
/// malformed XML and Error for unsupported content.
ColouredNet parse_cpn_xml(std::string_view text);

/// Graphviz rendering; with a marking, place labels show their tokens.
std::string emit_dot(const ColouredNet& net, const std::optional<Marking>& marking = std::nullopt);

/// CPN ML text of an expression. A top-level tuple written to a place of a
/// labelled product colour is rendered as a record.
std::string to_cpn_ml(const Expr& e, const ColourSet* context = nullptr);
std::string to_cpn_ml(const Value& v, const ColourSet* context = nullptr);
std::string to_cpn_ml(const Multiset& m, const ColourSet* context = nullptr);

}  // namespace smd2cpn
