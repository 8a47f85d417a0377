#include "smd2cpn/cpn_model.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace smd2cpn {

const ColourDecl* ColouredNet::find_colour(std::string_view name) const {
  for (const auto& c : colours) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const PlaceDef* ColouredNet::find_place(std::string_view id) const {
  for (const auto& p : places) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const TransDef* ColouredNet::find_transition(std::string_view id) const {
  for (const auto& t : transitions) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

bool operator==(const ColouredNet& a, const ColouredNet& b) {
  const ColouredNet ca = canonical(a);
  const ColouredNet cb = canonical(b);
  return ca.name == cb.name && ca.colours == cb.colours && ca.variables == cb.variables &&
         ca.places == cb.places && ca.transitions == cb.transitions && ca.arcs == cb.arcs;
}

bool natural_less(std::string_view a, std::string_view b) {
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && digit(a[ie])) ++ie;
      while (je < b.size() && digit(b[je])) ++je;
      auto na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      while (na.size() > 1 && na[0] == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb[0] == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

ColouredNet canonical(ColouredNet net) {
  auto by_name = [](const auto& x, const auto& y) { return x.name < y.name; };
  auto by_id = [](const auto& x, const auto& y) { return natural_less(x.id, y.id); };
  std::sort(net.colours.begin(), net.colours.end(), by_name);
  std::sort(net.variables.begin(), net.variables.end(), by_name);
  std::sort(net.places.begin(), net.places.end(), by_id);
  std::sort(net.transitions.begin(), net.transitions.end(), by_id);
  std::sort(net.arcs.begin(), net.arcs.end(), by_id);
  return net;
}

bool inhabits(const ColouredNet& net, std::string_view colour, const Value& v) {
  const ColourDecl* decl = net.find_colour(colour);
  if (!decl) return false;
  const ColourSet& cs = decl->set;
  switch (cs.kind) {
    case ColourSet::Kind::Unit:
      return v.kind() == Value::Kind::Unit;
    case ColourSet::Kind::Int:
      return v.kind() == Value::Kind::Int;
    case ColourSet::Kind::Enum:
      return v.kind() == Value::Kind::Enum &&
             std::find(cs.values.begin(), cs.values.end(), v.as_symbol()) != cs.values.end();
    case ColourSet::Kind::Product:
      break;
  }
  if (v.kind() != Value::Kind::Tuple || v.items().size() != cs.components.size()) return false;
  for (std::size_t i = 0; i < cs.components.size(); ++i) {
    if (!inhabits(net, cs.components[i], v.items()[i])) return false;
  }
  return true;
}

std::vector<std::string> check_net(const ColouredNet& net) {
  std::vector<std::string> problems;
  std::set<std::string> ids;
  auto unique = [&](const std::string& id) {
    if (!ids.insert(id).second) problems.push_back("duplicate id '" + id + "'");
  };
  for (const auto& c : net.colours) {
    if (c.set.kind == ColourSet::Kind::Enum && c.set.values.empty()) {
      problems.push_back("enumeration colour set '" + c.name + "' is empty");
    }
    if (c.set.kind == ColourSet::Kind::Product) {
      if (c.set.components.empty()) problems.push_back("product colour set '" + c.name + "' is empty");
      if (!c.set.fields.empty() && c.set.fields.size() != c.set.components.size()) {
        problems.push_back("product colour set '" + c.name + "' has mismatched field labels");
      }
      for (const auto& comp : c.set.components) {
        if (!net.find_colour(comp)) problems.push_back("colour set '" + c.name + "' uses unknown '" + comp + "'");
      }
    }
  }
  for (const auto& v : net.variables) {
    if (!net.find_colour(v.colour)) problems.push_back("variable '" + v.name + "' has unknown colour set");
  }
  for (const auto& p : net.places) {
    unique(p.id);
    if (!net.find_colour(p.colour)) {
      problems.push_back("place '" + p.id + "' has unknown colour set '" + p.colour + "'");
      continue;
    }
    for (const auto& [token, n] : p.initial_marking) {
      if (!inhabits(net, p.colour, token)) {
        problems.push_back("place '" + p.id + "' initial token " + token.to_string() + " is not in " + p.colour);
      }
    }
  }
  for (const auto& t : net.transitions) unique(t.id);
  std::set<std::string_view> places, transitions;
  for (const auto& p : net.places) places.insert(p.id);
  for (const auto& t : net.transitions) transitions.insert(t.id);
  std::map<std::string, std::set<std::string>> bound;
  for (const auto& a : net.arcs) {
    unique(a.id);
    if (!places.count(a.place)) problems.push_back("arc '" + a.id + "' references unknown place '" + a.place + "'");
    if (!transitions.count(a.transition)) {
      problems.push_back("arc '" + a.id + "' references unknown transition '" + a.transition + "'");
    }
    if (a.orientation == Orientation::PtoT) a.inscription.collect_vars(bound[a.transition]);
  }
  for (const auto& a : net.arcs) {
    if (a.orientation != Orientation::TtoP) continue;
    std::set<std::string> used;
    a.inscription.collect_vars(used);
    for (const auto& v : used) {
      if (!bound[a.transition].count(v)) {
        problems.push_back("output arc '" + a.id + "' reads unbound variable '" + v + "'");
      }
    }
  }
  for (const auto& t : net.transitions) {
    if (!t.guard) continue;
    std::set<std::string> used;
    t.guard->collect_vars(used);
    for (const auto& v : used) {
      if (!bound[t.id].count(v)) problems.push_back("guard of '" + t.id + "' reads unbound variable '" + v + "'");
    }
  }
  return problems;
}

Marking initial_marking(const ColouredNet& net) {
  Marking m;
  m.reserve(net.places.size());
  for (const auto& p : net.places) m.push_back(p.initial_marking);
  return m;
}

std::size_t token_count(const Multiset& m) {
  std::size_t n = 0;
  for (const auto& [_, k] : m) n += k;
  return n;
}

std::string to_string(const ColouredNet& net, const Marking& m) {
  std::ostringstream out;
  bool first = true;
  for (std::size_t i = 0; i < m.size() && i < net.places.size(); ++i) {
    if (m[i].empty()) continue;
    if (!first) out << " ";
    first = false;
    out << net.places[i].id << "=";
    bool inner = false;
    for (const auto& [v, k] : m[i]) {
      if (inner) out << "++";
      inner = true;
      out << k << "`" << v.to_string();
    }
  }
  return out.str();
}

bool match_pattern(const Expr& pattern, const Value& token, Binding& binding) {
  switch (pattern.kind()) {
    case Expr::Kind::Literal:
      return pattern.value() == token;
    case Expr::Kind::Var: {
      auto [it, inserted] = binding.emplace(pattern.name(), token);
      return inserted || it->second == token;
    }
    case Expr::Kind::Tuple: {
      if (token.kind() != Value::Kind::Tuple || token.items().size() != pattern.operands().size()) return false;
      for (std::size_t i = 0; i < pattern.operands().size(); ++i) {
        if (!match_pattern(pattern.operands()[i], token.items()[i], binding)) return false;
      }
      return true;
    }
    case Expr::Kind::Unary:
    case Expr::Kind::Binary:
      break;
  }
  return evaluate(pattern, binding) == token;
}

TokenGame::TokenGame(const ColouredNet& net)
    : net_(net), inputs_(net.transitions.size()), outputs_(net.transitions.size()) {
  for (std::size_t i = 0; i < net.places.size(); ++i) place_index_.emplace(net.places[i].id, i);
  for (std::size_t i = 0; i < net.transitions.size(); ++i) transition_index_.emplace(net.transitions[i].id, i);
  for (const auto& a : net.arcs) {
    const ArcRef ref{place_index(a.place), &a.inscription};
    const std::size_t t = transition_index(a.transition);
    (a.orientation == Orientation::PtoT ? inputs_ : outputs_)[t].push_back(ref);
  }
}

std::size_t TokenGame::place_index(std::string_view id) const {
  auto it = place_index_.find(std::string(id));
  if (it == place_index_.end()) throw LookupError("unknown place '" + std::string(id) + "'");
  return it->second;
}

std::size_t TokenGame::transition_index(std::string_view id) const {
  auto it = transition_index_.find(std::string(id));
  if (it == transition_index_.end()) throw LookupError("unknown transition '" + std::string(id) + "'");
  return it->second;
}

void TokenGame::search(const Marking& m, std::size_t t, std::size_t arc, Binding& b,
                       std::map<std::size_t, Multiset>& taken, std::vector<Binding>& out) const {
  const auto& ins = inputs_[t];
  if (arc == ins.size()) {
    const auto& guard = net_.transitions[t].guard;
    if (!guard || evaluate(*guard, b).as_bool()) out.push_back(b);
    return;
  }
  const ArcRef& ref = ins[arc];
  for (const auto& [token, count] : m[ref.place]) {
    auto& used = taken[ref.place][token];
    if (used >= count) continue;
    Binding extended = b;
    if (!match_pattern(*ref.inscription, token, extended)) continue;
    ++used;
    search(m, t, arc + 1, extended, taken, out);
    --taken[ref.place][token];
  }
}

std::vector<Binding> TokenGame::enabled_bindings(const Marking& m, std::size_t transition) const {
  std::vector<Binding> out;
  Binding b;
  std::map<std::size_t, Multiset> taken;
  search(m, transition, 0, b, taken, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Marking TokenGame::fire(const Marking& m, std::size_t transition, const Binding& binding) const {
  const auto enabled = enabled_bindings(m, transition);
  if (!std::binary_search(enabled.begin(), enabled.end(), binding)) {
    throw Error("transition '" + net_.transitions[transition].id + "' is not enabled under the given binding");
  }
  return apply(m, transition, binding);
}

Marking TokenGame::apply(const Marking& m, std::size_t transition, const Binding& binding) const {
  Marking next = m;
  for (const ArcRef& ref : inputs_[transition]) {
    const Value token = evaluate(*ref.inscription, binding);
    auto it = next[ref.place].find(token);
    if (--it->second == 0) next[ref.place].erase(it);
  }
  for (const ArcRef& ref : outputs_[transition]) ++next[ref.place][evaluate(*ref.inscription, binding)];
  return next;
}

std::vector<std::size_t> TokenGame::adjacent_places(std::size_t transition) const {
  std::set<std::size_t> out;
  for (const ArcRef& r : inputs_[transition]) out.insert(r.place);
  for (const ArcRef& r : outputs_[transition]) out.insert(r.place);
  return {out.begin(), out.end()};
}

std::vector<Binding> enabled_bindings(const ColouredNet& net, const Marking& m, std::string_view transition) {
  TokenGame game(net);
  return game.enabled_bindings(m, game.transition_index(transition));
}

Marking fire(const ColouredNet& net, const Marking& m, std::string_view transition, const Binding& binding) {
  TokenGame game(net);
  return game.fire(m, game.transition_index(transition), binding);
}

ReachabilityGraph explore(const ColouredNet& net, const Marking& start, std::size_t bound) {
  if (bound == 0) throw Error("exploration bound must be at least 1");
  TokenGame game(net);
  std::vector<std::size_t> order(net.transitions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return natural_less(net.transitions[a].id, net.transitions[b].id);
  });

  ReachabilityGraph g;
  std::map<Marking, std::size_t> index;
  g.states.push_back(start);
  index.emplace(start, 0);
  for (std::size_t cur = 0; cur < g.states.size(); ++cur) {
    for (std::size_t t : order) {
      for (const Binding& b : game.enabled_bindings(g.states[cur], t)) {
        Marking next = game.apply(g.states[cur], t, b);
        auto it = index.find(next);
        if (it == index.end()) {
          if (g.states.size() >= bound) {
            g.truncated = true;
            continue;
          }
          it = index.emplace(next, g.states.size()).first;
          g.states.push_back(std::move(next));
        }
        g.edges.push_back({cur, it->second, net.transitions[t].id, b});
      }
    }
  }
  return g;
}

}  // namespace smd2cpn
