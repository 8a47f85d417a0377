#include "smd2cpn/translator.hpp"

#include <algorithm>

namespace smd2cpn {

namespace {

constexpr const char* kUnit = "UNIT";
constexpr const char* kInt = "INT";
constexpr const char* kVars = "VARS";
constexpr const char* kEvent = "EVENT";
constexpr const char* kHist = "HIST";

std::string var_name(const std::string& v) { return "v__" + v; }
std::string history_var(const std::string& composite) { return "h__" + composite; }

// Location name as used inside generated ids: `X.F` becomes `X__F`.
std::string id_fragment(const std::string& location) {
  std::string out = location;
  if (out.size() > 2 && out.ends_with(".F")) out.replace(out.size() - 2, 2, "__F");
  return out;
}

class NetBuilder {
 public:
  NetBuilder(const Hierarchy& h, TranslationMap& map, ColouredNet& net) : h_(h), map_(map), net_(net) {
    for (const auto& v : sorted_variables()) vars_.push_back(v.name);
  }

  std::vector<VariableDecl> sorted_variables() const {
    auto vars = h_.model().variables;
    std::sort(vars.begin(), vars.end(), [](auto& a, auto& b) { return a.name < b.name; });
    return vars;
  }

  PlaceDef& place(std::string id, std::string name, std::string colour) {
    net_.places.push_back({std::move(id), std::move(name), std::move(colour), {}});
    return net_.places.back();
  }

  TransDef& transition(std::string id, std::string name) {
    net_.transitions.push_back({std::move(id), std::move(name), std::nullopt, std::nullopt});
    return net_.transitions.back();
  }

  void arc(const std::string& place, const std::string& trans, Orientation o, Expr inscription) {
    net_.arcs.push_back({"A_" + std::to_string(net_.arcs.size() + 1), place, trans, o, std::move(inscription)});
  }
  void input(const std::string& place, const std::string& trans, Expr e = Expr::unit()) {
    arc(place, trans, Orientation::PtoT, std::move(e));
  }
  void output(const std::string& place, const std::string& trans, Expr e = Expr::unit()) {
    arc(place, trans, Orientation::TtoP, std::move(e));
  }

  Expr vars_pattern() const {
    std::vector<Expr> items;
    for (const auto& v : vars_) items.push_back(Expr::var(var_name(v)));
    return Expr::tuple(std::move(items));
  }

  Expr rename_to_net(const Expr& e) const { return e.rename(var_name); }

  /// VARS read/write pair applying `assignments` in order.
  void vars_update(const std::string& trans, const std::vector<Assignment>& assignments) {
    std::map<std::string, Expr> current;
    for (const auto& v : vars_) current.emplace(v, Expr::var(var_name(v)));
    for (const auto& a : assignments) {
      std::map<std::string, Expr> subst;
      for (const auto& [v, e] : current) subst.emplace(var_name(v), e);
      current.at(a.variable) = rename_to_net(a.value).substitute(subst);
    }
    std::vector<Expr> items;
    for (const auto& v : vars_) items.push_back(current.at(v));
    input(*map_.vars_place, trans, vars_pattern());
    output(*map_.vars_place, trans, Expr::tuple(std::move(items)));
  }

  /// Transition executing one behaviour: consumes `from`, produces `to`.
  TransDef& behaviour_transition(const std::string& id, const BehaviourDef& b, const std::string& from,
                                 const std::string& to) {
    TransDef& t = transition(id, b.label);
    t.observable_label = b.label;
    input(from, id);
    output(to, id);
    if (!b.assignments.empty()) vars_update(id, b.assignments);
    return t;
  }

  struct Step {
    BehaviourDef behaviour;
    BehaviourOccurrence occurrence;
  };

  /// In-flight places `P_<prefix>__k` and behaviour transitions
  /// `T_<prefix>__beh_k` running `steps` in order and ending on `end`.
  /// Returns the place the chain starts from (`end` when empty).
  std::string chain(const std::string& prefix, const std::vector<Step>& steps, const std::string& end,
                    std::vector<std::string>& nodes) {
    if (steps.empty()) return end;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const std::string pid = "P_" + prefix + "__" + std::to_string(k);
      place(pid, prefix + "." + std::to_string(k), kUnit);
      map_.in_flight_places.insert(pid);
      nodes.push_back(pid);
    }
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const std::string tid = "T_" + prefix + "__beh_" + std::to_string(k);
      const std::string from = "P_" + prefix + "__" + std::to_string(k);
      const std::string to = k + 1 < steps.size() ? "P_" + prefix + "__" + std::to_string(k + 1) : end;
      behaviour_transition(tid, steps[k].behaviour, from, to);
      map_.behaviour_trans.emplace(steps[k].occurrence, tid);
      nodes.push_back(tid);
    }
    return "P_" + prefix + "__0";
  }

  std::string control_place(StateId s) const {
    if (h_.is_final(s)) {
      const auto& owner = h_.parent(s) ? h_.name(*h_.parent(s)) : h_.model().name;
      return map_.final_place.at(owner);
    }
    return map_.state_place.at(h_.name(s));
  }

  /// Entry steps for states from `boundary` down to `to`.
  std::vector<Step> entry_steps(StateId boundary, StateId to, const std::string& transition,
                                const std::string& branch) const {
    std::vector<Step> out;
    auto path = h_.path_up(to, boundary);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const auto& node = h_.node(*it);
      if (!node.entry) continue;
      out.push_back({*node.entry, {transition, "", branch, BehaviourRole::Entry, node.name, out.size()}});
    }
    return out;
  }

  const Hierarchy& h_;
  TranslationMap& map_;
  ColouredNet& net_;
  std::vector<std::string> vars_;
};

std::vector<TransitionDef> sorted_transitions(const StateMachineModel& m) {
  auto ts = m.transitions;
  std::sort(ts.begin(), ts.end(), [](auto& a, auto& b) { return a.id < b.id; });
  return ts;
}

}  // namespace

std::set<std::string> TranslationMap::control_places() const {
  std::set<std::string> out = in_flight_places;
  for (const auto& [_, p] : state_place) out.insert(p);
  for (const auto& [_, p] : final_place) out.insert(p);
  return out;
}

std::optional<std::string> TranslationMap::location_of(const std::string& place) const {
  for (const auto& [s, p] : state_place) {
    if (p == place) return s;
  }
  for (const auto& [owner, p] : final_place) {
    if (p == place) return final_state_name(owner);
  }
  return std::nullopt;
}

ColouredNet translate_states(const Hierarchy& h, const TranslationConfig& config, TranslationMap& map) {
  if (config.event_pool_capacity < 1) throw Error("event pool capacity must be at least 1");
  ColouredNet net;
  net.name = h.model().name;
  NetBuilder b(h, map, net);

  net.colours.push_back({kUnit, ColourSet::unit()});
  const auto vars = b.sorted_variables();
  if (!vars.empty()) {
    net.colours.push_back({kInt, ColourSet::integer()});
    std::vector<std::string> comps, fields;
    for (const auto& v : vars) {
      comps.push_back(kInt);
      fields.push_back(v.name);
      net.variables.push_back({var_name(v.name), kInt});
    }
    net.colours.push_back({kVars, ColourSet::product(std::move(comps), std::move(fields))});
  }
  const auto events = h.model().events();
  if (!events.empty()) {
    net.colours.push_back({kEvent, ColourSet::enumeration({events.begin(), events.end()})});
  }
  std::vector<std::string> hist_values;
  for (StateId s : h.preorder()) {
    if (!h.node(s).has_history) continue;
    for (StateId c : h.children(s)) {
      if (!h.is_final(c)) hist_values.push_back(h.name(c));
    }
    net.variables.push_back({history_var(h.name(s)), kHist});
  }
  if (!hist_values.empty()) {
    std::sort(hist_values.begin(), hist_values.end());
    hist_values.push_back(kNoHistory);
    net.colours.push_back({kHist, ColourSet::enumeration(std::move(hist_values))});
  }

  // (a) activity places, (b) ^F places, (c) ^H places
  for (StateId s : h.preorder()) {
    const auto& node = h.node(s);
    if (h.is_simple(s)) {
      const std::string id = "P_" + node.name;
      b.place(id, node.name, kUnit);
      map.state_place.emplace(node.name, id);
    } else if (h.is_final(s)) {
      const std::string owner = node.parent.value_or(h.model().name);
      const std::string id = "P_" + owner + "__F";
      b.place(id, owner + "^F", kUnit);
      map.final_place.emplace(owner, id);
    }
    if (node.has_history) {
      const std::string id = "P_" + node.name + "__H";
      b.place(id, node.name + "^H", kHist).initial_marking[Value::symbol(kNoHistory)] = 1;
      map.history_place.emplace(node.name, id);
    }
  }

  // (d) variables
  if (!vars.empty()) {
    std::vector<Value> init;
    for (const auto& v : vars) init.push_back(Value::integer(v.initial));
    b.place("P_VARS", "VARS", kVars).initial_marking[Value::tuple(std::move(init))] = 1;
    map.vars_place = "P_VARS";
  }

  // (e) event pool and environment
  if (!events.empty()) {
    b.place("P_EVENTS", "EVENTS", kEvent);
    map.events_place = "P_EVENTS";
    if (config.include_environment) {
      map.event_capacity = config.event_pool_capacity;
      for (const auto& e : events) {
        const std::string cap = "P_EVENTS__cap_" + e;
        const std::string prod = "T_EVENTS__produce_" + e;
        b.place(cap, e + ".pool", kUnit).initial_marking[Value::unit()] = config.event_pool_capacity;
        b.transition(prod, "env." + e);
        b.input(cap, prod);
        b.output("P_EVENTS", prod, Expr::symbol(e));
        map.event_producer.emplace(e, prod);
        map.event_capacity_place.emplace(e, cap);
      }
    }
  }

  // (f) do behaviours as self-loops
  for (StateId s : h.preorder()) {
    const auto& node = h.node(s);
    if (!node.do_activity) continue;
    const std::string id = "T_" + node.name + "__do";
    const std::string& p = map.state_place.at(node.name);
    b.behaviour_transition(id, *node.do_activity, p, p);
    map.do_transition.emplace(node.name, id);
    map.behaviour_trans.emplace(BehaviourOccurrence{"", "", "", BehaviourRole::Do, node.name, 0}, id);
  }

  const StateId start = h.default_configuration(kRootRegion);
  for (auto& p : net.places) {
    if (p.id == map.state_place.at(h.name(start))) p.initial_marking[Value::unit()] = 1;
  }
  return net;
}

void translate_transitions(const Hierarchy& h, TranslationMap& map, ColouredNet& net) {
  NetBuilder b(h, map, net);
  const std::string& machine = h.model().name;
  for (const auto& t : sorted_transitions(h.model())) {
    auto& nodes = map.transition_subnet[t.id];
    const StateId src = h.at(t.source);
    const StateId dst = h.at(t.target);
    const bool completion = h.is_composite(src) && !t.trigger;

    Region scope = h.least_common_ancestor(src, dst);
    if (scope == src || scope == dst) scope = h.parent(*scope);
    const StateId exit_boundary = h.child_towards(scope, src);
    const StateId entry_boundary = h.child_towards(scope, dst);

    // shared part: effect, then entry chain
    std::vector<NetBuilder::Step> shared;
    if (t.effect) shared.push_back({*t.effect, {t.id, "", "", BehaviourRole::Effect, t.id, 0}});
    std::string end;
    StateId entry_to = dst;
    if (t.to_history) {
      end = "P_" + t.id + "__";  // index appended below
    } else if (h.is_final(dst)) {
      end = map.final_place.at(h.parent(dst) ? h.name(*h.parent(dst)) : machine);
    } else {
      entry_to = h.is_composite(dst) ? h.default_configuration(dst) : dst;
      end = map.state_place.at(h.name(entry_to));
    }
    for (auto& step : b.entry_steps(entry_boundary, entry_to, t.id, "")) {
      step.occurrence.index = shared.size();
      shared.push_back(std::move(step));
    }
    if (t.to_history) {
      end += std::to_string(shared.size());
      b.place(end, t.id + "." + std::to_string(shared.size()), kUnit);
      map.in_flight_places.insert(end);
      map.history_entry.emplace(t.id, end);
      nodes.push_back(end);
    }
    const std::string shared_start = b.chain(t.id, shared, end, nodes);

    std::vector<StateId> locations;
    if (completion) {
      locations.push_back(*h.final_child(src));
    } else {
      locations = h.substates(src);
    }
    for (StateId x : locations) {
      const std::string loc = id_fragment(h.name(x));
      const std::string dispatch = "T_" + t.id + "__from_" + loc;
      const auto exited = h.path_up(x, exit_boundary);

      std::vector<NetBuilder::Step> exits;
      for (StateId s : exited) {
        const auto& node = h.node(s);
        if (!node.exit) continue;
        exits.push_back({*node.exit, {t.id, h.name(x), "", BehaviourRole::Exit, node.name, exits.size()}});
      }
      const std::string first = b.chain(t.id + "__from_" + loc, exits, shared_start, nodes);

      TransDef& d = b.transition(dispatch, t.id + "[" + h.name(x) + "]");
      if (t.guard) d.guard = b.rename_to_net(*t.guard);
      nodes.push_back(dispatch);
      map.dispatch_location.emplace(dispatch, h.name(x));
      b.input(b.control_place(x), dispatch);
      if (t.trigger) {
        b.input(*map.events_place, dispatch, Expr::symbol(*t.trigger));
        if (auto cap = map.event_capacity_place.find(*t.trigger); cap != map.event_capacity_place.end()) {
          b.output(cap->second, dispatch);
        }
      }
      if (t.guard) {
        b.input(*map.vars_place, dispatch, b.vars_pattern());
        b.output(*map.vars_place, dispatch, b.vars_pattern());
      }
      // record shallow history of every history composite being left
      for (std::size_t i = 1; i < exited.size(); ++i) {
        const auto& node = h.node(exited[i]);
        if (!node.has_history) continue;
        const StateId child = exited[i - 1];
        const std::string recorded = h.is_final(child) ? kNoHistory : h.name(child);
        const std::string& hp = map.history_place.at(node.name);
        b.input(hp, dispatch, Expr::var(history_var(node.name)));
        b.output(hp, dispatch, Expr::symbol(recorded));
      }
      b.output(first, dispatch);
    }
  }
}

void translate_history(const Hierarchy& h, TranslationMap& map, ColouredNet& net) {
  NetBuilder b(h, map, net);
  for (const auto& t : sorted_transitions(h.model())) {
    if (!t.to_history) continue;
    auto& nodes = map.transition_subnet[t.id];
    const StateId c = h.at(t.target);
    const std::string& restore_place = map.history_entry.at(t.id);
    const std::string& hp = map.history_place.at(t.target);
    const Expr h_var = Expr::var(history_var(t.target));

    auto branch = [&](const std::string& key, StateId first, StateId leaf) {
      const std::string prefix = t.id + "__restore_" + key;
      const std::string tid = "T_" + prefix;
      auto steps = b.entry_steps(first, leaf, t.id, key);
      const std::string start = b.chain(prefix, steps, map.state_place.at(h.name(leaf)), nodes);
      TransDef& r = b.transition(tid, t.id + ".H=" + key);
      r.guard = Expr::binary(BinaryOp::Eq, h_var, Expr::symbol(key));
      nodes.push_back(tid);
      b.input(restore_place, tid);
      b.input(hp, tid, h_var);
      b.output(hp, tid, h_var);
      b.output(start, tid);
    };
    for (StateId k : h.children(c)) {
      if (h.is_final(k)) continue;
      branch(h.name(k), k, h.is_composite(k) ? h.default_configuration(k) : k);
    }
    branch(kNoHistory, *h.initial_child(c), h.default_configuration(c));
  }
}

std::pair<ColouredNet, TranslationMap> translate(const StateMachineModel& model, const TranslationConfig& config) {
  StateMachineModel sorted = model;
  std::sort(sorted.states.begin(), sorted.states.end(), [](auto& a, auto& b) { return a.name < b.name; });
  std::sort(sorted.transitions.begin(), sorted.transitions.end(), [](auto& a, auto& b) { return a.id < b.id; });
  std::sort(sorted.variables.begin(), sorted.variables.end(), [](auto& a, auto& b) { return a.name < b.name; });
  const Hierarchy h(std::move(sorted));
  TranslationMap map;
  ColouredNet net = translate_states(h, config, map);
  translate_transitions(h, map, net);
  translate_history(h, map, net);
  return {std::move(net), std::move(map)};
}

std::vector<std::string> safety_violations(const ColouredNet& net, const TranslationMap& map, const Marking& m) {
  std::vector<std::string> out;
  const auto control = map.control_places();
  std::size_t tokens = 0;
  std::set<std::string> history;
  for (const auto& [_, p] : map.history_place) history.insert(p);
  for (std::size_t i = 0; i < net.places.size(); ++i) {
    const std::string& id = net.places[i].id;
    const std::size_t n = token_count(m[i]);
    if (control.count(id)) tokens += n;
    if ((map.vars_place == id || history.count(id)) && n != 1) {
      out.push_back(id + " holds " + std::to_string(n) + " tokens");
    }
  }
  if (tokens != 1) out.push_back("control places hold " + std::to_string(tokens) + " tokens");
  return out;
}

}  // namespace smd2cpn
