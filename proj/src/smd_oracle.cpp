#include "smd2cpn/smd_oracle.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

namespace smd2cpn {

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

std::string TraceStep::to_string() const {
  std::string out = event.value_or("-");
  if (!behaviours.empty()) out += " / " + join(behaviours, ", ");
  return out + " -> " + state;
}

// ---------------------------------------------------------------- interpreter

Interpreter::Interpreter(StateMachineModel model) : h_(std::move(model)) {
  for (const auto& t : h_.model().transitions) by_id_.emplace(t.id, &t);
}

Configuration Interpreter::initial_configuration() const {
  Configuration c;
  c.active = h_.name(h_.default_configuration(kRootRegion));
  for (const auto& v : h_.model().variables) c.valuation[v.name] = v.initial;
  for (const auto& s : h_.model().states) {
    if (s.has_history) c.history[s.name] = kNoHistory;
  }
  return c;
}

bool Interpreter::is_enabled(const Configuration& c, const TransitionDef& t) const {
  const StateId src = h_.at(t.source);
  const StateId loc = h_.at(c.active);
  if (h_.is_composite(src) && !t.trigger) {
    if (h_.final_child(src) != loc) return false;
  } else {
    if (h_.is_final(loc)) return false;
    bool inside = false;
    for (Region r = loc; r; r = h_.parent(*r)) inside = inside || *r == src;
    if (!inside) return false;
  }
  if (t.trigger) {
    auto it = c.pending.find(*t.trigger);
    if (it == c.pending.end() || it->second == 0) return false;
  }
  if (t.guard) {
    std::map<std::string, Value> env;
    for (const auto& [v, n] : c.valuation) env.emplace(v, Value::integer(n));
    if (!evaluate(*t.guard, env).as_bool()) return false;
  }
  return true;
}

std::vector<Choice> Interpreter::enabled_transitions(const Configuration& c) const {
  std::vector<Choice> out;
  for (const auto& [id, t] : by_id_) {
    if (is_enabled(c, *t)) out.push_back({id, t->trigger});
  }
  return out;
}

void Interpreter::run(Configuration& c, const BehaviourDef& b, TraceStep& out) const {
  for (const auto& a : b.assignments) {
    std::map<std::string, Value> env;
    for (const auto& [v, n] : c.valuation) env.emplace(v, Value::integer(n));
    c.valuation.at(a.variable) = evaluate(a.value, env).as_int();
  }
  out.behaviours.push_back(b.label);
}

std::pair<Configuration, TraceStep> Interpreter::step(const Configuration& c, const Choice& choice) const {
  auto it = by_id_.find(choice.transition);
  if (it == by_id_.end()) throw LookupError("unknown transition '" + choice.transition + "'");
  const TransitionDef& t = *it->second;
  if (choice.event != t.trigger || !is_enabled(c, t)) {
    throw Error("transition '" + t.id + "' is not enabled in state '" + c.active + "'");
  }
  Configuration next = c;
  TraceStep out;
  if (t.trigger) {
    out.event = t.trigger;
    if (--next.pending.at(*t.trigger) == 0) next.pending.erase(*t.trigger);
  }

  // root-first ancestor paths of source and target
  auto root_path = [&](StateId s) {
    std::vector<StateId> p;
    for (Region r = s; r; r = h_.parent(*r)) p.push_back(*r);
    std::reverse(p.begin(), p.end());
    return p;
  };
  const StateId src = h_.at(t.source);
  const StateId dst = h_.at(t.target);
  const auto sp = root_path(src);
  const auto dp = root_path(dst);
  std::size_t common = 0;
  while (common < sp.size() && common < dp.size() && sp[common] == dp[common]) ++common;
  // external semantics: a transition never stays inside its own source or target
  if (common == sp.size() || common == dp.size()) --common;
  const StateId exit_boundary = sp[common];

  // exit from the active state outwards
  const StateId loc = h_.at(c.active);
  std::vector<StateId> exited;
  for (Region r = loc;; r = h_.parent(*r)) {
    exited.push_back(*r);
    if (*r == exit_boundary) break;
  }
  for (std::size_t i = 1; i < exited.size(); ++i) {
    const auto& node = h_.node(exited[i]);
    if (node.has_history) {
      next.history[node.name] = h_.is_final(exited[i - 1]) ? kNoHistory : h_.name(exited[i - 1]);
    }
  }
  for (StateId s : exited) {
    if (h_.node(s).exit) run(next, *h_.node(s).exit, out);
  }
  if (t.effect) run(next, *t.effect, out);

  for (std::size_t i = common; i < dp.size(); ++i) {
    if (h_.node(dp[i]).entry) run(next, *h_.node(dp[i]).entry, out);
  }
  auto descend = [&](StateId s) {
    if (h_.node(s).entry) run(next, *h_.node(s).entry, out);
    while (h_.is_composite(s)) {
      s = *h_.initial_child(s);
      if (h_.node(s).entry) run(next, *h_.node(s).entry, out);
    }
    return s;
  };
  StateId final_state = dst;
  if (t.to_history) {
    const std::string& remembered = next.history.at(h_.name(dst));
    final_state = descend(remembered == kNoHistory ? *h_.initial_child(dst) : h_.at(remembered));
  } else if (h_.is_composite(dst)) {
    final_state = descend(*h_.initial_child(dst));
  }
  next.active = h_.name(final_state);
  out.state = next.active;
  return {std::move(next), std::move(out)};
}

std::optional<std::pair<Configuration, TraceStep>> Interpreter::do_step(const Configuration& c) const {
  const auto& node = h_.node(h_.at(c.active));
  if (!node.do_activity) return std::nullopt;
  Configuration next = c;
  TraceStep out;
  run(next, *node.do_activity, out);
  out.state = next.active;
  return std::pair{std::move(next), std::move(out)};
}

Configuration Interpreter::inject(const Configuration& c, const std::string& event) const {
  if (!h_.model().events().count(event)) throw LookupError("unknown event '" + event + "'");
  Configuration next = c;
  ++next.pending[event];
  return next;
}

Configuration initial_configuration(const StateMachineModel& model) {
  return Interpreter(model).initial_configuration();
}

std::vector<Choice> enabled_transitions(const StateMachineModel& model, const Configuration& c) {
  return Interpreter(model).enabled_transitions(c);
}

std::pair<Configuration, TraceStep> step(const StateMachineModel& model, const Configuration& c, const Choice& choice) {
  return Interpreter(model).step(c, choice);
}

// ---------------------------------------------------------------- equivalence

std::string ObservableStep::to_string() const {
  if (kind == Kind::Inject) return "inject " + event;
  std::string out = event.empty() ? "-" : event;
  if (!behaviours.empty()) out += " / " + join(behaviours, ", ");
  return out + " -> " + (state.empty() ? "<nothing>" : state);
}

std::string EquivalenceVerdict::to_string() const {
  if (equivalent) return "equivalent (" + std::to_string(pairs_explored) + " state pairs)";
  std::ostringstream out;
  out << "inequivalent after " << trace.size() << " step(s)\n";
  for (const auto& s : trace) out << "  " << s.to_string() << '\n';
  if (unmatched) {
    out << (unmatched_by_net ? "  the state machine can do: " : "  the net can do: ") << unmatched->to_string() << '\n';
    out << (unmatched_by_net ? "  the net cannot match it\n" : "  the state machine cannot match it\n");
  }
  return out.str();
}

namespace {

constexpr const char* kStuck = "<stuck>";

struct NetSide {
  NetSide(const ColouredNet& net, const TranslationMap& map, std::size_t chain_bound)
      : game(net), chain_bound(chain_bound) {
    for (std::size_t i = 0; i < net.places.size(); ++i) {
      const std::string& id = net.places[i].id;
      if (map.in_flight_places.count(id)) in_flight.push_back(i);
      if (auto loc = map.location_of(id)) locations.emplace_back(i, *loc);
    }
    std::set<std::string> producers, dos;
    for (const auto& [e, t] : map.event_producer) {
      producers.insert(t);
      producer_of.emplace_back(e, game.transition_index(t));
    }
    for (const auto& [_, t] : map.do_transition) dos.insert(t);
    for (std::size_t t = 0; t < net.transitions.size(); ++t) {
      const auto& def = net.transitions[t];
      if (!producers.count(def.id)) internal.push_back(t);
      hidden.push_back(dos.count(def.id) > 0);
    }
    if (map.events_place) events = game.place_index(*map.events_place);
  }

  bool stable(const Marking& m) const {
    return std::all_of(in_flight.begin(), in_flight.end(), [&](std::size_t p) { return m[p].empty(); });
  }

  std::string state_of(const Marking& m) const {
    std::vector<std::string> out;
    for (const auto& [p, loc] : locations) {
      for (std::uint32_t k = 0; k < token_count(m[p]); ++k) out.push_back(loc);
    }
    return join(out, "+");
  }

  std::string consumed(const Marking& before, const Marking& after) const {
    if (!events) return "";
    std::vector<std::string> out;
    for (const auto& [v, n] : before[*events]) {
      auto it = after[*events].find(v);
      const std::uint32_t left = it == after[*events].end() ? 0 : it->second;
      for (std::uint32_t k = left; k < n; ++k) out.push_back(v.to_string());
    }
    return join(out, ",");
  }

  using Move = std::pair<ObservableStep, Marking>;

  std::vector<Move> moves(const Marking& m) const {
    std::set<Move> out;
    for (const auto& [e, t] : producer_of) {
      for (const auto& b : game.enabled_bindings(m, t)) {
        out.insert({ObservableStep{ObservableStep::Kind::Inject, e, {}, ""}, game.apply(m, t, b)});
      }
    }
    for (std::size_t t : internal) {
      for (const auto& b : game.enabled_bindings(m, t)) {
        std::vector<std::string> labels;
        if (!hidden[t] && game.net().transitions[t].observable_label) {
          labels.push_back(*game.net().transitions[t].observable_label);
        }
        complete(m, game.apply(m, t, b), labels, 1, out);
      }
    }
    return {out.begin(), out.end()};
  }

  void complete(const Marking& start, const Marking& m, std::vector<std::string>& labels, std::size_t length,
                std::set<Move>& out) const {
    if (stable(m)) {
      out.insert({ObservableStep{ObservableStep::Kind::Step, consumed(start, m), labels, state_of(m)}, m});
      return;
    }
    if (length > chain_bound) {
      throw Error("net did not reach a stable marking within " + std::to_string(chain_bound) + " firings");
    }
    bool any = false;
    for (std::size_t t : internal) {
      for (const auto& b : game.enabled_bindings(m, t)) {
        any = true;
        const auto& label = game.net().transitions[t].observable_label;
        const bool shown = !hidden[t] && label;
        if (shown) labels.push_back(*label);
        complete(start, game.apply(m, t, b), labels, length + 1, out);
        if (shown) labels.pop_back();
      }
    }
    if (!any) out.insert({ObservableStep{ObservableStep::Kind::Step, consumed(start, m), labels, kStuck}, m});
  }

  TokenGame game;
  std::size_t chain_bound;
  std::vector<std::size_t> in_flight;
  std::vector<std::pair<std::size_t, std::string>> locations;
  std::vector<std::pair<std::string, std::size_t>> producer_of;
  std::vector<std::size_t> internal;
  std::vector<bool> hidden;
  std::optional<std::size_t> events;
};

class Checker {
 public:
  Checker(const StateMachineModel& model, const ColouredNet& net, const TranslationMap& map,
          const EquivalenceOptions& options)
      : smd_(model), net_(net, map, options.chain_bound), capacity_(map.event_capacity) {
    if (options.shuffle_seed) rng_.emplace(*options.shuffle_seed);
  }

  using SmdMove = std::pair<ObservableStep, Configuration>;
  using NetMove = NetSide::Move;

  const std::vector<SmdMove>& smd_moves(const Configuration& c) {
    auto it = smd_cache_.find(c);
    if (it != smd_cache_.end()) return it->second;
    std::set<SmdMove> out;
    for (const auto& e : smd_.hierarchy().model().events()) {
      auto p = c.pending.find(e);
      if ((p == c.pending.end() ? 0u : p->second) < capacity_) {
        out.insert({ObservableStep{ObservableStep::Kind::Inject, e, {}, ""}, smd_.inject(c, e)});
      }
    }
    for (const auto& choice : smd_.enabled_transitions(c)) {
      auto [next, s] = smd_.step(c, choice);
      out.insert({observable(s), std::move(next)});
    }
    if (auto d = smd_.do_step(c)) out.insert({observable(d->second, true), std::move(d->first)});
    std::vector<SmdMove> v(out.begin(), out.end());
    shuffle(v);
    return smd_cache_.emplace(c, std::move(v)).first->second;
  }

  const std::vector<NetMove>& net_moves(const Marking& m) {
    auto it = net_cache_.find(m);
    if (it != net_cache_.end()) return it->second;
    auto v = net_.moves(m);
    shuffle(v);
    return net_cache_.emplace(m, std::move(v)).first->second;
  }

  bool bisimilar(const Configuration& c, const Marking& m, std::size_t depth) {
    if (depth == 0) return true;
    const auto key = std::make_tuple(c, m, depth);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const bool result = !find_failure(c, m, depth).has_value();
    memo_.emplace(key, result);
    return result;
  }

  struct Failure {
    ObservableStep move;
    bool smd_side;
    // matching pair to descend into, when labels matched but successors failed
    std::optional<std::pair<Configuration, Marking>> deeper;
  };

  std::optional<Failure> find_failure(const Configuration& c, const Marking& m, std::size_t depth) {
    const auto& sm = smd_moves(c);
    const auto& nm = net_moves(m);
    for (const auto& [label, next] : sm) {
      std::optional<Marking> partner;
      bool matched = false;
      for (const auto& [nl, nnext] : nm) {
        if (nl != label) continue;
        if (!partner) partner = nnext;
        if (bisimilar(next, nnext, depth - 1)) {
          matched = true;
          break;
        }
      }
      if (!matched) {
        Failure f{label, true, std::nullopt};
        if (partner) f.deeper.emplace(next, *partner);
        return f;
      }
    }
    for (const auto& [label, nnext] : nm) {
      std::optional<Configuration> partner;
      bool matched = false;
      for (const auto& [sl, next] : sm) {
        if (sl != label) continue;
        if (!partner) partner = next;
        if (bisimilar(next, nnext, depth - 1)) {
          matched = true;
          break;
        }
      }
      if (!matched) {
        Failure f{label, false, std::nullopt};
        if (partner) f.deeper.emplace(*partner, nnext);
        return f;
      }
    }
    return std::nullopt;
  }

  EquivalenceVerdict explain(Configuration c, Marking m, std::size_t depth) {
    EquivalenceVerdict v;
    v.equivalent = false;
    while (depth > 0) {
      auto f = find_failure(c, m, depth);
      if (!f) break;
      if (!f->deeper) {
        v.unmatched = f->move;
        v.unmatched_by_net = f->smd_side;
        break;
      }
      v.trace.push_back(f->move);
      c = f->deeper->first;
      m = f->deeper->second;
      --depth;
    }
    return v;
  }

  std::size_t explored() const { return memo_.size(); }

 private:
  ObservableStep observable(const TraceStep& s, bool do_step = false) const {
    ObservableStep o{ObservableStep::Kind::Step, s.event.value_or(""), {}, s.state};
    if (!do_step) {
      for (const auto& b : s.behaviours) o.behaviours.push_back(b);
    }
    return o;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (rng_) std::shuffle(v.begin(), v.end(), *rng_);
  }

  Interpreter smd_;
  NetSide net_;
  std::uint32_t capacity_;
  std::optional<std::mt19937_64> rng_;
  std::map<Configuration, std::vector<SmdMove>> smd_cache_;
  std::map<Marking, std::vector<NetMove>> net_cache_;
  std::map<std::tuple<Configuration, Marking, std::size_t>, bool> memo_;
};

}  // namespace

EquivalenceVerdict check_trace_equivalence(const StateMachineModel& model, const ColouredNet& net,
                                           const TranslationMap& map, const EquivalenceOptions& options) {
  if (options.depth < 1) throw Error("equivalence depth must be at least 1");
  Checker checker(model, net, map, options);
  const Configuration c0 = Interpreter(model).initial_configuration();
  const Marking m0 = initial_marking(net);
  // iterative deepening yields a shortest counterexample
  for (std::size_t d = 1; d <= options.depth; ++d) {
    if (!checker.bisimilar(c0, m0, d)) {
      EquivalenceVerdict v = checker.explain(c0, m0, d);
      v.pairs_explored = checker.explored();
      return v;
    }
  }
  EquivalenceVerdict v;
  v.pairs_explored = checker.explored();
  return v;
}

}  // namespace smd2cpn
