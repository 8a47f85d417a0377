#include <doctest.h>

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "smd2cpn/smd_oracle.hpp"
#include "smd2cpn/smd_text.hpp"
#include "smd2cpn/translator.hpp"
#include "support/corpus.hpp"

using namespace smd2cpn;
using namespace smd2cpn::testing;

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

bool net_mentions(const ColouredNet& net, const std::string& word) {
  auto has = [&](const std::string& s) { return upper(s).find(upper(word)) != std::string::npos; };
  for (const auto& p : net.places) {
    if (has(p.id) || has(p.name)) return true;
  }
  for (const auto& t : net.transitions) {
    if (has(t.id) || has(t.name)) return true;
  }
  return false;
}

std::size_t count_if_id(const ColouredNet& net, const std::string& prefix) {
  return std::count_if(net.transitions.begin(), net.transitions.end(),
                       [&](auto& t) { return t.id.starts_with(prefix); });
}

}  // namespace

TEST_CASE("CD player: BUSY yields ^F, ^H and FTS; NONPLAYING yields nothing") {
  const auto [net, map] = translate(corpus_model("cdplayer"));
  REQUIRE(net.find_place("P_BUSY__F"));
  CHECK(net.find_place("P_BUSY__F")->name == "BUSY^F");
  REQUIRE(net.find_place("P_BUSY__H"));
  CHECK(net.find_place("P_BUSY__H")->name == "BUSY^H");
  CHECK(net.find_place("P_BUSY__H")->initial_marking == Multiset{{Value::symbol("NONE"), 1}});
  CHECK(std::any_of(net.transitions.begin(), net.transitions.end(),
                    [](auto& t) { return t.observable_label == "FTS" && t.name == "FTS"; }));
  CHECK_FALSE(net_mentions(net, "NONPLAYING"));
  for (const char* s : {"PLAYING", "PAUSED", "CLOSED", "OPEN"}) {
    REQUIRE(net.find_place(std::string("P_") + s));
    CHECK(net.find_place(std::string("P_") + s)->name == s);
  }
  CHECK(check_net(net).empty());
}

TEST_CASE("CD player: node counts match the hand application of the rules") {
  // derivation in corpus/expectations.json
  const auto [net, map] = translate(corpus_model("cdplayer"));
  CHECK(net.places.size() == 18);
  CHECK(net.transitions.size() == 26);
  CHECK(net.arcs.size() == 104);
  CHECK(count_if_id(net, "T_EVENTS__produce_") == 5);
  CHECK(count_if_id(net, "T_t_stop__from_") == 2);
  CHECK(count_if_id(net, "T_t_eject__from_") == 2);
  CHECK(count_if_id(net, "T_t_done__from_") == 1);
  CHECK(net.find_transition("T_t_done__from_BUSY__F"));
  CHECK(count_if_id(net, "T_t_resume__restore_") == 3);
}

TEST_CASE("empty chains collapse to a direct arc") {
  const auto [net, map] = translate(corpus_model("cdplayer"));
  const auto& nodes = map.transition_subnet.at("t_pause");
  CHECK(nodes == std::vector<std::string>{"T_t_pause__from_PLAYING"});
  CHECK(std::any_of(net.arcs.begin(), net.arcs.end(), [](auto& a) {
    return a.transition == "T_t_pause__from_PLAYING" && a.place == "P_PAUSED" && a.orientation == Orientation::TtoP;
  }));
}

TEST_CASE("single-state machine") {
  const auto [net, map] = translate(load_smdl("machine M { state S initial; }"));
  REQUIRE(net.places.size() == 1);
  CHECK(net.transitions.empty());
  CHECK(token_count(net.places[0].initial_marking) == 1);
  CHECK_FALSE(map.vars_place);
  CHECK_FALSE(map.events_place);
}

TEST_CASE("history restore lands on the remembered child") {
  const auto model = corpus_model("cdplayer");
  const auto [net, map] = translate(model);
  const TokenGame game(net);
  auto run = [&](Marking m, const std::vector<std::string>& ids) {
    for (const auto& id : ids) {
      const auto t = game.transition_index(id);
      const auto b = game.enabled_bindings(m, t);
      REQUIRE_MESSAGE(!b.empty(), id);
      m = game.fire(m, t, b[0]);
    }
    return m;
  };
  auto m = run(initial_marking(net), {"T_EVENTS__produce_play", "T_t_play__from_CLOSED", "T_t_play__beh_0",
                                      "T_EVENTS__produce_pause", "T_t_pause__from_PLAYING",
                                      "T_EVENTS__produce_open_close", "T_t_eject__from_PAUSED"});
  CHECK(m[game.place_index("P_BUSY__H")] == Multiset{{Value::symbol("PAUSED"), 1}});
  const auto resumed = run(m, {"T_EVENTS__produce_play", "T_t_resume__from_OPEN", "T_t_resume__beh_0"});
  // only the PAUSED branch is enabled
  CHECK(game.enabled_bindings(resumed, game.transition_index("T_t_resume__restore_PLAYING")).empty());
  CHECK(game.enabled_bindings(resumed, game.transition_index("T_t_resume__restore_NONE")).empty());
  const auto done = run(resumed, {"T_t_resume__restore_PAUSED"});
  CHECK(token_count(done[game.place_index("P_PAUSED")]) == 1);

  // never recorded: NONE restores BUSY's default
  auto fresh = run(initial_marking(net), {"T_EVENTS__produce_open_close", "T_t_open__from_CLOSED",
                                          "T_EVENTS__produce_play", "T_t_resume__from_OPEN", "T_t_resume__beh_0",
                                          "T_t_resume__restore_NONE"});
  CHECK(token_count(fresh[game.place_index("P_PLAYING")]) == 1);
}

TEST_CASE("no history targets: the history pass changes nothing") {
  const Hierarchy h(corpus_model("nested3"));
  TranslationMap map;
  auto net = translate_states(h, {}, map);
  translate_transitions(h, map, net);
  const auto before = net;
  translate_history(h, map, net);
  CHECK(net == before);
}

TEST_CASE("mapping totality and determinism on the corpus") {
  for (const auto& name : kCorpusModels) {
    INFO(name);
    const auto model = corpus_model(name);
    const auto [net, map] = translate(model);
    const auto [net2, map2] = translate(model);
    CHECK(net.places == net2.places);
    CHECK(net.transitions == net2.transitions);
    CHECK(net.arcs == net2.arcs);
    CHECK(check_net(net).empty());
    const Hierarchy h(model);
    for (StateId s : h.preorder()) {
      if (h.is_simple(s)) CHECK(map.state_place.count(h.name(s)));
      if (h.node(s).has_history) CHECK(map.history_place.count(h.name(s)));
      if (h.node(s).do_activity) CHECK(map.do_transition.count(h.name(s)));
    }
    // every observable transition is a registered behaviour occurrence
    std::set<std::string> registered;
    for (const auto& [_, t] : map.behaviour_trans) registered.insert(t);
    for (const auto& t : net.transitions) {
      if (t.observable_label) CHECK(registered.count(t.id));
    }
    // every generated node belongs to a state, the environment or a transition subnet
    std::set<std::string> owned;
    for (const auto& [_, nodes] : map.transition_subnet) owned.insert(nodes.begin(), nodes.end());
    for (const auto& p : net.places) {
      CHECK((owned.count(p.id) || map.location_of(p.id) || p.id.starts_with("P_EVENTS") || p.id == "P_VARS" ||
             p.id.ends_with("__H")));
    }
    // shuffled declarations give the same net, ids included
    auto shuffled = model;
    std::reverse(shuffled.states.begin(), shuffled.states.end());
    std::reverse(shuffled.transitions.begin(), shuffled.transitions.end());
    const auto [net3, map3] = translate(shuffled);
    CHECK(net3.arcs == net.arcs);
  }
}

TEST_CASE("chain-length conservation per corpus transition") {
  // between two stable markings the net fires as many observable
  // transitions as the interpreter executes behaviours
  for (const auto& name : kCorpusModels) {
    INFO(name);
    const auto model = corpus_model(name);
    const auto [net, map] = translate(model);
    const Interpreter smd(model);
    const Hierarchy& h = smd.hierarchy();
    for (const auto& t : model.transitions) {
      INFO(t.id);
      // configurations where the transition is enabled: each dispatch location
      for (const auto& [dispatch, loc] : map.dispatch_location) {
        if (!dispatch.starts_with("T_" + t.id + "__from_")) continue;
        std::size_t chain = 0;
        for (const auto& [occ, tid] : map.behaviour_trans) {
          if (occ.transition != t.id || !occ.branch.empty()) continue;
          if (occ.role == BehaviourRole::Exit && occ.location != loc) continue;
          ++chain;
        }
        Configuration c = smd.initial_configuration();
        c.active = loc;
        if (t.trigger) c.pending[*t.trigger] = 1;
        if (t.guard) {
          // first valuation on a small grid that satisfies the guard
          std::vector<std::string> vars;
          for (const auto& v : model.variables) vars.push_back(v.name);
          bool found = false;
          for (int code = 0; code < 1 << (4 * vars.size()) && !found; ++code) {
            std::map<std::string, Value> env;
            for (std::size_t i = 0; i < vars.size(); ++i) {
              const std::int64_t value = ((code >> (4 * i)) & 15) - 4;
              c.valuation[vars[i]] = value;
              env.emplace(vars[i], Value::integer(value));
            }
            found = evaluate(*t.guard, env).as_bool();
          }
          REQUIRE(found);
        }
        const auto [next, step] = smd.step(c, {t.id, t.trigger});
        std::size_t restore = 0;
        if (t.to_history) {
          const StateId target = h.at(t.target);
          for (StateId s = h.default_configuration(target); s != target; s = *h.parent(s)) {
            restore += h.node(s).entry ? 1 : 0;
          }
        }
        CHECK(step.behaviours.size() == chain + restore);
      }
    }
  }
}

TEST_CASE("event capacity bounds pending events") {
  TranslationConfig config;
  config.event_pool_capacity = 2;
  const auto [net, map] = translate(corpus_model("flat"), config);
  CHECK(map.event_capacity == 2);
  const auto* pool = net.find_place("P_EVENTS__cap_tick");
  REQUIRE(pool);
  CHECK(token_count(pool->initial_marking) == 2);
  config.event_pool_capacity = 0;
  CHECK_THROWS_AS(translate(corpus_model("flat"), config), Error);
  config.event_pool_capacity = 1;
  config.include_environment = false;
  const auto [closed, closed_map] = translate(corpus_model("flat"), config);
  CHECK(closed_map.event_producer.empty());
  CHECK(closed_map.event_capacity == 0);
  CHECK(closed.find_place("P_EVENTS"));
}

TEST_CASE("translate rejects invalid models") {
  CHECK_THROWS_AS(translate(parse_smdl("machine M { state A; }")), ValidationError);
}

TEST_CASE("hand-derived expectations") {
  const auto expected = nlohmann::json::parse(read_text(corpus_path("expectations.json")));
  for (const auto& [name, e] : expected.items()) {
    INFO(name);
    const auto [net, map] = translate(corpus_model(name));
    CHECK(net.places.size() == e.at("places").get<std::size_t>());
    CHECK(net.transitions.size() == e.at("transitions").get<std::size_t>());
    CHECK(net.arcs.size() == e.at("arcs").get<std::size_t>());
    const auto g = explore(net, initial_marking(net), 100000);
    CHECK_FALSE(g.truncated);
    CHECK(g.states.size() == e.at("reachable_markings").get<std::size_t>());
  }
}
