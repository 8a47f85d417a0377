#include <doctest.h>

#include <random>

#include "smd2cpn/cpn_model.hpp"
#include "smd2cpn/translator.hpp"
#include "support/corpus.hpp"

using namespace smd2cpn;
using namespace smd2cpn::testing;

namespace {

ColouredNet unit_net() {
  ColouredNet n;
  n.name = "N";
  n.colours = {{"UNIT", ColourSet::unit()}};
  return n;
}

void add_place(ColouredNet& n, const std::string& id, std::uint32_t tokens = 0) {
  PlaceDef p{id, id, "UNIT", {}};
  if (tokens) p.initial_marking[Value::unit()] = tokens;
  n.places.push_back(p);
}

void add_arc(ColouredNet& n, const std::string& p, const std::string& t, Orientation o) {
  n.arcs.push_back({"A_" + std::to_string(n.arcs.size() + 1), p, t, o, Expr::unit()});
}

}  // namespace

TEST_CASE("enabled bindings") {
  SUBCASE("no input arcs and no guard") {
    auto n = unit_net();
    n.transitions.push_back({"T", "T", std::nullopt, std::nullopt});
    CHECK(enabled_bindings(n, initial_marking(n), "T") == std::vector<Binding>{Binding{}});
  }
  SUBCASE("variables bind from tokens, guard filters") {
    ColouredNet n;
    n.colours = {{"INT", ColourSet::integer()}};
    n.variables = {{"x", "INT"}};
    PlaceDef p{"P", "P", "INT", {}};
    p.initial_marking[Value::integer(1)] = 1;
    p.initial_marking[Value::integer(5)] = 2;
    n.places.push_back(p);
    n.transitions.push_back({"T", "T", Expr::binary(BinaryOp::Gt, Expr::var("x"), Expr::integer(2)), std::nullopt});
    n.arcs.push_back({"A_1", "P", "T", Orientation::PtoT, Expr::var("x")});
    n.arcs.push_back({"A_2", "P", "T", Orientation::TtoP, Expr::binary(BinaryOp::Add, Expr::var("x"), Expr::integer(1))});
    const auto m = initial_marking(n);
    REQUIRE(enabled_bindings(n, m, "T") == std::vector<Binding>{{{"x", Value::integer(5)}}});
    const auto next = fire(n, m, "T", {{"x", Value::integer(5)}});
    CHECK(next[0].at(Value::integer(6)) == 1);
    CHECK(next[0].at(Value::integer(5)) == 1);
    CHECK_THROWS_AS(fire(n, m, "T", {{"x", Value::integer(1)}}), Error);
  }
  SUBCASE("one token cannot satisfy two arcs") {
    auto n = unit_net();
    add_place(n, "P", 1);
    n.transitions.push_back({"T", "T", std::nullopt, std::nullopt});
    add_arc(n, "P", "T", Orientation::PtoT);
    add_arc(n, "P", "T", Orientation::PtoT);
    CHECK(enabled_bindings(n, initial_marking(n), "T").empty());
  }
}

TEST_CASE("firing moves a token") {
  auto n = unit_net();
  add_place(n, "A", 1);
  add_place(n, "B");
  n.transitions.push_back({"T", "T", std::nullopt, std::nullopt});
  add_arc(n, "A", "T", Orientation::PtoT);
  add_arc(n, "B", "T", Orientation::TtoP);
  const auto m = fire(n, initial_marking(n), "T", {});
  CHECK(m[0].empty());
  CHECK(token_count(m[1]) == 1);
}

TEST_CASE("balanced random nets preserve the token count and firing is local") {
  std::mt19937 rng(42);
  for (int round = 0; round < 50; ++round) {
    auto n = unit_net();
    const int places = 6;
    for (int p = 0; p < places; ++p) add_place(n, "P" + std::to_string(p), rng() % 3);
    std::uniform_int_distribution<int> pick(0, places - 1);
    for (int t = 0; t < 5; ++t) {
      const std::string id = "T" + std::to_string(t);
      n.transitions.push_back({id, id, std::nullopt, std::nullopt});
      const int arity = 1 + static_cast<int>(rng() % 2);
      for (int k = 0; k < arity; ++k) {
        add_arc(n, "P" + std::to_string(pick(rng)), id, Orientation::PtoT);
        add_arc(n, "P" + std::to_string(pick(rng)), id, Orientation::TtoP);
      }
    }
    const TokenGame game(n);
    const auto g = explore(n, initial_marking(n), 500);
    auto total = [](const Marking& m) {
      std::size_t s = 0;
      for (const auto& ms : m) s += token_count(ms);
      return s;
    };
    for (const auto& e : g.edges) {
      const auto& before = g.states[e.from];
      const auto& after = g.states[e.to];
      CHECK(total(before) == total(after));
      const auto adj = game.adjacent_places(game.transition_index(e.transition));
      for (std::size_t p = 0; p < before.size(); ++p) {
        if (std::find(adj.begin(), adj.end(), p) == adj.end()) CHECK(before[p] == after[p]);
      }
    }
    // monotonicity: extra tokens never disable a guard-free binding
    for (const auto& m : g.states) {
      auto more = m;
      for (auto& ms : more) ms[Value::unit()] += 1;
      for (std::size_t t = 0; t < n.transitions.size(); ++t) {
        if (!game.enabled_bindings(m, t).empty()) CHECK_FALSE(game.enabled_bindings(more, t).empty());
      }
    }
  }
}

TEST_CASE("exploration") {
  SUBCASE("dead net") {
    auto n = unit_net();
    add_place(n, "P", 1);
    const auto g = explore(n, initial_marking(n), 10);
    CHECK(g.states.size() == 1);
    CHECK(g.edges.empty());
    CHECK_FALSE(g.truncated);
  }
  SUBCASE("self loop") {
    auto n = unit_net();
    add_place(n, "P", 1);
    n.transitions.push_back({"T", "T", std::nullopt, std::nullopt});
    add_arc(n, "P", "T", Orientation::PtoT);
    add_arc(n, "P", "T", Orientation::TtoP);
    const auto g = explore(n, initial_marking(n), 10);
    CHECK(g.states.size() == 1);
    CHECK(g.edges.size() == 1);
  }
  SUBCASE("bound truncates") {
    auto n = unit_net();
    add_place(n, "P", 1);
    n.transitions.push_back({"T", "T", std::nullopt, std::nullopt});
    add_arc(n, "P", "T", Orientation::TtoP);
    const auto g = explore(n, initial_marking(n), 5);
    CHECK(g.states.size() == 5);
    CHECK(g.truncated);
    CHECK_THROWS_AS(explore(n, initial_marking(n), 0), Error);
  }
  SUBCASE("deterministic, and markings stay inside their colours") {
    const auto [net, map] = translate(corpus_model("guards"));
    const auto a = explore(net, initial_marking(net), 100000);
    const auto b = explore(net, initial_marking(net), 100000);
    CHECK(a.states == b.states);
    CHECK(a.edges == b.edges);
    for (const auto& m : a.states) {
      for (std::size_t p = 0; p < net.places.size(); ++p) {
        for (const auto& [v, k] : m[p]) CHECK(inhabits(net, net.places[p].colour, v));
      }
    }
  }
}

TEST_CASE("CD player: the initial marking enables the producers, do and nothing else") {
  const auto [net, map] = translate(corpus_model("cdplayer"));
  const TokenGame game(net);
  const auto m0 = initial_marking(net);
  std::set<std::string> enabled;
  for (std::size_t t = 0; t < net.transitions.size(); ++t) {
    if (!game.enabled_bindings(m0, t).empty()) enabled.insert(net.transitions[t].id);
  }
  std::set<std::string> producers;
  for (const auto& [e, t] : map.event_producer) producers.insert(t);
  CHECK(enabled == producers);
}

TEST_CASE("CD player: FTS consumes the in-flight token and marks PLAYING") {
  const auto [net, map] = translate(corpus_model("cdplayer"));
  const TokenGame game(net);
  auto m = initial_marking(net);
  m = game.fire(m, game.transition_index("T_EVENTS__produce_play"), {});
  const auto dispatch = game.transition_index("T_t_play__from_CLOSED");
  REQUIRE(game.enabled_bindings(m, dispatch).size() == 1);
  m = game.fire(m, dispatch, {});
  const std::size_t in_flight = game.place_index("P_t_play__0");
  CHECK(token_count(m[in_flight]) == 1);
  const auto fts = game.transition_index("T_t_play__beh_0");
  CHECK(net.transitions[fts].observable_label == "FTS");
  const auto b = game.enabled_bindings(m, fts);
  REQUIRE(b.size() == 1);
  m = game.fire(m, fts, b[0]);
  CHECK(m[in_flight].empty());
  CHECK(token_count(m[game.place_index("P_PLAYING")]) == 1);
  CHECK(m[game.place_index("P_VARS")].begin()->first == Value::tuple({Value::integer(1)}));
}

TEST_CASE("check_net finds broken nets") {
  auto n = unit_net();
  add_place(n, "P", 1);
  CHECK(check_net(n).empty());
  add_arc(n, "P", "T_missing", Orientation::PtoT);
  CHECK_FALSE(check_net(n).empty());
  auto dup = unit_net();
  add_place(dup, "P");
  add_place(dup, "P");
  CHECK_FALSE(check_net(dup).empty());
  auto guard = unit_net();
  guard.transitions.push_back({"T", "T", Expr::binary(BinaryOp::Eq, Expr::var("x"), Expr::integer(1)), std::nullopt});
  CHECK_FALSE(check_net(guard).empty());
}

TEST_CASE("natural ordering of ids") {
  CHECK(natural_less("A_2", "A_10"));
  CHECK_FALSE(natural_less("A_10", "A_2"));
  CHECK(natural_less("P_a", "P_b"));
}
