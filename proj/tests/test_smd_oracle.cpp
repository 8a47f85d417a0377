#include <doctest.h>

#include "smd2cpn/smd_oracle.hpp"
#include "smd2cpn/smd_text.hpp"
#include "smd2cpn/translator.hpp"
#include "support/corpus.hpp"
#include "support/mutations.hpp"

using namespace smd2cpn;
using namespace smd2cpn::testing;

namespace {

Configuration take(const Interpreter& smd, Configuration c, const std::string& event, const std::string& transition) {
  c = smd.inject(c, event);
  return smd.step(c, {transition, event}).first;
}

}  // namespace

TEST_CASE("initial configuration") {
  const Interpreter cd(corpus_model("cdplayer"));
  const auto c = cd.initial_configuration();
  CHECK(c.active == "CLOSED");
  CHECK(c.valuation == std::map<std::string, std::int64_t>{{"track", 0}});
  CHECK(c.history == std::map<std::string, std::string>{{"BUSY", "NONE"}});
  CHECK(c.pending.empty());

  CHECK(initial_configuration(load_smdl("machine M { state S initial; }")).active == "S");
  CHECK(initial_configuration(load_smdl("machine M { var x : int = 5; state S initial; }")).valuation.at("x") == 5);
}

TEST_CASE("enabled transitions") {
  const Interpreter cd(corpus_model("cdplayer"));
  auto c = cd.initial_configuration();
  CHECK(cd.enabled_transitions(c).empty());
  c = cd.inject(c, "play");
  CHECK(cd.enabled_transitions(c) == std::vector<Choice>{{"t_play", "play"}});

  const auto guarded = load_smdl(
      "machine M { var track : int = 0; state A initial; state B; trans t : A -> B on e if (track > 0); "
      "trans u : A -> B; }");
  auto g = initial_configuration(guarded);
  g.pending["e"] = 1;
  CHECK(enabled_transitions(guarded, g) == std::vector<Choice>{{"u", std::nullopt}});
  g.valuation["track"] = 1;
  CHECK(enabled_transitions(guarded, g).size() == 2);
}

TEST_CASE("steps") {
  const Interpreter cd(corpus_model("cdplayer"));
  auto c = cd.initial_configuration();

  SUBCASE("sibling transition without behaviours") {
    c = cd.inject(c, "open_close");
    const auto [next, s] = cd.step(c, {"t_open", "open_close"});
    CHECK(s.behaviours.empty());
    CHECK(s.event == "open_close");
    CHECK(next.active == "OPEN");
    CHECK(next.pending.empty());
  }
  SUBCASE("entering BUSY runs FTS first") {
    c = cd.inject(c, "play");
    const auto [next, s] = cd.step(c, {"t_play", "play"});
    REQUIRE_FALSE(s.behaviours.empty());
    CHECK(s.behaviours.front() == "FTS");
    CHECK(next.active == "PLAYING");
    CHECK(next.valuation.at("track") == 1);
  }
  SUBCASE("history re-entry after leaving from PAUSED") {
    c = take(cd, c, "play", "t_play");
    c = take(cd, c, "pause", "t_pause");
    c = take(cd, c, "open_close", "t_eject");
    CHECK(c.active == "OPEN");
    CHECK(c.history.at("BUSY") == "PAUSED");
    const auto [next, s] = cd.step(cd.inject(c, "play"), {"t_resume", "play"});
    CHECK(next.active == "PAUSED");
    CHECK(s.behaviours == std::vector<std::string>{"FTS"});
  }
  SUBCASE("completion through the final state resets history") {
    c = take(cd, c, "play", "t_play");
    for (int i = 0; i < 2; ++i) c = take(cd, c, "next", "t_next");
    c = take(cd, c, "next", "t_last");
    CHECK(c.active == "BUSY.F");
    CHECK(cd.enabled_transitions(c) == std::vector<Choice>{{"t_done", std::nullopt}});
    c = cd.step(c, {"t_done", std::nullopt}).first;
    CHECK(c.active == "CLOSED");
    CHECK(c.history.at("BUSY") == "NONE");
  }
  SUBCASE("do behaviour keeps the state") {
    c = take(cd, c, "play", "t_play");
    const auto d = cd.do_step(c);
    REQUIRE(d);
    CHECK(d->second.behaviours == std::vector<std::string>{"spin"});
    CHECK(d->first.active == "PLAYING");
    CHECK_FALSE(cd.do_step(cd.initial_configuration()));
  }
  SUBCASE("disabled choices are rejected") {
    CHECK_THROWS_AS(cd.step(c, {"t_play", "play"}), Error);
    CHECK_THROWS_AS(cd.step(c, {"nope", std::nullopt}), LookupError);
    CHECK_THROWS_AS(cd.inject(c, "nope"), LookupError);
  }
  SUBCASE("determinism") {
    c = cd.inject(c, "play");
    CHECK(cd.step(c, {"t_play", "play"}) == cd.step(c, {"t_play", "play"}));
  }
}

TEST_CASE("inter-level chain order") {
  const Interpreter levels(corpus_model("interlevel"));
  auto c = levels.inject(levels.initial_configuration(), "a");
  const auto [next, s] = levels.step(c, {"t_deep", "a"});
  CHECK(s.behaviours == std::vector<std::string>{"exP11", "exP1", "exP", "enQ", "enQ2", "enQ21"});
  CHECK(next.active == "Q21");
  // self transition on a simple state leaves and re-enters it
  const auto [again, s2] = levels.step(levels.inject(next, "c"), {"t_self", "c"});
  CHECK(s2.behaviours == std::vector<std::string>{"again", "enQ21"});
  // transition from an outer state into its own substate is external
  const auto [up, s3] = levels.step(levels.inject(again, "b"), {"t_up", "b"});
  CHECK(s3.behaviours == std::vector<std::string>{"exQ2", "exQ", "enP", "enP1", "enP11"});
  CHECK(up.active == "P11");
}

TEST_CASE("valuation domain is stable") {
  const Interpreter g(corpus_model("guards"));
  auto c = g.inject(g.initial_configuration(), "go");
  c = g.step(c, {"t_start", "go"}).first;
  for (int i = 0; i < 2; ++i) c = g.step(g.inject(c, "inc"), {"t_inc", "inc"}).first;
  CHECK(c.valuation == std::map<std::string, std::int64_t>{{"n", 2}, {"total", 3}});
}

TEST_CASE("equivalence: trivial and corpus") {
  const auto single = load_smdl("machine M { state S initial; }");
  const auto [sn, sm] = translate(single);
  CHECK(check_trace_equivalence(single, sn, sm, {1}).equivalent);
  CHECK_THROWS_AS(check_trace_equivalence(single, sn, sm, {0}), Error);

  for (const auto& name : kCorpusModels) {
    INFO(name);
    const auto model = corpus_model(name);
    const auto [net, map] = translate(model);
    const auto v = check_trace_equivalence(model, net, map, {8});
    CHECK_MESSAGE(v.equivalent, v.to_string());
  }
}

TEST_CASE("equivalence: larger event pools") {
  TranslationConfig config;
  config.event_pool_capacity = 2;
  for (const char* name : {"cdplayer", "guards"}) {
    INFO(name);
    const auto model = corpus_model(name);
    const auto [net, map] = translate(model, config);
    CHECK(check_trace_equivalence(model, net, map, {7}).equivalent);
  }
}

TEST_CASE("equivalence: the verdict does not depend on successor order") {
  for (const char* name : {"cdplayer", "history"}) {
    const auto model = corpus_model(name);
    const auto [net, map] = translate(model);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      EquivalenceOptions o;
      o.depth = 8;
      o.shuffle_seed = seed;
      CHECK(check_trace_equivalence(model, net, map, o).equivalent);
    }
  }
  for (const auto& mutation : mutations()) {
    const auto model = corpus_model(mutation.model);
    auto [net, map] = translate(model);
    mutation.apply(net);
    EquivalenceOptions o;
    o.depth = 10;
    const auto plain = check_trace_equivalence(model, net, map, o);
    o.shuffle_seed = 99;
    const auto shuffled = check_trace_equivalence(model, net, map, o);
    CHECK(plain.equivalent == shuffled.equivalent);
    CHECK(plain.trace.size() == shuffled.trace.size());
  }
}

TEST_CASE("equivalence: a deleted arc gives a concrete counterexample") {
  const auto model = corpus_model("cdplayer");
  auto [net, map] = translate(model);
  mutations()[0].apply(net);
  const auto v = check_trace_equivalence(model, net, map, {6});
  REQUIRE_FALSE(v.equivalent);
  REQUIRE(v.unmatched);
  // inject play, then the SMD step "play / FTS -> PLAYING" has no partner
  CHECK(v.trace.size() == 1);
  CHECK(v.trace[0].to_string() == "inject play");
  CHECK(v.unmatched->to_string() == "play / FTS -> PLAYING");
  CHECK(v.unmatched_by_net);
  CHECK(v.to_string().find("play / FTS -> PLAYING") != std::string::npos);
}

TEST_CASE("equivalence: an in-flight cycle exceeds the chain bound") {
  const auto model = corpus_model("cdplayer");
  auto [net, map] = translate(model);
  // FTS feeds its own in-flight place
  arc_ref(net, "P_PLAYING", "T_t_play__beh_0", Orientation::TtoP).place = "P_t_play__0";
  EquivalenceOptions o;
  o.depth = 4;
  o.chain_bound = 50;
  CHECK_THROWS_AS(check_trace_equivalence(model, net, map, o), Error);
}

TEST_CASE("a do self-loop exists exactly for states with a do behaviour") {
  for (const auto& name : kCorpusModels) {
    const auto model = corpus_model(name);
    const auto [net, map] = translate(model);
    for (const auto& s : model.states) {
      const bool has_loop = net.find_transition("T_" + s.name + "__do") != nullptr;
      CHECK(has_loop == s.do_activity.has_value());
    }
  }
}
