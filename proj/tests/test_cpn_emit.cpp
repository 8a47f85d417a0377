#include <doctest.h>

#include <set>

#include "smd2cpn/cpn_emit.hpp"
#include "smd2cpn/smd_text.hpp"
#include "smd2cpn/translator.hpp"
#include "support/corpus.hpp"

using namespace smd2cpn;
using namespace smd2cpn::testing;

namespace {

std::size_t occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

ColouredNet one_place() {
  ColouredNet n;
  n.name = "One";
  n.colours = {{"UNIT", ColourSet::unit()}};
  n.places.push_back({"P_A", "A", "UNIT", {{Value::unit(), 1}}});
  return n;
}

}  // namespace

TEST_CASE("layout") {
  SUBCASE("single place at the origin") {
    const auto l = layout(one_place());
    CHECK(l.at("P_A") == Point{0, 0});
  }
  SUBCASE("two-node chain is spaced along x") {
    auto n = one_place();
    n.transitions.push_back({"T", "T", std::nullopt, std::nullopt});
    n.arcs.push_back({"A_1", "P_A", "T", Orientation::PtoT, Expr::unit()});
    const auto l = layout(n);
    CHECK(l.at("T").x - l.at("P_A").x >= kNodeSpacing);
    CHECK(l.at("T").y == 0);
  }
  SUBCASE("corpus nets: every node placed, coordinates distinct") {
    for (const auto& name : kCorpusModels) {
      INFO(name);
      const auto [net, map] = translate(corpus_model(name));
      const auto l = layout(net);
      CHECK(l.size() == net.places.size() + net.transitions.size());
      std::set<std::pair<double, double>> seen;
      for (const auto& [id, p] : l) CHECK(seen.emplace(p.x, p.y).second);
    }
  }
}

TEST_CASE("CPN Tools document") {
  const auto [net, map] = translate(corpus_model("cdplayer"));
  const std::string xml = emit_cpn_xml(net, layout(net));
  CHECK(xml.starts_with("<?xml version=\"1.0\" encoding=\"iso-8859-1\"?>"));
  CHECK(xml.find("<generator tool=\"CPN Tools\" version=\"4.0.1\" format=\"6\"/>") != std::string::npos);
  CHECK(occurrences(xml, "<place id=") == net.places.size());
  CHECK(occurrences(xml, "<trans id=") == net.transitions.size());
  CHECK(occurrences(xml, "<arc id=") == net.arcs.size());
  CHECK(xml.find("colset VARS = record track:INT;") != std::string::npos);
  CHECK(xml.find("colset UNIT = unit;") != std::string::npos);
  CHECK(xml.find("with next | open_close | pause | play | stop;") != std::string::npos);
  CHECK(xml.find(">1`{track=0}</text>") != std::string::npos);
  // orientation is PtoT exactly for place-to-transition arcs
  std::size_t p2t = 0;
  for (const auto& a : net.arcs) p2t += a.orientation == Orientation::PtoT ? 1 : 0;
  CHECK(occurrences(xml, "orientation=\"PtoT\" order=\"1\"") == p2t);
  CHECK(occurrences(xml, "orientation=\"TtoP\" order=\"1\"") == net.arcs.size() - p2t);
  CHECK(xml.find("[v__track &lt; 3]") != std::string::npos);
  CHECK(emit_cpn_xml(net, layout(net)) == xml);
}

TEST_CASE("missing layout entry is an error") {
  const auto n = one_place();
  CHECK_THROWS_AS(emit_cpn_xml(n, {}), Error);
}

TEST_CASE("empty net still has the document skeleton") {
  ColouredNet n;
  n.name = "Empty";
  const std::string xml = emit_cpn_xml(n, {});
  CHECK(xml.find("<page id=\"PAGE_main\">") != std::string::npos);
  CHECK(occurrences(xml, "<place ") == 0);
  CHECK(parse_cpn_xml(xml) == n);
}

TEST_CASE("reading back") {
  SUBCASE("one place") {
    const auto n = one_place();
    CHECK(parse_cpn_xml(emit_cpn_xml(n, layout(n))) == n);
  }
  SUBCASE("every corpus net") {
    for (const auto& name : kCorpusModels) {
      INFO(name);
      const auto [net, map] = translate(corpus_model(name));
      const auto back = parse_cpn_xml(emit_cpn_xml(net, layout(net)));
      CHECK(back == net);
      CHECK(emit_cpn_xml(back, layout(back)) == emit_cpn_xml(net, layout(net)));
    }
  }
  SUBCASE("expressions of every shape") {
    ColouredNet n;
    n.name = "Shapes";
    n.colours = {{"INT", ColourSet::integer()},
                 {"PAIR", ColourSet::product({"INT", "INT"})},
                 {"E", ColourSet::enumeration({"a", "b"})}};
    n.variables = {{"x", "INT"}, {"y", "INT"}, {"e", "E"}};
    n.places.push_back({"P", "P", "PAIR", {{Value::tuple({Value::integer(-1), Value::integer(2)}), 3}}});
    n.places.push_back({"Q", "Q", "E", {{Value::symbol("a"), 1}, {Value::symbol("b"), 2}}});
    const Expr x = Expr::var("x"), y = Expr::var("y");
    n.transitions.push_back(
        {"T", "T",
         Expr::binary(BinaryOp::Or, Expr::unary(UnaryOp::Not, Expr::binary(BinaryOp::Le, x, Expr::integer(-4))),
                      Expr::binary(BinaryOp::And, Expr::binary(BinaryOp::Eq, Expr::var("e"), Expr::symbol("b")),
                                   Expr::binary(BinaryOp::Ne, Expr::unary(UnaryOp::Neg, y), x))),
         std::string("label")});
    n.arcs.push_back({"A_1", "P", "T", Orientation::PtoT, Expr::tuple({x, y})});
    n.arcs.push_back({"A_2", "Q", "T", Orientation::PtoT, Expr::var("e")});
    n.arcs.push_back({"A_3", "P", "T", Orientation::TtoP,
                      Expr::tuple({Expr::binary(BinaryOp::Mul, Expr::binary(BinaryOp::Sub, x, y), Expr::integer(2)),
                                   Expr::binary(BinaryOp::Sub, x, Expr::binary(BinaryOp::Sub, y, Expr::integer(1)))})});
    n.arcs.push_back({"A_4", "Q", "T", Orientation::TtoP, Expr::symbol("a")});
    REQUIRE(check_net(n).empty());
    CHECK(parse_cpn_xml(emit_cpn_xml(n, layout(n))) == n);
  }
  SUBCASE("truncated document") {
    const auto [net, map] = translate(corpus_model("flat"));
    const std::string xml = emit_cpn_xml(net, layout(net));
    try {
      parse_cpn_xml(xml.substr(0, xml.size() / 2));
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() > 1);
    }
  }
  SUBCASE("unsupported colour set") {
    const std::string doc =
        "<?xml version=\"1.0\"?><workspaceElements><cpnet><globbox><block id=\"b\">"
        "<color id=\"c\"><id>R</id><real/></color></block></globbox><page id=\"p\"/></cpnet></workspaceElements>";
    CHECK_THROWS_AS(parse_cpn_xml(doc), Error);
  }
}

TEST_CASE("DOT") {
  const auto one = one_place();
  const std::string dot = emit_dot(one);
  CHECK(occurrences(dot, "shape=ellipse") == 1);
  CHECK(occurrences(dot, "shape=box") == 0);
  CHECK(emit_dot(one, initial_marking(one)).find("1 token") != std::string::npos);

  const auto [net, map] = translate(corpus_model("cdplayer"));
  const std::string cd = emit_dot(net, initial_marking(net));
  CHECK(occurrences(cd, "shape=ellipse") + occurrences(cd, "shape=box") == net.places.size() + net.transitions.size());
  CHECK(occurrences(cd, " -> ") == net.arcs.size());
  CHECK(cd.find("\"P_CLOSED\" [shape=ellipse,label=\"CLOSED\\n1 token: 1`()\"]") != std::string::npos);
}
