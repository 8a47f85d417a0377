#include "smd2cpn/cpn_emit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "cpn_tools_defaults.hpp"

namespace smd2cpn {

namespace pt = boost::property_tree;

// ---------------------------------------------------------------- layout

LayoutAssignment layout(const ColouredNet& net) {
  const ColouredNet c = canonical(net);
  std::vector<std::string> nodes;
  for (const auto& p : c.places) nodes.push_back(p.id);
  for (const auto& t : c.transitions) nodes.push_back(t.id);
  std::sort(nodes.begin(), nodes.end(), [](auto& a, auto& b) { return natural_less(a, b); });

  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& a : c.arcs) {
    if (a.orientation == Orientation::PtoT) {
      succ[a.place].push_back(a.transition);
    } else {
      succ[a.transition].push_back(a.place);
    }
  }
  for (auto& [_, v] : succ) std::sort(v.begin(), v.end(), [](auto& a, auto& b) { return natural_less(a, b); });

  LayoutAssignment out;
  std::map<std::size_t, std::size_t> rows;  // layer -> next free row
  auto bfs = [&](const std::vector<std::string>& roots) {
    std::deque<std::pair<std::string, std::size_t>> queue;
    for (const auto& r : roots) {
      if (out.count(r)) continue;
      out[r] = Point{};
      queue.emplace_back(r, 0);
    }
    // coordinates are assigned in dequeue order so rows follow BFS order
    while (!queue.empty()) {
      auto [n, layer] = queue.front();
      queue.pop_front();
      const std::size_t row = rows[layer]++;
      out[n] = Point{static_cast<double>(layer) * kLayerSpacing, -static_cast<double>(row) * kNodeSpacing};
      for (const auto& m : succ[n]) {
        if (out.count(m)) continue;
        out[m] = Point{};
        queue.emplace_back(m, layer + 1);
      }
    }
  };
  std::vector<std::string> marked;
  for (const auto& p : c.places) {
    if (!p.initial_marking.empty()) marked.push_back(p.id);
  }
  bfs(marked);
  for (const auto& n : nodes) {
    if (!out.count(n)) bfs({n});
  }
  return out;
}

// ---------------------------------------------------------------- CPN ML text

namespace {

void render_cpn(const Expr& e, const ColourSet* context, std::string& out) {
  const bool record = context && context->kind == ColourSet::Kind::Product && !context->fields.empty();
  if (record && e.kind() == Expr::Kind::Tuple && e.operands().size() == context->fields.size()) {
    out += '{';
    for (std::size_t i = 0; i < e.operands().size(); ++i) {
      if (i) out += ',';
      out += context->fields[i] + "=" + to_string(e.operands()[i], kCpnMlSyntax);
    }
    out += '}';
    return;
  }
  out += to_string(e, kCpnMlSyntax);
}

Expr value_expr(const Value& v) {
  if (v.kind() != Value::Kind::Tuple) return Expr::literal(v);
  std::vector<Expr> items;
  for (const auto& i : v.items()) items.push_back(value_expr(i));
  return Expr::tuple(std::move(items));
}

}  // namespace

std::string to_cpn_ml(const Expr& e, const ColourSet* context) {
  std::string out;
  render_cpn(e, context, out);
  return out;
}

std::string to_cpn_ml(const Value& v, const ColourSet* context) { return to_cpn_ml(value_expr(v), context); }

std::string to_cpn_ml(const Multiset& m, const ColourSet* context) {
  std::string out;
  for (const auto& [v, n] : m) {
    if (!out.empty()) out += " ++ ";
    out += std::to_string(n) + "`" + to_cpn_ml(v, context);
  }
  return out;
}

// ---------------------------------------------------------------- XML writer

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string posattr(Point p) { return "<posattr x=\"" + fmt(p.x) + "\" y=\"" + fmt(p.y) + "\"/>"; }

class XmlOut {
 public:
  void line(int depth, const std::string& s) {
    out_.append(static_cast<std::size_t>(2 * depth), ' ');
    out_ += s;
    out_ += '\n';
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

void annotation(XmlOut& x, int d, const std::string& tag, const std::string& id, Point p, const std::string& text) {
  x.line(d, "<" + tag + " id=\"" + id + "\">");
  x.line(d + 1, posattr(p));
  x.line(d + 1, cpn_tools::kAnnotFill);
  x.line(d + 1, cpn_tools::kAnnotLine);
  x.line(d + 1, cpn_tools::kText);
  x.line(d + 1, std::string("<text ") + cpn_tools::kToolAttrs + ">" + escape(text) + "</text>");
  x.line(d, "</" + tag + ">");
}

std::vector<const ColourDecl*> declaration_order(const ColouredNet& net) {
  std::vector<const ColourDecl*> sorted;
  for (const auto& c : net.colours) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->name < b->name; });
  std::vector<const ColourDecl*> out;
  std::set<std::string> done;
  std::function<void(const ColourDecl*)> visit = [&](const ColourDecl* c) {
    if (!done.insert(c->name).second) return;
    for (const auto& comp : c->set.components) {
      if (const ColourDecl* d = net.find_colour(comp)) visit(d);
    }
    out.push_back(c);
  };
  for (auto* c : sorted) visit(c);
  return out;
}

std::string colour_layout(const ColourDecl& c) {
  const ColourSet& s = c.set;
  std::string body;
  switch (s.kind) {
    case ColourSet::Kind::Unit:
      body = "unit";
      break;
    case ColourSet::Kind::Int:
      body = "int";
      break;
    case ColourSet::Kind::Enum:
      body = "with ";
      for (std::size_t i = 0; i < s.values.size(); ++i) body += (i ? " | " : "") + s.values[i];
      break;
    case ColourSet::Kind::Product:
      body = s.fields.empty() ? "product " : "record ";
      for (std::size_t i = 0; i < s.components.size(); ++i) {
        if (i) body += " * ";
        body += s.fields.empty() ? s.components[i] : s.fields[i] + ":" + s.components[i];
      }
      break;
  }
  return "colset " + c.name + " = " + body + ";";
}

void emit_colour(XmlOut& x, const ColourDecl& c) {
  x.line(3, "<color id=\"C_" + c.name + "\">");
  x.line(4, "<id>" + escape(c.name) + "</id>");
  const ColourSet& s = c.set;
  switch (s.kind) {
    case ColourSet::Kind::Unit:
      x.line(4, "<unit/>");
      break;
    case ColourSet::Kind::Int:
      x.line(4, "<int/>");
      break;
    case ColourSet::Kind::Enum:
      x.line(4, "<enum>");
      for (const auto& v : s.values) x.line(5, "<id>" + escape(v) + "</id>");
      x.line(4, "</enum>");
      break;
    case ColourSet::Kind::Product:
      if (s.fields.empty()) {
        x.line(4, "<product>");
        for (const auto& comp : s.components) x.line(5, "<id>" + escape(comp) + "</id>");
        x.line(4, "</product>");
      } else {
        x.line(4, "<record>");
        for (std::size_t i = 0; i < s.components.size(); ++i) {
          x.line(5, "<recordfield>");
          x.line(6, "<id>" + escape(s.fields[i]) + "</id>");
          x.line(6, "<id>" + escape(s.components[i]) + "</id>");
          x.line(5, "</recordfield>");
        }
        x.line(4, "</record>");
      }
      break;
  }
  x.line(4, "<layout>" + escape(colour_layout(c)) + "</layout>");
  x.line(3, "</color>");
}

}  // namespace

std::string emit_cpn_xml(const ColouredNet& input, const LayoutAssignment& positions) {
  const ColouredNet net = canonical(input);
  auto pos = [&](const std::string& id) {
    auto it = positions.find(id);
    if (it == positions.end()) throw Error("layout has no position for node '" + id + "'");
    return it->second;
  };
  auto offset = [](Point p, double dx, double dy) { return Point{p.x + dx, p.y + dy}; };

  XmlOut doc;
  doc.line(0, "<workspaceElements>");
  doc.line(1, cpn_tools::kGenerator);
  doc.line(1, "<cpnet>");
  doc.line(2, "<globbox>");
  doc.line(3, "<block id=\"B_declarations\">");
  doc.line(4, "<id>Declarations</id>");
  XmlOut decls;
  for (const ColourDecl* c : declaration_order(net)) emit_colour(decls, *c);
  for (const auto& v : net.variables) {
    decls.line(3, "<var id=\"V_" + v.name + "\">");
    decls.line(4, "<type>");
    decls.line(5, "<id>" + escape(v.colour) + "</id>");
    decls.line(4, "</type>");
    decls.line(4, "<id>" + escape(v.name) + "</id>");
    decls.line(4, "<layout>" + escape("var " + v.name + " : " + v.colour + ";") + "</layout>");
    decls.line(3, "</var>");
  }
  // declarations sit one level deeper, inside the block
  std::string body = decls.take();
  {
    std::istringstream in(body);
    std::string l;
    while (std::getline(in, l)) doc.line(1, l);
  }
  doc.line(3, "</block>");
  doc.line(2, "</globbox>");
  doc.line(2, "<page id=\"PAGE_main\">");
  doc.line(3, "<pageattr name=\"" + escape(net.name) + "\"/>");

  for (const auto& p : net.places) {
    const Point at = pos(p.id);
    const ColourDecl* colour = net.find_colour(p.colour);
    doc.line(3, "<place id=\"" + escape(p.id) + "\">");
    doc.line(4, posattr(at));
    doc.line(4, cpn_tools::kNodeFill);
    doc.line(4, cpn_tools::kNodeLine);
    doc.line(4, cpn_tools::kText);
    doc.line(4, "<text>" + escape(p.name) + "</text>");
    doc.line(4, cpn_tools::kEllipse);
    doc.line(4, cpn_tools::kToken);
    doc.line(4, cpn_tools::kMarking);
    annotation(doc, 4, "type", p.id + "__type", offset(at, 30, -24), p.colour);
    annotation(doc, 4, "initmark", p.id + "__init", offset(at, 30, 24),
               to_cpn_ml(p.initial_marking, colour ? &colour->set : nullptr));
    doc.line(3, "</place>");
  }
  for (const auto& t : net.transitions) {
    const Point at = pos(t.id);
    doc.line(3, "<trans id=\"" + escape(t.id) + "\" explicit=\"false\">");
    doc.line(4, posattr(at));
    doc.line(4, cpn_tools::kNodeFill);
    doc.line(4, cpn_tools::kNodeLine);
    doc.line(4, cpn_tools::kText);
    doc.line(4, "<text>" + escape(t.name) + "</text>");
    doc.line(4, cpn_tools::kBox);
    doc.line(4, cpn_tools::kBinding);
    annotation(doc, 4, "cond", t.id + "__cond", offset(at, -40, 30),
               t.guard ? "[" + to_cpn_ml(*t.guard) + "]" : "");
    annotation(doc, 4, "time", t.id + "__time", offset(at, 40, 30), "");
    annotation(doc, 4, "code", t.id + "__code", offset(at, 60, -50), "");
    annotation(doc, 4, "priority", t.id + "__priority", offset(at, -60, -30), "");
    if (t.observable_label) doc.line(4, "<!-- observable: " + *t.observable_label + " -->");
    doc.line(3, "</trans>");
  }
  std::map<std::string_view, const ColourSet*> place_colour;
  for (const auto& p : net.places) {
    const ColourDecl* colour = net.find_colour(p.colour);
    place_colour.emplace(p.id, colour ? &colour->set : nullptr);
  }
  for (const auto& a : net.arcs) {
    const Point from = pos(a.orientation == Orientation::PtoT ? a.place : a.transition);
    const Point to = pos(a.orientation == Orientation::PtoT ? a.transition : a.place);
    const Point mid{(from.x + to.x) / 2, (from.y + to.y) / 2 + 10};
    auto colour = place_colour.find(a.place);
    doc.line(3, "<arc id=\"" + escape(a.id) + "\" orientation=\"" +
                    (a.orientation == Orientation::PtoT ? "PtoT" : "TtoP") + "\" order=\"1\">");
    doc.line(4, "<posattr x=\"0.000000\" y=\"0.000000\"/>");
    doc.line(4, cpn_tools::kNodeFill);
    doc.line(4, cpn_tools::kNodeLine);
    doc.line(4, cpn_tools::kText);
    doc.line(4, cpn_tools::kArrow);
    doc.line(4, "<transend idref=\"" + escape(a.transition) + "\"/>");
    doc.line(4, "<placeend idref=\"" + escape(a.place) + "\"/>");
    annotation(doc, 4, "annot", a.id + "__annot", mid,
               to_cpn_ml(a.inscription, colour == place_colour.end() ? nullptr : colour->second));
    doc.line(3, "</arc>");
  }
  doc.line(2, "</page>");
  doc.line(2, "<instances>");
  doc.line(3, "<instance id=\"INST_main\" page=\"PAGE_main\"/>");
  doc.line(2, "</instances>");
  doc.line(2, "<binders>");
  doc.line(3, "<cpnbinder id=\"BINDER_main\" x=\"100\" y=\"100\" width=\"1000\" height=\"700\">");
  doc.line(4, "<sheets>");
  doc.line(5, "<cpnsheet id=\"SHEET_main\" panx=\"0.000000\" pany=\"0.000000\" zoom=\"1.000000\" "
              "instance=\"INST_main\">");
  doc.line(6, "<zorder>");
  doc.line(7, "<position value=\"0\"/>");
  doc.line(6, "</zorder>");
  doc.line(5, "</cpnsheet>");
  doc.line(4, "</sheets>");
  doc.line(4, "<zorder>");
  doc.line(5, "<position value=\"0\"/>");
  doc.line(4, "</zorder>");
  doc.line(3, "</cpnbinder>");
  doc.line(2, "</binders>");
  doc.line(2, "<monitorblock name=\"Monitors\"/>");
  doc.line(1, "</cpnet>");
  doc.line(0, "</workspaceElements>");
  return std::string(cpn_tools::kHeader) + doc.take();
}

// ---------------------------------------------------------------- XML reader

namespace {

/// Recursive-descent reader for the CPN ML subset written above.
class CpnMlParser {
 public:
  CpnMlParser(std::string text, const ColouredNet& net) : text_(std::move(text)), s_(text_), net_(net) {}

  Expr expression(const ColourSet* context) {
    Expr e = binary(1, context);
    return e;
  }

  Multiset multiset(const ColourSet* context) {
    Multiset m;
    skip();
    if (done()) return m;
    do {
      const std::int64_t n = number();
      expect('`');
      const Expr e = expression(context);
      m[evaluate(e, Binding{})] += static_cast<std::uint32_t>(n);
    } while (accept("++"));
    finish();
    return m;
  }

  Expr guard() {
    expect('[');
    Expr e = expression(nullptr);
    expect(']');
    finish();
    return e;
  }

  void finish() {
    skip();
    if (!done()) fail("end of text");
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error("CPN ML: expected " + what + " at offset " + std::to_string(i_) + " in '" + std::string(s_) + "'");
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool done() const { return i_ >= s_.size(); }
  bool accept(std::string_view tok) {
    skip();
    if (s_.substr(i_, tok.size()) != tok) return false;
    i_ += tok.size();
    return true;
  }
  void expect(char c) {
    if (!accept(std::string_view(&c, 1))) fail(std::string("'") + c + "'");
  }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }
  bool peek_word(std::string_view w) {
    skip();
    return s_.substr(i_, w.size()) == w && (i_ + w.size() >= s_.size() || !ident_char(s_[i_ + w.size()]));
  }
  bool accept_word(std::string_view w) {
    if (!peek_word(w)) return false;
    i_ += w.size();
    return true;
  }
  std::int64_t number() {
    skip();
    const bool neg = i_ < s_.size() && s_[i_] == '~';
    if (neg) ++i_;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s_.data() + i_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("integer");
    i_ = static_cast<std::size_t>(p - s_.data());
    return neg ? -v : v;
  }

  std::optional<BinaryOp> binop() {
    skip();
    if (peek_word("orelse")) return BinaryOp::Or;
    if (peek_word("andalso")) return BinaryOp::And;
    static const std::vector<std::pair<std::string_view, BinaryOp>> ops = {
        {"<>", BinaryOp::Ne}, {"<=", BinaryOp::Le}, {">=", BinaryOp::Ge}, {"=", BinaryOp::Eq},
        {"<", BinaryOp::Lt},  {">", BinaryOp::Gt},  {"+", BinaryOp::Add}, {"-", BinaryOp::Sub},
        {"*", BinaryOp::Mul}};
    for (const auto& [tok, op] : ops) {
      if (s_.substr(i_, tok.size()) == tok) {
        // `++` separates multiset terms
        if (tok == "+" && s_.substr(i_, 2) == "++") return std::nullopt;
        return op;
      }
    }
    return std::nullopt;
  }

  std::size_t op_width(BinaryOp op) const {
    switch (op) {
      case BinaryOp::Or:
        return 6;
      case BinaryOp::And:
        return 7;
      case BinaryOp::Ne:
      case BinaryOp::Le:
      case BinaryOp::Ge:
        return 2;
      default:
        return 1;
    }
  }

  Expr binary(int min_prec, const ColourSet* context) {
    Expr lhs = unary(context);
    while (auto op = binop()) {
      const int p = precedence(*op);
      if (p < min_prec) break;
      i_ += op_width(*op);
      Expr rhs = binary(p + 1, nullptr);
      lhs = Expr::binary(*op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr unary(const ColourSet* context) {
    skip();
    if (accept_word("not")) return Expr::unary(UnaryOp::Not, unary(nullptr));
    if (i_ < s_.size() && s_[i_] == '~') {
      if (i_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_ + 1]))) return Expr::integer(number());
      ++i_;
      return Expr::unary(UnaryOp::Neg, unary(nullptr));
    }
    return atom(context);
  }

  Expr atom(const ColourSet* context) {
    skip();
    if (done()) fail("expression");
    const char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c))) return Expr::integer(number());
    if (c == '(') {
      ++i_;
      if (accept(")")) return Expr::unit();
      std::vector<Expr> items{expression(nullptr)};
      while (accept(",")) items.push_back(expression(nullptr));
      expect(')');
      return items.size() == 1 ? items[0] : Expr::tuple(std::move(items));
    }
    if (c == '{') return record(context);
    if (!ident_char(c)) fail("expression");
    const std::size_t start = i_;
    while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
    const std::string word(s_.substr(start, i_ - start));
    if (word == "true") return Expr::boolean(true);
    if (word == "false") return Expr::boolean(false);
    for (const auto& v : net_.variables) {
      if (v.name == word) return Expr::var(word);
    }
    for (const auto& decl : net_.colours) {
      const auto& vals = decl.set.values;
      if (std::find(vals.begin(), vals.end(), word) != vals.end()) return Expr::symbol(word);
    }
    throw Error("CPN ML: '" + word + "' is neither a declared variable nor an enumeration constant");
  }

  Expr record(const ColourSet* context) {
    if (!context || context->fields.empty()) fail("a record only where a record colour set is expected");
    expect('{');
    std::map<std::string, Expr> fields;
    do {
      skip();
      const std::size_t start = i_;
      while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
      std::string label(s_.substr(start, i_ - start));
      expect('=');
      fields.emplace(std::move(label), expression(nullptr));
    } while (accept(","));
    expect('}');
    std::vector<Expr> items;
    for (const auto& f : context->fields) {
      auto it = fields.find(f);
      if (it == fields.end()) fail("record field '" + f + "'");
      items.push_back(it->second);
    }
    if (fields.size() != context->fields.size()) fail("record with fields of the colour set only");
    return Expr::tuple(std::move(items));
  }

  std::string text_;
  std::string_view s_;
  const ColouredNet& net_;
  std::size_t i_ = 0;
};

const pt::ptree& child(const pt::ptree& node, const std::string& key, const std::string& where) {
  auto it = node.find(key);
  if (it == node.not_found()) throw Error("CPN XML: <" + where + "> has no <" + key + ">");
  return it->second;
}

std::string attr(const pt::ptree& node, const std::string& key, const std::string& where) {
  auto v = node.get_optional<std::string>("<xmlattr>." + key);
  if (!v) throw Error("CPN XML: <" + where + "> has no attribute '" + key + "'");
  return *v;
}

std::string annotation_text(const pt::ptree& node, const std::string& key) {
  auto it = node.find(key);
  if (it == node.not_found()) return "";
  return it->second.get<std::string>("text", "");
}

ColourSet read_colour(const pt::ptree& c, const std::string& name) {
  if (c.count("unit")) return ColourSet::unit();
  if (c.count("int")) return ColourSet::integer();
  if (auto e = c.find("enum"); e != c.not_found()) {
    std::vector<std::string> values;
    for (const auto& [k, v] : e->second) {
      if (k == "id") values.push_back(v.data());
    }
    return ColourSet::enumeration(std::move(values));
  }
  if (auto p = c.find("product"); p != c.not_found()) {
    std::vector<std::string> comps;
    for (const auto& [k, v] : p->second) {
      if (k == "id") comps.push_back(v.data());
    }
    return ColourSet::product(std::move(comps));
  }
  if (auto r = c.find("record"); r != c.not_found()) {
    std::vector<std::string> comps, fields;
    for (const auto& [k, v] : r->second) {
      if (k != "recordfield") continue;
      std::vector<std::string> ids;
      for (const auto& [kk, vv] : v) {
        if (kk == "id") ids.push_back(vv.data());
      }
      if (ids.size() != 2) throw Error("CPN XML: malformed record field in colour set '" + name + "'");
      fields.push_back(ids[0]);
      comps.push_back(ids[1]);
    }
    return ColourSet::product(std::move(comps), std::move(fields));
  }
  throw Error("CPN XML: unsupported colour set declaration '" + name + "'");
}

std::string trimmed(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ColouredNet parse_cpn_xml(std::string_view text) {
  pt::ptree doc;
  std::istringstream in{std::string(text)};
  try {
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("malformed CPN XML: " + e.message(), e.line(), 1);
  }
  const pt::ptree& cpnet = child(child(doc, "workspaceElements", "document"), "cpnet", "workspaceElements");
  ColouredNet net;

  for (const auto& [k, block] : child(cpnet, "globbox", "cpnet")) {
    if (k != "block") continue;
    for (const auto& [kind, decl] : block) {
      if (kind == "color") {
        const std::string name = decl.get<std::string>("id");
        net.colours.push_back({name, read_colour(decl, name)});
      } else if (kind == "var") {
        net.variables.push_back({decl.get<std::string>("id"), child(decl, "type", "var").get<std::string>("id")});
      }
    }
  }

  const pt::ptree& page = child(cpnet, "page", "cpnet");
  net.name = page.get<std::string>("pageattr.<xmlattr>.name", "");
  for (const auto& [k, node] : page) {
    if (k == "place") {
      PlaceDef p;
      p.id = attr(node, "id", "place");
      p.name = node.get<std::string>("text", "");
      p.colour = trimmed(annotation_text(node, "type"));
      const ColourDecl* colour = net.find_colour(p.colour);
      if (!colour) throw Error("CPN XML: place '" + p.id + "' has unknown colour set '" + p.colour + "'");
      p.initial_marking = CpnMlParser(annotation_text(node, "initmark"), net).multiset(&colour->set);
      net.places.push_back(std::move(p));
    } else if (k == "trans") {
      TransDef t;
      t.id = attr(node, "id", "trans");
      t.name = node.get<std::string>("text", "");
      const std::string cond = trimmed(annotation_text(node, "cond"));
      if (!cond.empty()) t.guard = CpnMlParser(cond, net).guard();
      for (const auto& [ck, cv] : node) {
        if (ck != "<xmlcomment>") continue;
        const std::string c = trimmed(cv.data());
        const std::string prefix = "observable: ";
        if (c.starts_with(prefix)) t.observable_label = c.substr(prefix.size());
      }
      net.transitions.push_back(std::move(t));
    }
  }
  std::map<std::string_view, const ColourSet*> place_colour;
  for (const auto& p : net.places) place_colour.emplace(p.id, &net.find_colour(p.colour)->set);
  for (const auto& [k, node] : page) {
    if (k != "arc") continue;
    ArcDef a;
    a.id = attr(node, "id", "arc");
    const std::string o = attr(node, "orientation", "arc");
    if (o == "PtoT") {
      a.orientation = Orientation::PtoT;
    } else if (o == "TtoP") {
      a.orientation = Orientation::TtoP;
    } else {
      throw Error("CPN XML: arc '" + a.id + "' has unsupported orientation '" + o + "'");
    }
    a.transition = attr(child(node, "transend", "arc"), "idref", "transend");
    a.place = attr(child(node, "placeend", "arc"), "idref", "placeend");
    auto colour = place_colour.find(a.place);
    if (colour == place_colour.end()) {
      throw Error("CPN XML: arc '" + a.id + "' references unknown place '" + a.place + "'");
    }
    CpnMlParser parser(annotation_text(node, "annot"), net);
    a.inscription = parser.expression(colour->second);
    parser.finish();
    net.arcs.push_back(std::move(a));
  }
  return net;
}

// ---------------------------------------------------------------- DOT

namespace {

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string emit_dot(const ColouredNet& input, const std::optional<Marking>& marking) {
  // the marking is indexed by the caller's place order
  std::map<std::string, const Multiset*> tokens;
  if (marking) {
    for (std::size_t i = 0; i < input.places.size() && i < marking->size(); ++i) {
      tokens[input.places[i].id] = &(*marking)[i];
    }
  }
  const ColouredNet net = canonical(input);
  std::ostringstream out;
  out << "digraph \"" << dot_escape(net.name) << "\" {\n";
  out << "  rankdir=LR;\n";
  for (const auto& p : net.places) {
    std::string label = p.name;
    if (auto it = tokens.find(p.id); it != tokens.end() && !it->second->empty()) {
      const std::size_t n = token_count(*it->second);
      label += "\n" + std::to_string(n) + (n == 1 ? " token: " : " tokens: ") + to_cpn_ml(*it->second);
    }
    out << "  \"" << dot_escape(p.id) << "\" [shape=ellipse,label=\"" << dot_escape(label) << "\"];\n";
  }
  for (const auto& t : net.transitions) {
    std::string label = t.name;
    if (t.guard) label += "\n[" + to_cpn_ml(*t.guard) + "]";
    out << "  \"" << dot_escape(t.id) << "\" [shape=box,label=\"" << dot_escape(label) << "\"];\n";
  }
  for (const auto& a : net.arcs) {
    const bool p2t = a.orientation == Orientation::PtoT;
    out << "  \"" << dot_escape(p2t ? a.place : a.transition) << "\" -> \"" << dot_escape(p2t ? a.transition : a.place)
        << "\" [label=\"" << dot_escape(to_string(a.inscription, kCpnMlSyntax)) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace smd2cpn
