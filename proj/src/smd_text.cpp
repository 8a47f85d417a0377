#include "smd2cpn/smd_text.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <set>

namespace smd2cpn {

namespace {

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

const std::set<std::string> kKeywords = {"machine", "var", "state", "final", "trans", "initial",
                                         "history", "entry", "exit", "do", "on", "if", "int",
                                         "and", "or", "not", "true", "false"};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto is_alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  static const std::array<std::string_view, 8> two = {"->", ":=", "==", "!=", "<=", ">=", "&&", "||"};
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const std::size_t l = line, k = col, start = i;
    if (is_alpha(c)) {
      while (i < src.size() && (is_alpha(src[i]) || is_digit(src[i]))) advance(1);
      out.push_back({Tok::Ident, std::string(src.substr(start, i - start)), l, k});
      continue;
    }
    if (is_digit(c)) {
      while (i < src.size() && is_digit(src[i])) advance(1);
      out.push_back({Tok::Int, std::string(src.substr(start, i - start)), l, k});
      continue;
    }
    const auto pair = src.substr(i, 2);
    if (std::find(two.begin(), two.end(), pair) != two.end()) {
      advance(2);
      out.push_back({Tok::Punct, std::string(pair), l, k});
      continue;
    }
    if (std::string_view("{}();:,.+-*/<>=").find(c) != std::string_view::npos) {
      advance(1);
      out.push_back({Tok::Punct, std::string(1, c), l, k});
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", l, k);
  }
  out.push_back({Tok::End, "end of input", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  StateMachineModel machine() {
    expect_word("machine");
    m_.name = ident("machine name");
    expect("{");
    while (!at("}")) {
      if (peek().kind == Tok::End) fail("'}' closing machine '" + m_.name + "'");
      if (at_word("var")) {
        variable();
      } else if (at_word("state")) {
        state(std::nullopt);
      } else if (at_word("final")) {
        final_state(std::nullopt);
      } else if (at_word("trans")) {
        transition();
      } else {
        fail("'var', 'state', 'final', 'trans' or '}'");
      }
    }
    expect("}");
    if (peek().kind != Tok::End) fail("end of input");
    return std::move(m_);
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(std::string_view p) const { return peek().kind == Tok::Punct && peek().text == p; }
  bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    const std::string found = t.kind == Tok::End ? t.text : "'" + t.text + "'";
    throw ParseError("expected " + expected + " but found " + found, t.line, t.column);
  }

  void expect(std::string_view p) {
    if (!at(p)) fail("'" + std::string(p) + "'");
    ++pos_;
  }
  void expect_word(std::string_view w) {
    if (!at_word(w)) fail("'" + std::string(w) + "'");
    ++pos_;
  }
  bool accept(std::string_view p) {
    if (!at(p)) return false;
    ++pos_;
    return true;
  }
  bool accept_word(std::string_view w) {
    if (!at_word(w)) return false;
    ++pos_;
    return true;
  }

  std::string ident(const std::string& what) {
    if (peek().kind != Tok::Ident || kKeywords.count(peek().text)) fail(what);
    return toks_[pos_++].text;
  }

  std::int64_t integer_literal() {
    const bool neg = accept("-");
    if (peek().kind != Tok::Int) fail("integer literal");
    const Token& t = toks_[pos_];
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) throw ParseError("integer literal out of range", t.line, t.column);
    ++pos_;
    return neg ? -v : v;
  }

  void variable() {
    expect_word("var");
    VariableDecl v;
    v.name = ident("variable name");
    expect(":");
    expect_word("int");
    expect("=");
    v.initial = integer_literal();
    accept(";");
    m_.variables.push_back(std::move(v));
  }

  BehaviourDef behaviour(std::string id) {
    BehaviourDef b;
    b.id = std::move(id);
    b.label = ident("behaviour label");
    // `{ x := ...}` is an assignment block; `{ state ...}` is a state body
    if (at("{") && peek(1).kind == Tok::Ident && peek(2).kind == Tok::Punct && peek(2).text == ":=") {
      expect("{");
      do {
        Assignment a{ident("variable name"), Expr::integer(0)};
        expect(":=");
        a.value = expr();
        b.assignments.push_back(std::move(a));
      } while (accept(","));
      expect("}");
    }
    return b;
  }

  void state(const std::optional<std::string>& parent) {
    expect_word("state");
    StateNode s;
    s.name = ident("state name");
    s.parent = parent;
    std::set<std::string> seen;
    static const std::set<std::string> kAttrs = {"initial", "history", "entry", "exit", "do"};
    while (peek().kind == Tok::Ident && kAttrs.count(peek().text)) {
      const Token tok = peek();
      if (!seen.insert(tok.text).second) {
        throw ParseError("duplicate '" + tok.text + "' on state '" + s.name + "'", tok.line, tok.column);
      }
      ++pos_;
      if (tok.text == "initial") {
        s.is_initial = true;
      } else if (tok.text == "history") {
        s.has_history = true;
      } else if (tok.text == "entry") {
        s.entry = behaviour(s.name + ".entry");
      } else if (tok.text == "exit") {
        s.exit = behaviour(s.name + ".exit");
      } else {
        s.do_activity = behaviour(s.name + ".do");
      }
    }
    const std::string name = s.name;
    const std::size_t index = m_.states.size();
    m_.states.push_back(std::move(s));
    if (accept("{")) {
      m_.states[index].kind = StateKind::Composite;
      while (!at("}")) {
        if (at_word("state")) {
          state(name);
        } else if (at_word("final")) {
          final_state(name);
        } else {
          fail("'state', 'final' or '}' in state '" + name + "'");
        }
      }
      expect("}");
    }
    accept(";");
  }

  void final_state(const std::optional<std::string>& parent) {
    expect_word("final");
    StateNode f;
    f.name = final_state_name(parent.value_or(m_.name));
    f.parent = parent;
    f.kind = StateKind::Final;
    m_.states.push_back(std::move(f));
    accept(";");
  }

  void transition() {
    expect_word("trans");
    TransitionDef t;
    t.id = ident("transition id");
    expect(":");
    t.source = ident("source state");
    expect("->");
    t.target = ident("target state");
    if (accept(".")) {
      if (accept_word("H")) {
        t.to_history = true;
      } else if (accept_word("F")) {
        t.target = final_state_name(t.target);
      } else {
        fail("'H' or 'F'");
      }
    }
    if (accept_word("on")) t.trigger = ident("event name");
    if (accept_word("if")) {
      expect("(");
      t.guard = expr();
      expect(")");
    }
    if (accept("/")) t.effect = behaviour(t.id + ".effect");
    accept(";");
    m_.transitions.push_back(std::move(t));
  }

  // precedence climbing over: or < and < comparison < + - < *
  Expr expr() { return binary(1); }

  std::optional<BinaryOp> binary_op() const {
    static const std::map<std::string, BinaryOp> ops = {
        {"+", BinaryOp::Add}, {"-", BinaryOp::Sub}, {"*", BinaryOp::Mul},  {"==", BinaryOp::Eq},
        {"!=", BinaryOp::Ne}, {"<", BinaryOp::Lt},  {"<=", BinaryOp::Le},  {">", BinaryOp::Gt},
        {">=", BinaryOp::Ge}, {"&&", BinaryOp::And}, {"||", BinaryOp::Or}};
    const Token& t = peek();
    if (t.kind == Tok::Ident && t.text == "and") return BinaryOp::And;
    if (t.kind == Tok::Ident && t.text == "or") return BinaryOp::Or;
    if (t.kind != Tok::Punct) return std::nullopt;
    auto it = ops.find(t.text);
    if (it == ops.end()) return std::nullopt;
    return it->second;
  }

  Expr binary(int min_prec) {
    Expr lhs = unary();
    while (auto op = binary_op()) {
      const int p = precedence(*op);
      if (p < min_prec) break;
      ++pos_;
      Expr rhs = binary(p + 1);
      lhs = Expr::binary(*op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr unary() {
    if (accept_word("not")) return Expr::unary(UnaryOp::Not, unary());
    if (at("-")) {
      if (peek(1).kind == Tok::Int) return Expr::integer(integer_literal());
      ++pos_;
      return Expr::unary(UnaryOp::Neg, unary());
    }
    return primary();
  }

  Expr primary() {
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    if (peek().kind == Tok::Int) return Expr::integer(integer_literal());
    if (accept_word("true")) return Expr::boolean(true);
    if (accept_word("false")) return Expr::boolean(false);
    return Expr::var(ident("expression"));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  StateMachineModel m_;
};

// ---- printer ----

void print_behaviour(std::string& out, const BehaviourDef& b) {
  out += b.label;
  if (b.assignments.empty()) return;
  out += " { ";
  for (std::size_t i = 0; i < b.assignments.size(); ++i) {
    if (i) out += ", ";
    out += b.assignments[i].variable + " := " + to_string(b.assignments[i].value, kSmdlSyntax);
  }
  out += " }";
}

class Printer {
 public:
  explicit Printer(const StateMachineModel& m) : m_(m) {
    for (const auto& s : m.states) kids_[s.parent.value_or("")].push_back(&s);
    for (auto& [_, v] : kids_) {
      std::sort(v.begin(), v.end(), [](const StateNode* a, const StateNode* b) {
        const bool fa = a->kind == StateKind::Final, fb = b->kind == StateKind::Final;
        if (fa != fb) return fb;
        return a->name < b->name;
      });
    }
  }

  std::string run() {
    out_ = "machine " + m_.name + " {\n";
    bool section = false;
    auto vars = m_.variables;
    std::sort(vars.begin(), vars.end(), [](auto& a, auto& b) { return a.name < b.name; });
    for (const auto& v : vars) {
      out_ += "  var " + v.name + " : int = " + std::to_string(v.initial) + ";\n";
      section = true;
    }
    if (kids_.count("")) {
      if (section) out_ += "\n";
      region("", 1);
      section = true;
    }
    auto trans = m_.transitions;
    std::sort(trans.begin(), trans.end(), [](auto& a, auto& b) { return a.id < b.id; });
    if (!trans.empty() && section) out_ += "\n";
    for (const auto& t : trans) transition(t);
    out_ += "}\n";
    return std::move(out_);
  }

 private:
  void region(const std::string& owner, int depth) {
    auto it = kids_.find(owner);
    if (it == kids_.end()) return;
    for (const StateNode* s : it->second) state(*s, depth);
  }

  void state(const StateNode& s, int depth) {
    const std::string indent(2 * depth, ' ');
    if (s.kind == StateKind::Final) {
      out_ += indent + "final;\n";
      return;
    }
    out_ += indent + "state " + s.name;
    if (s.is_initial) out_ += " initial";
    if (s.has_history) out_ += " history";
    if (s.entry) {
      out_ += " entry ";
      print_behaviour(out_, *s.entry);
    }
    if (s.exit) {
      out_ += " exit ";
      print_behaviour(out_, *s.exit);
    }
    if (s.do_activity) {
      out_ += " do ";
      print_behaviour(out_, *s.do_activity);
    }
    if (s.kind == StateKind::Composite) {
      out_ += " {\n";
      region(s.name, depth + 1);
      out_ += indent + "}";
    }
    out_ += ";\n";
  }

  void transition(const TransitionDef& t) {
    out_ += "  trans " + t.id + " : " + t.source + " -> ";
    out_ += t.target;  // final targets are already spelled `X.F`
    if (t.to_history) out_ += ".H";
    if (t.trigger) out_ += " on " + *t.trigger;
    if (t.guard) out_ += " if (" + to_string(*t.guard, kSmdlSyntax) + ")";
    if (t.effect) {
      out_ += " / ";
      print_behaviour(out_, *t.effect);
    }
    out_ += ";\n";
  }

  const StateMachineModel& m_;
  std::map<std::string, std::vector<const StateNode*>> kids_;
  std::string out_;
};

}  // namespace

StateMachineModel parse_smdl(std::string_view text) { return Parser(text).machine(); }

StateMachineModel load_smdl(std::string_view text) {
  StateMachineModel m = parse_smdl(text);
  if (auto report = validate(m); !report.ok()) throw ValidationError(std::move(report));
  return m;
}

std::string print_smdl(const StateMachineModel& model) { return Printer(model).run(); }

}  // namespace smd2cpn
