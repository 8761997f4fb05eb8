// Recursive-descent parser for the ASCII machine language.

#include <cctype>
#include <charconv>
#include <optional>
#include <set>

#include "bdead/machine.hpp"

namespace bdead::model {

namespace {

enum class Tok : std::uint8_t { Ident, Number, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

const std::set<std::string, std::less<>> kKeywords = {
    "MACHINE", "SETS",  "CONSTANTS", "AXIOMS", "VARIABLES", "INVARIANTS", "EVENTS",
    "END",     "ANY",   "WHEN",      "THEN",   "BEGIN",     "INITIALISATION", "skip",
    "or",      "not",   "div",       "mod",    "card",      "TRUE",       "FALSE",
    "INT",     "NAT",   "NAT1",      "BOOL",   "POW"};

// Longest match first.
const char* const kSymbols[] = {"<=>", "<=", "<:", "=>", "/=", "/:", "/\\", "\\/", ">=", ":=", "..",
                                "||",  "<",  "=",  ":",  ".",  "&",  "#",   "!",   "(",  ")",  "{",
                                "}",   ",",  ";",  "+",  "-",  "*",  "/",   ">",   "\\"};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      const SourcePos start{line, col};
      const auto close = src.find("*/", i + 2);
      if (close == std::string_view::npos) throw ParseError("unterminated comment", start);
      advance(close + 2 - i);
      continue;
    }
    const SourcePos pos{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_' || src[j] == '\''))
        ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const char* sym : kSymbols) {
      const std::string_view s(sym);
      if (src.substr(i, s.size()) == s) {
        out.push_back({Tok::Symbol, std::string(s), pos});
        advance(s.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", pos);
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

bool is_relop(const Token& t) {
  if (t.kind != Tok::Symbol) return false;
  static const std::set<std::string, std::less<>> ops = {"=", "/=", "<", "<=", ">", ">=", ":", "/:", "<:"};
  return ops.contains(t.text);
}

// Operators that may follow a complete expression.
bool continues_expression(const Token& t) {
  if (is_relop(t)) return true;
  if (t.kind == Tok::Ident) return t.text == "div" || t.text == "mod";
  if (t.kind != Tok::Symbol) return false;
  static const std::set<std::string, std::less<>> ops = {"+", "-", "*", "/", "..", "\\/", "/\\", "\\"};
  return ops.contains(t.text);
}

Op relop(const std::string& s) {
  if (s == "=") return Op::Eq;
  if (s == "/=") return Op::Neq;
  if (s == "<") return Op::Lt;
  if (s == "<=") return Op::Le;
  if (s == ">") return Op::Gt;
  if (s == ">=") return Op::Ge;
  if (s == ":") return Op::In;
  if (s == "/:") return Op::NotIn;
  return Op::Subset;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Machine machine() {
    Machine m;
    expect_word("MACHINE");
    m.name = identifier("machine name");
    m.init.name = "INITIALISATION";
    if (accept_word("SETS")) {
      do {
        if (is_section_start()) break;
        m.sorts.push_back(sort_decl());
      } while (accept(";"));
    }
    if (accept_word("CONSTANTS")) m.constants = decl_list("constant");
    if (accept_word("AXIOMS")) m.axioms = labeled_list("axm");
    if (accept_word("VARIABLES")) m.variables = decl_list("variable");
    if (accept_word("INVARIANTS")) m.invariants = labeled_list("inv");
    if (accept_word("EVENTS")) {
      bool seen_init = false;
      while (!peek_word("END") && peek().kind != Tok::End) {
        const SourcePos pos = peek().pos;
        if (accept_word("INITIALISATION")) {
          if (seen_init) throw ParseError("duplicate INITIALISATION", pos);
          seen_init = true;
          expect("=");
          m.init = event_body("INITIALISATION", pos);
          if (!m.init.params.empty() || !m.init.guards.empty())
            throw ParseError("INITIALISATION cannot have parameters or guards", pos);
        } else {
          const std::string name = identifier("event name");
          expect("=");
          m.events.push_back(event_body(name, pos));
        }
        accept(";");
      }
    }
    expect_word("END");
    if (peek().kind != Tok::End) fail("trailing input after END");
    return m;
  }

  Pred standalone_predicate() {
    Pred p = predicate();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after predicate");
    return p;
  }

 private:
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, peek().pos); }

  bool peek_sym(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Symbol && peek(k).text == s;
  }
  bool peek_word(std::string_view w, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == w;
  }
  bool accept(std::string_view s) {
    if (!peek_sym(s)) return false;
    next();
    return true;
  }
  bool accept_word(std::string_view w) {
    if (!peek_word(w)) return false;
    next();
    return true;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "' but found '" + describe(peek()) + "'");
  }
  void expect_word(std::string_view w) {
    if (!accept_word(w)) fail("expected " + std::string(w) + " but found '" + describe(peek()) + "'");
  }
  static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

  bool is_section_start() const {
    for (const char* w : {"SETS", "CONSTANTS", "AXIOMS", "VARIABLES", "INVARIANTS", "EVENTS", "END"})
      if (peek_word(w)) return true;
    return false;
  }

  bool peek_identifier(std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && !kKeywords.contains(peek(k).text);
  }

  std::string identifier(const char* what) {
    if (!peek_identifier()) fail(std::string("expected ") + what + " but found '" + describe(peek()) + "'");
    return next().text;
  }

  SortDecl sort_decl() {
    SortDecl s;
    s.name = identifier("carrier set name");
    expect("=");
    expect("{");
    do {
      s.elements.push_back(identifier("set element"));
    } while (accept(","));
    expect("}");
    return s;
  }

  std::vector<Decl> decl_list(const char* what) {
    std::vector<Decl> out;
    if (!peek_identifier()) fail(std::string("expected at least one ") + what + " name");
    while (peek_identifier()) {
      const SourcePos pos = peek().pos;
      out.push_back({next().text, {}, pos});
      if (!accept(",")) continue;
      if (!peek_identifier()) fail(std::string("expected ") + what + " name after ','");
    }
    return out;
  }

  // Items are `label: pred` or bare predicates, separated by ';'.
  std::vector<LabeledPred> labeled_list(const std::string& prefix) {
    std::vector<LabeledPred> out;
    do {
      if (is_section_start() || peek_word("THEN") || peek_word("END")) break;
      LabeledPred item;
      if (peek_identifier() && peek_sym(":", 1)) {
        const std::size_t save = pos_;
        const std::string label = next().text;
        next();
        try {
          item.pred = predicate();
          if (!(peek_sym(";") || is_section_start() || peek_word("THEN") || peek().kind == Tok::End))
            fail("unexpected token");
          item.label = label;
        } catch (const ParseError&) {
          pos_ = save;
          item.pred = nullptr;
        }
      }
      if (!item.pred) item.pred = predicate();
      if (item.label.empty()) item.label = prefix + std::to_string(out.size() + 1);
      out.push_back(std::move(item));
    } while (accept(";"));
    if (out.empty()) fail("expected a predicate");
    return out;
  }

  Event event_body(std::string name, SourcePos pos) {
    Event e;
    e.name = std::move(name);
    e.pos = pos;
    bool closed = false;
    if (accept_word("ANY")) {
      do {
        const SourcePos ppos = peek().pos;
        Decl d{identifier("parameter name"), {}, ppos};
        if (accept(":")) d.type = type();
        e.params.push_back(std::move(d));
      } while (accept(","));
      if (accept_word("WHEN")) e.guards = guard_list();
      expect_word("THEN");
      closed = true;
    } else if (accept_word("WHEN")) {
      e.guards = guard_list();
      expect_word("THEN");
      closed = true;
    } else if (accept_word("BEGIN")) {
      closed = true;
    }
    e.actions = actions();
    if (closed) expect_word("END");
    return e;
  }

  std::vector<Pred> guard_list() {
    std::vector<Pred> out;
    for (auto& item : labeled_list("grd"))
      for (auto& c : conjuncts(item.pred)) out.push_back(c);
    return out;
  }

  std::vector<Assignment> actions() {
    std::vector<Assignment> out;
    if (accept_word("skip")) return out;
    do {
      const SourcePos pos = peek().pos;
      std::string var = identifier("assigned variable");
      expect(":=");
      out.push_back({std::move(var), expression(), pos});
    } while (accept("||"));
    return out;
  }

  Ty type() {
    if (accept_word("INT")) return Ty::integer();
    if (accept_word("BOOL")) return Ty::boolean();
    if (accept_word("POW")) {
      expect("(");
      Ty inner = type();
      expect(")");
      return Ty::set_of(std::move(inner));
    }
    return Ty::sort(identifier("type"));
  }

  // ---- predicates

  Pred predicate() {
    Pred left = implication();
    while (peek_sym("<=>")) {
      const SourcePos pos = next().pos;
      left = ast::make(Op::Equiv, {left, implication()}, {}, pos);
    }
    return left;
  }

  Pred implication() {
    Pred left = disjunction();
    if (peek_sym("=>")) {
      const SourcePos pos = next().pos;
      return ast::make(Op::Implies, {left, implication()}, {}, pos);
    }
    return left;
  }

  Pred disjunction() {
    const SourcePos pos = peek().pos;
    std::vector<Pred> parts{conjunction()};
    while (accept_word("or")) parts.push_back(conjunction());
    if (parts.size() == 1) return parts.front();
    return ast::make(Op::Or, std::move(parts), {}, pos);
  }

  Pred conjunction() {
    const SourcePos pos = peek().pos;
    std::vector<Pred> parts{unary_predicate()};
    while (accept("&")) parts.push_back(unary_predicate());
    if (parts.size() == 1) return parts.front();
    return ast::make(Op::And, std::move(parts), {}, pos);
  }

  Pred unary_predicate() {
    const SourcePos pos = peek().pos;
    if (accept_word("not")) return ast::make(Op::Not, {unary_predicate()}, {}, pos);
    if (peek_sym("#") || peek_sym("!")) {
      const Op q = next().text == "#" ? Op::Exists : Op::Forall;
      std::vector<Decl> binders;
      do {
        const SourcePos bpos = peek().pos;
        Decl d{identifier("bound variable"), {}, bpos};
        if (accept(":")) d.type = type();
        binders.push_back(std::move(d));
      } while (accept(","));
      expect(".");
      expect("(");
      Pred body = predicate();
      expect(")");
      for (auto it = binders.rbegin(); it != binders.rend(); ++it)
        body = ast::quantifier(q, it->name, it->type, body, it->pos);
      return body;
    }
    if (peek_sym("(")) {
      const std::size_t save = pos_;
      try {
        next();
        Pred p = predicate();
        expect(")");
        if (continues_expression(peek())) fail("parenthesised expression");
        return p;
      } catch (const ParseError&) {
        pos_ = save;
      }
    }
    if ((peek_word("TRUE") || peek_word("FALSE")) && !is_relop(peek(1))) {
      return ast::truth(next().text == "TRUE", pos);
    }
    Expr lhs = expression();
    if (!is_relop(peek())) fail("expected a relational operator but found '" + describe(peek()) + "'");
    const Token& op = next();
    Expr rhs = expression();
    return ast::make(relop(op.text), {lhs, rhs}, {}, op.pos);
  }

  // ---- expressions

  Expr expression() {
    Expr left = range_expression();
    for (;;) {
      Op op;
      if (peek_sym("\\/")) op = Op::Union;
      else if (peek_sym("/\\")) op = Op::Inter;
      else if (peek_sym("\\")) op = Op::Diff;
      else return left;
      const SourcePos pos = next().pos;
      left = ast::make(op, {left, range_expression()}, {}, pos);
    }
  }

  Expr range_expression() {
    Expr left = additive();
    if (peek_sym("..")) {
      const SourcePos pos = next().pos;
      return ast::make(Op::Interval, {left, additive()}, {}, pos);
    }
    return left;
  }

  Expr additive() {
    Expr left = multiplicative();
    for (;;) {
      Op op;
      if (peek_sym("+")) op = Op::Add;
      else if (peek_sym("-")) op = Op::Sub;
      else return left;
      const SourcePos pos = next().pos;
      left = ast::make(op, {left, multiplicative()}, {}, pos);
    }
  }

  Expr multiplicative() {
    Expr left = unary_expression();
    for (;;) {
      Op op;
      if (peek_sym("*")) op = Op::Mul;
      else if (peek_sym("/") || peek_word("div")) op = Op::Div;
      else if (peek_word("mod")) op = Op::Mod;
      else return left;
      const SourcePos pos = next().pos;
      left = ast::make(op, {left, unary_expression()}, {}, pos);
    }
  }

  Expr unary_expression() {
    const SourcePos pos = peek().pos;
    if (accept("-")) {
      if (peek().kind == Tok::Number) return ast::int_lit(-number(), pos);
      return ast::make(Op::Neg, {unary_expression()}, {}, pos);
    }
    return primary();
  }

  std::int64_t number() {
    const Token& t = next();
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) throw ParseError("integer literal out of range", t.pos);
    return v;
  }

  Expr primary() {
    const SourcePos pos = peek().pos;
    if (peek().kind == Tok::Number) return ast::int_lit(number(), pos);
    if (accept_word("TRUE")) return ast::bool_lit(true, pos);
    if (accept_word("FALSE")) return ast::bool_lit(false, pos);
    for (int k = 0; k < 3; ++k) {
      static const char* const names[] = {"INT", "NAT", "NAT1"};
      if (accept_word(names[k])) {
        auto n = std::make_shared<Node>();
        n->op = Op::IntSet;
        n->num = k;
        n->pos = pos;
        return n;
      }
    }
    if (accept_word("BOOL")) return ast::make(Op::BoolSet, {}, {}, pos);
    if (accept_word("card")) {
      expect("(");
      Expr e = expression();
      expect(")");
      return ast::make(Op::Card, {e}, {}, pos);
    }
    if (accept("{")) {
      if (accept("}")) return ast::make(Op::EmptySet, {}, {}, pos);
      std::vector<Expr> elems{expression()};
      while (accept(",")) elems.push_back(expression());
      expect("}");
      return ast::make(Op::SetLit, std::move(elems), {}, pos);
    }
    if (accept("(")) {
      Expr e = expression();
      expect(")");
      return e;
    }
    if (peek_identifier()) return ast::ident(next().text, {}, pos);
    fail("expected an expression but found '" + describe(peek()) + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Machine parse_machine(std::string_view text) { return Parser(text).machine(); }

Pred parse_predicate(std::string_view text) { return Parser(text).standalone_predicate(); }

}  // namespace bdead::model
