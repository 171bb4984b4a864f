// Copyright 2026 The Timely Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "timely/prism.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "timely/errors.hpp"

namespace timely::prism {

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

namespace {

std::string weight_text(const Rational& w) {
  if (auto dec = decimal_if_finite(w)) return *dec;
  return boost::multiprecision::numerator(w).str() + "/" +
         boost::multiprecision::denominator(w).str();
}

std::string constraint_text(const ptp::ClockConstraint& c) {
  if (c.right)
    throw Error("export: clock-difference constraints are outside the pta subset");
  return c.left + ptp::to_string(c.rel) + std::to_string(c.bound);
}

void append_guard_terms(const ptp::Assertion& a, std::vector<std::string>& out) {
  using Op = ptp::Assertion::Op;
  switch (a.op) {
    case Op::True: return;
    case Op::Cmp:
      if (a.rhs_is_var)
        throw Error("export: variable-to-variable comparisons are outside the pta subset");
      out.push_back(a.left + ptp::to_string(a.cmp) + std::to_string(a.rhs_const));
      return;
    case Op::And:
      for (const auto& c : a.children) append_guard_terms(c, out);
      return;
    case Op::Or:
    case Op::Not:
      throw Error("export: guards with disjunction or negation are outside the pta subset");
  }
}

}  // namespace

std::string export_prism(const ptp::Ptp& m) {
  auto diags = validate_ptp(m);
  if (!diags.empty()) throw Error("refusing to export invalid model:\n" + join_diagnostics(diags));
  for (const auto& v : m.variables)
    if (v.name == "s")
      throw Error("export: variable name 's' collides with the location encoding");
  for (const auto& c : m.clocks)
    if (c == "s") throw Error("export: clock name 's' collides with the location encoding");

  std::ostringstream out;
  out << "pta\n";
  out << "module M\n";
  out << "  s : [0.." << m.locations.size() - 1 << "]";
  if (m.initial != 0) out << " init " << m.initial;
  out << ";\n";
  for (const auto& v : m.variables) {
    out << "  " << v.name << " : [" << v.lo << ".." << v.hi << "]";
    std::int64_t init = m.initial_valuation.at(v.name);
    if (init != v.lo) out << " init " << init;
    out << ";\n";
  }
  for (const auto& c : m.clocks) out << "  " << c << " : clock;\n";

  std::vector<std::size_t> order(m.transitions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return m.transitions[a].source < m.transitions[b].source;
  });

  for (std::size_t ti : order) {
    const auto& t = m.transitions[ti];
    std::vector<std::string> terms{"s=" + std::to_string(t.source)};
    append_guard_terms(t.guard, terms);
    for (const auto& c : t.enabling.constraints) terms.push_back(constraint_text(c));
    out << "  [] ";
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (i) out << " & ";
      out << terms[i];
    }
    out << " -> ";
    for (std::size_t oi = 0; oi < t.outcomes.size(); ++oi) {
      const auto& o = t.outcomes[oi];
      if (oi) out << " + ";
      if (o.weight != 1) out << weight_text(o.weight) << ":";
      out << "(s'=" << o.target << ")";
      for (const auto& [var, expr] : o.update) {
        if (!expr.is_constant())
          throw Error("export: non-constant update of '" + var +
                      "' is outside the pta subset");
        out << "&(" << var << "'=" << expr.constant << ")";
      }
      for (const auto& clock : m.clocks)
        if (o.resets.count(clock)) out << "&(" << clock << "'=0)";
    }
    out << ";\n";
  }

  std::vector<int> with_invariant;
  for (const auto& [loc, zone] : m.invariants)
    if (!zone.universal()) with_invariant.push_back(loc);
  std::sort(with_invariant.begin(), with_invariant.end());
  if (!with_invariant.empty()) {
    out << "  invariant\n";
    for (std::size_t i = 0; i < with_invariant.size(); ++i) {
      const int loc = with_invariant[i];
      const auto& zone = m.invariants.at(loc);
      out << "    (s=" << loc << " => ";
      for (std::size_t ci = 0; ci < zone.constraints.size(); ++ci) {
        if (ci) out << " & ";
        out << constraint_text(zone.constraints[ci]);
      }
      out << ")";
      if (i + 1 < with_invariant.size()) out << " &";
      out << "\n";
    }
    out << "  endinvariant\n";
  }

  out << "endmodule\n";
  for (const auto& [label, locs] : m.labels) {
    out << "label \"" << label << "\" = ";
    bool first = true;
    for (int loc : locs) {
      if (!first) out << " | ";
      out << "s=" << loc;
      first = false;
    }
    out << ";\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Parse
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum class Type { Ident, Number, String, Symbol, End };
  Type type = Type::End;
  std::string text;
  int line = 0;
  int column = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, current_.line, current_.column);
  }

 private:
  void advance() {
    skip_ws_and_comments();
    current_ = Token{};
    current_.line = line_;
    current_.column = column_;
    if (pos_ >= text_.size()) {
      current_.type = Token::Type::End;
      return;
    }
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '_'))
        step();
      current_.type = Token::Type::Ident;
      current_.text = text_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) step();
      // A '.' starts a fraction only when not the '..' range symbol.
      if (pos_ + 1 < text_.size() && text_[pos_] == '.' && text_[pos_ + 1] != '.') {
        step();
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) step();
      }
      current_.type = Token::Type::Number;
      current_.text = text_.substr(start, pos_ - start);
      return;
    }
    if (c == '"') {
      step();
      std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') step();
      if (pos_ >= text_.size()) throw ParseError("unterminated string", line_, column_);
      current_.type = Token::Type::String;
      current_.text = text_.substr(start, pos_ - start);
      step();
      return;
    }
    for (const char* sym : {"->", "=>", "<=", ">=", "!=", ".."}) {
      if (text_.compare(pos_, 2, sym) == 0) {
        current_.type = Token::Type::Symbol;
        current_.text = sym;
        step();
        step();
        return;
      }
    }
    current_.type = Token::Type::Symbol;
    current_.text = std::string(1, c);
    step();
  }

  void skip_ws_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') step();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        step();
      } else {
        break;
      }
    }
  }

  void step() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  Token current_;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  ptp::Ptp parse() {
    Token header = expect(Token::Type::Ident);
    if (header.text != "pta")
      throw ParseError("only pta models are supported, got '" + header.text + "'", header.line,
                       header.column);
    parse_module();
    while (lex_.peek().type == Token::Type::Ident && lex_.peek().text == "label") parse_label();
    if (lex_.peek().type != Token::Type::End) {
      if (lex_.peek().text == "module")
        lex_.fail("unsupported construct: multiple modules");
      lex_.fail("unexpected trailing input '" + lex_.peek().text + "'");
    }

    auto diags = ptp::validate_ptp(model_);
    if (!diags.empty()) throw Error("parsed model is invalid:\n" + join_diagnostics(diags));
    return std::move(model_);
  }

 private:
  Token expect(Token::Type type, const std::string& what = "") {
    if (lex_.peek().type != type)
      lex_.fail("expected " + (what.empty() ? std::string("token") : what) + ", got '" +
                lex_.peek().text + "'");
    return lex_.next();
  }

  void expect_symbol(const std::string& sym) {
    if (lex_.peek().type != Token::Type::Symbol || lex_.peek().text != sym)
      lex_.fail("expected '" + sym + "', got '" + lex_.peek().text + "'");
    lex_.next();
  }

  bool accept_symbol(const std::string& sym) {
    if (lex_.peek().type == Token::Type::Symbol && lex_.peek().text == sym) {
      lex_.next();
      return true;
    }
    return false;
  }

  bool accept_ident(const std::string& word) {
    if (lex_.peek().type == Token::Type::Ident && lex_.peek().text == word) {
      lex_.next();
      return true;
    }
    return false;
  }

  std::int64_t integer() {
    bool negative = accept_symbol("-");
    Token t = expect(Token::Type::Number, "an integer");
    if (t.text.find('.') != std::string::npos)
      throw ParseError("expected an integer, got '" + t.text + "'", t.line, t.column);
    std::int64_t v = std::stoll(t.text);
    return negative ? -v : v;
  }

  Rational number() {
    Token t = expect(Token::Type::Number, "a number");
    Rational value = rational_from_decimal(t.text);
    if (accept_symbol("/")) {
      Token den = expect(Token::Type::Number, "a denominator");
      if (den.text.find('.') != std::string::npos)
        throw ParseError("fraction denominator must be an integer", den.line, den.column);
      value /= rational_from_decimal(den.text);
    }
    return value;
  }

  void parse_module() {
    Token kw = expect(Token::Type::Ident);
    if (kw.text != "module") {
      if (kw.text == "mdp" || kw.text == "dtmc" || kw.text == "ctmc" || kw.text == "pomdp")
        throw ParseError("only pta models are supported, got '" + kw.text + "'", kw.line,
                         kw.column);
      throw ParseError("expected 'module', got '" + kw.text + "'", kw.line, kw.column);
    }
    expect(Token::Type::Ident, "module name");

    // Declarations run until the first command, invariant block, or endmodule.
    while (lex_.peek().type == Token::Type::Ident && lex_.peek().text != "invariant" &&
           lex_.peek().text != "endmodule")
      parse_declaration();

    while (lex_.peek().type == Token::Type::Symbol && lex_.peek().text == "[") parse_command();

    if (accept_ident("invariant")) parse_invariant_block();

    Token end = expect(Token::Type::Ident);
    if (end.text != "endmodule")
      throw ParseError("expected 'endmodule', got '" + end.text + "'", end.line, end.column);
  }

  void parse_declaration() {
    Token name = expect(Token::Type::Ident, "a declaration name");
    expect_symbol(":");
    if (accept_ident("clock")) {
      expect_symbol(";");
      model_.clocks.push_back(name.text);
      clock_names_.insert(name.text);
      return;
    }
    expect_symbol("[");
    std::int64_t lo = integer();
    expect_symbol("..");
    std::int64_t hi = integer();
    expect_symbol("]");
    std::int64_t init = lo;
    if (accept_ident("init")) init = integer();
    expect_symbol(";");

    if (location_var_.empty()) {
      // The first integer variable encodes the locations.
      if (lo != 0)
        throw ParseError("location variable '" + name.text + "' must have range starting at 0",
                         name.line, name.column);
      location_var_ = name.text;
      for (std::int64_t i = 0; i <= hi; ++i)
        model_.locations.push_back(name.text + std::to_string(i));
      model_.initial = static_cast<int>(init);
    } else {
      model_.variables.push_back({name.text, lo, hi});
      model_.initial_valuation[name.text] = init;
      var_names_.insert(name.text);
    }
  }

  ptp::ClockConstraint::Rel relop() {
    for (const auto& [sym, rel] : {std::pair<const char*, ptp::ClockConstraint::Rel>{
                                       "<=", ptp::ClockConstraint::Rel::Le},
                                   {">=", ptp::ClockConstraint::Rel::Ge},
                                   {"<", ptp::ClockConstraint::Rel::Lt},
                                   {">", ptp::ClockConstraint::Rel::Gt}}) {
      if (accept_symbol(sym)) return rel;
    }
    lex_.fail("expected a clock relation");
  }

  // One comparison inside a command guard: on the location variable, a state
  // variable, or a clock.
  void parse_guard_atom(std::optional<int>& source, std::vector<ptp::Assertion>& var_terms,
                        ptp::Zone& enabling) {
    if (accept_symbol("(")) {
      parse_guard_conjunction(source, var_terms, enabling);
      expect_symbol(")");
      return;
    }
    Token name = expect(Token::Type::Ident, "a variable or clock name");
    if (name.text == location_var_) {
      if (!accept_symbol("="))
        throw ParseError("the location variable supports only '=' comparisons", name.line,
                         name.column);
      std::int64_t loc = integer();
      if (source.has_value())
        throw ParseError("guard constrains the location twice", name.line, name.column);
      if (loc < 0 || loc >= static_cast<std::int64_t>(model_.locations.size()))
        throw ParseError("location index out of range", name.line, name.column);
      source = static_cast<int>(loc);
      return;
    }
    if (clock_names_.count(name.text)) {
      auto rel = relop();
      std::int64_t bound = integer();
      enabling.constraints.push_back({name.text, std::nullopt, rel, bound});
      return;
    }
    if (var_names_.count(name.text)) {
      ptp::Assertion::CmpOp op;
      if (accept_symbol("<="))
        op = ptp::Assertion::CmpOp::Le;
      else if (accept_symbol(">="))
        op = ptp::Assertion::CmpOp::Ge;
      else if (accept_symbol("!="))
        op = ptp::Assertion::CmpOp::Ne;
      else if (accept_symbol("<"))
        op = ptp::Assertion::CmpOp::Lt;
      else if (accept_symbol(">"))
        op = ptp::Assertion::CmpOp::Gt;
      else if (accept_symbol("="))
        op = ptp::Assertion::CmpOp::Eq;
      else
        lex_.fail("expected a comparison operator");
      var_terms.push_back(ptp::Assertion::compare(name.text, op, integer()));
      return;
    }
    throw ParseError("unknown name '" + name.text + "' in guard", name.line, name.column);
  }

  void parse_guard_conjunction(std::optional<int>& source, std::vector<ptp::Assertion>& var_terms,
                               ptp::Zone& enabling) {
    parse_guard_atom(source, var_terms, enabling);
    while (accept_symbol("&")) parse_guard_atom(source, var_terms, enabling);
  }

  void parse_command() {
    Token open = expect(Token::Type::Symbol);
    if (lex_.peek().type == Token::Type::Ident)
      throw ParseError("unsupported construct: synchronization labels", open.line, open.column);
    expect_symbol("]");

    std::optional<int> source;
    std::vector<ptp::Assertion> var_terms;
    ptp::Zone enabling;
    parse_guard_conjunction(source, var_terms, enabling);
    if (!source.has_value())
      throw ParseError("command guard must pin the location variable", open.line, open.column);
    expect_symbol("->");

    ptp::Transition t;
    t.source = *source;
    t.guard = ptp::Assertion::conjunction(std::move(var_terms));
    t.enabling = std::move(enabling);
    t.outcomes.push_back(parse_branch());
    while (accept_symbol("+")) t.outcomes.push_back(parse_branch());
    expect_symbol(";");
    model_.transitions.push_back(std::move(t));
  }

  ptp::Outcome parse_branch() {
    ptp::Outcome o;
    o.weight = 1;
    if (lex_.peek().type == Token::Type::Number) {
      o.weight = number();
      expect_symbol(":");
    }
    bool target_seen = false;
    do {
      expect_symbol("(");
      Token name = expect(Token::Type::Ident, "an assignment target");
      expect_symbol("'");
      expect_symbol("=");
      std::int64_t value = integer();
      expect_symbol(")");
      if (name.text == location_var_) {
        if (target_seen)
          throw ParseError("branch assigns the location twice", name.line, name.column);
        if (value < 0 || value >= static_cast<std::int64_t>(model_.locations.size()))
          throw ParseError("target location index out of range", name.line, name.column);
        o.target = static_cast<int>(value);
        target_seen = true;
      } else if (clock_names_.count(name.text)) {
        if (value != 0)
          throw ParseError("clocks can only be reset to 0", name.line, name.column);
        o.resets.insert(name.text);
      } else if (var_names_.count(name.text)) {
        o.update[name.text] = ptp::LinearExpr{value, {}};
      } else {
        throw ParseError("assignment to unknown name '" + name.text + "'", name.line, name.column);
      }
    } while (accept_symbol("&"));
    if (!target_seen)
      lex_.fail("branch must assign the location variable");
    return o;
  }

  void parse_invariant_block() {
    // Conjunction of (s=k => clock-conjunction) clauses.
    bool first = true;
    while (first || accept_symbol("&")) {
      first = false;
      expect_symbol("(");
      Token name = expect(Token::Type::Ident, "the location variable");
      if (name.text != location_var_)
        throw ParseError("invariant clauses must start with the location variable", name.line,
                         name.column);
      expect_symbol("=");
      std::int64_t loc = integer();
      if (loc < 0 || loc >= static_cast<std::int64_t>(model_.locations.size()))
        throw ParseError("location index out of range in invariant", name.line, name.column);
      expect_symbol("=>");
      ptp::Zone zone;
      do {
        Token clock = expect(Token::Type::Ident, "a clock name");
        if (!clock_names_.count(clock.text))
          throw ParseError("invariant constrains unknown clock '" + clock.text + "'", clock.line,
                           clock.column);
        auto rel = relop();
        zone.constraints.push_back({clock.text, std::nullopt, rel, integer()});
      } while (accept_symbol("&"));
      expect_symbol(")");
      auto& existing = model_.invariants[static_cast<int>(loc)];
      for (auto& c : zone.constraints) existing.constraints.push_back(std::move(c));
    }
    Token end = expect(Token::Type::Ident);
    if (end.text != "endinvariant")
      throw ParseError("expected 'endinvariant', got '" + end.text + "'", end.line, end.column);
  }

  void parse_label() {
    expect(Token::Type::Ident);  // 'label'
    Token name = expect(Token::Type::String, "a quoted label name");
    expect_symbol("=");
    bool first = true;
    while (first || accept_symbol("|")) {
      first = false;
      Token var = expect(Token::Type::Ident, "the location variable");
      if (var.text != location_var_)
        throw ParseError("labels must be defined on the location variable", var.line, var.column);
      expect_symbol("=");
      std::int64_t loc = integer();
      if (loc < 0 || loc >= static_cast<std::int64_t>(model_.locations.size()))
        throw ParseError("location index out of range in label", var.line, var.column);
      model_.labels[name.text].insert(static_cast<int>(loc));
    }
    expect_symbol(";");
  }

  Lexer lex_;
  ptp::Ptp model_;
  std::string location_var_;
  std::set<std::string> clock_names_;
  std::set<std::string> var_names_;
};

}  // namespace

ptp::Ptp parse_prism(const std::string& text) { return Parser(text).parse(); }

}  // namespace timely::prism
