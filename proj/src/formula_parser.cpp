/*
 * Copyright (c) 2026, The kbpforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#include "kbpforge/formula_parser.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <vector>

namespace kbpforge {

namespace {

enum class Tok { ident, number, symbol, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t col;
};

std::vector<Token> lex(std::string_view s) {
  static const char* kSymbols[] = {"<->", "->", "==", "!=", "<=", ">=", "(", ")", "[", "]",
                                   ",",   ".",  "!",  "&",  "|",  "<",  ">", "+", "-"};
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::ident, std::string(s.substr(i, j - i)), i});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::number, std::string(s.substr(i, j - i)), i});
      i = j;
    } else {
      bool found = false;
      for (const char* sym : kSymbols) {
        const std::string_view v(sym);
        if (s.substr(i, v.size()) == v) {
          out.push_back({Tok::symbol, std::string(v), i});
          i += v.size();
          found = true;
          break;
        }
      }
      if (!found) throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
  }
  out.push_back({Tok::end, "", s.size()});
  return out;
}

using IntFn = std::function<int(const AtomContext&)>;

struct IntExpr {
  IntFn fn;
  std::string text;
};

const std::set<std::string> kReserved = {"true", "false", "forall", "exists", "gfp", "K", "B",
                                         "EN",   "CN",    "n",      "t",      "k",   "time",
                                         "horizon", "bot"};

class Parser {
 public:
  Parser(std::string_view text, const InstanceParams& params)
      : toks_(lex(text)), params_(params) {}

  FormulaPtr parse() {
    FormulaPtr f = formula();
    if (peek().kind != Tok::end) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool is(std::string_view sym) const {
    return (peek().kind == Tok::symbol || peek().kind == Tok::ident) && peek().text == sym;
  }
  bool accept(std::string_view sym) {
    if (!is(sym)) return false;
    ++pos_;
    return true;
  }
  void expect(std::string_view sym) {
    if (!accept(sym)) fail("expected '" + std::string(sym) + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().col); }

  FormulaPtr formula() {
    FormulaPtr lhs = implication();
    while (accept("<->")) lhs = Formula::equivalence(lhs, implication());
    return lhs;
  }

  FormulaPtr implication() {
    FormulaPtr lhs = disjunction();
    if (accept("->")) return Formula::implication(lhs, implication());
    return lhs;
  }

  FormulaPtr disjunction() {
    std::vector<FormulaPtr> fs{conjunction()};
    while (accept("|")) fs.push_back(conjunction());
    return Formula::disjunction(std::move(fs));
  }

  FormulaPtr conjunction() {
    std::vector<FormulaPtr> fs{unary()};
    while (accept("&")) fs.push_back(unary());
    return Formula::conjunction(std::move(fs));
  }

  std::string binder() {
    if (peek().kind != Tok::ident) fail("expected a variable name");
    const Token& tok = next();
    if (kReserved.count(tok.text)) throw ParseError("'" + tok.text + "' is reserved", tok.col);
    expect(".");
    return tok.text;
  }

  FormulaPtr unary() {
    if (accept("!")) return Formula::negation(unary());
    if (accept("K")) {
      const AgentId i = bracket_agent();
      return Formula::knows(i, unary());
    }
    if (accept("B")) {
      const AgentId i = bracket_agent();
      return Formula::believes(i, unary());
    }
    if (accept("EN")) return Formula::everyone(unary());
    if (accept("CN")) return Formula::common(unary());
    if (accept("gfp")) {
      const std::size_t col = toks_[pos_].col;
      const std::string x = binder();
      fixvars_.push_back(x);
      FormulaPtr body = formula();
      fixvars_.pop_back();
      if (!occurs_only_positively(*body, x))
        throw ParseError("fixpoint variable " + x + " occurs negatively", col);
      return Formula::gfp(x, body);
    }
    if (is("forall") || is("exists")) {
      const bool all = next().text == "forall";
      const std::string x = binder();
      const std::size_t body_start = pos_;
      std::vector<FormulaPtr> parts;
      for (AgentId a = 0; a < params_.n; ++a) {
        pos_ = body_start;
        agents_[x].push_back(a);
        parts.push_back(formula());
        agents_[x].pop_back();
      }
      if (params_.n == 0) fail("no agents to quantify over");
      return all ? Formula::conjunction(std::move(parts)) : Formula::disjunction(std::move(parts));
    }
    return primary();
  }

  FormulaPtr primary() {
    if (accept("(")) {
      FormulaPtr f = formula();
      expect(")");
      return f;
    }
    if (accept("true")) return Formula::constant(true);
    if (accept("false")) return Formula::constant(false);
    if (peek().kind == Tok::ident) {
      const std::string& name = peek().text;
      for (const std::string& v : fixvars_)
        if (v == name) {
          ++pos_;
          return Formula::variable(name);
        }
      if (name == "exists_vote") {
        ++pos_;
        expect("(");
        const Value v = value();
        expect(")");
        return atoms::exists_vote(v);
      }
      if (name == "in_n" || name == "decided") {
        ++pos_;
        expect("(");
        const AgentId a = agent();
        expect(")");
        return name == "in_n" ? atoms::in_nonfaulty(a) : atoms::decided(a);
      }
      if (name == "decision" || name == "jdecided") {
        const bool just = name == "jdecided";
        ++pos_;
        expect("(");
        const AgentId a = agent();
        expect(",");
        const Value v = value();
        expect(")");
        return just ? atoms::just_decided(a, v) : atoms::decision_is(a, v);
      }
      if (name == "deciding") {
        ++pos_;
        expect("(");
        const AgentId a = agent();
        if (accept(",")) {
          const Value v = value();
          expect(")");
          return atoms::deciding(a, v);
        }
        expect(")");
        return atoms::deciding_any(a);
      }
    }
    return comparison();
  }

  FormulaPtr comparison() {
    IntExpr lhs = int_expr();
    static const char* kOps[] = {"==", "!=", "<=", ">=", "<", ">"};
    std::string op;
    for (const char* o : kOps)
      if (accept(o)) {
        op = o;
        break;
      }
    if (op.empty()) fail("expected a comparison operator");
    IntExpr rhs = int_expr();
    IntFn l = lhs.fn, r = rhs.fn;
    return Formula::atom(lhs.text + op + rhs.text, [l, r, op](const AtomContext& c) {
      return compare_ints(l(c), op, r(c));
    });
  }

  IntExpr int_expr() {
    IntExpr acc = int_term();
    while (is("+") || is("-")) {
      const bool plus = next().text == "+";
      IntExpr rhs = int_term();
      IntFn a = acc.fn, b = rhs.fn;
      acc.fn = plus ? IntFn([a, b](const AtomContext& c) { return a(c) + b(c); })
                    : IntFn([a, b](const AtomContext& c) { return a(c) - b(c); });
      acc.text += (plus ? "+" : "-") + rhs.text;
    }
    return acc;
  }

  IntExpr int_term() {
    const Token& tok = peek();
    if (tok.kind == Tok::number) {
      ++pos_;
      const int v = std::stoi(tok.text);
      return {[v](const AtomContext&) { return v; }, tok.text};
    }
    if (accept("-")) {
      IntExpr e = int_term();
      IntFn f = e.fn;
      return {[f](const AtomContext& c) { return -f(c); }, "-" + e.text};
    }
    if (tok.kind != Tok::ident) fail("expected an integer expression");
    const std::string name = tok.text;
    ++pos_;
    const InstanceParams p = params_;
    if (name == "n") return {[p](const AtomContext&) { return p.n; }, "n"};
    if (name == "t") return {[p](const AtomContext&) { return p.t; }, "t"};
    if (name == "k") return {[p](const AtomContext&) { return p.k; }, "k"};
    if (name == "horizon") return {[p](const AtomContext&) { return p.horizon; }, "horizon"};
    if (name == "bot") return {[](const AtomContext&) { return kNoValue; }, "bot"};
    if (name == "time") return {[](const AtomContext& c) { return c.layer; }, "time"};
    if (!is("(")) {
      pos_--;
      fail("unknown name '" + name + "'");
    }
    expect("(");
    const AgentId a = agent();
    std::optional<int> index;
    if (accept(",")) {
      // Range is checked per variable by the lookup below.
      if (peek().kind != Tok::number) fail("expected an index");
      index = std::stoi(peek().text);
      ++pos_;
    }
    expect(")");
    if (name == "vote") {
      if (index) fail("vote takes one argument");
      return {[a](const AtomContext& c) { return c.state.votes.at(a); },
              "vote(" + std::to_string(a) + ")"};
    }
    std::string var = name == "w" ? "values_received" : name;
    if (index) var += "[" + std::to_string(*index) + "]";
    // Reject names the exchange does not have before any evaluation.
    if (!local_variable(params_, init_local(params_, 0, 0), var))
      throw ParseError("exchange " + std::string(to_string(params_.exchange)) +
                           " has no local variable '" + var + "'",
                       tok.col);
    const std::string text = var + "@" + std::to_string(a);
    return {[p, a, var](const AtomContext& c) {
              return *local_variable(p, c.state.locals.at(a), var);
            },
            text};
  }

  AgentId bracket_agent() {
    expect("[");
    const AgentId a = agent();
    expect("]");
    return a;
  }

  AgentId agent() {
    const Token& tok = peek();
    AgentId a = -1;
    if (tok.kind == Tok::number) {
      a = std::stoi(tok.text);
    } else if (tok.kind == Tok::ident) {
      auto it = agents_.find(tok.text);
      if (it == agents_.end() || it->second.empty()) fail("unbound agent variable '" + tok.text + "'");
      a = it->second.back();
    } else {
      fail("expected an agent");
    }
    if (a < 0 || a >= params_.n) fail("agent " + std::to_string(a) + " out of range");
    ++pos_;
    return a;
  }

  Value value() {
    const Token& tok = peek();
    if (tok.kind != Tok::number) fail("expected a value");
    const int v = std::stoi(tok.text);
    if (v >= params_.k) fail("value " + std::to_string(v) + " out of range");
    ++pos_;
    return v;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  InstanceParams params_;
  std::map<std::string, std::vector<AgentId>> agents_;
  std::vector<std::string> fixvars_;
};

}  // namespace

FormulaPtr parse_formula(std::string_view text, const InstanceParams& params) {
  return Parser(text, params).parse();
}

}  // namespace kbpforge
