#include "probkg/query/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>

#include "probkg/dist/distribution.hpp"
#include "probkg/util/error.hpp"

namespace probkg::query {

namespace {

struct Token {
  enum class Kind { End, Word, Var, Iri, Number, String, Punct };
  Kind kind = Kind::End;
  std::string text;  // word (upper-cased), var name, IRI, number lexical, punct
  kg::Term term;     // String and Number
  std::size_t line = 1;
  std::size_t col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip();
      Token t;
      t.line = line_;
      t.col = col();
      if (pos_ >= s_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = s_[pos_];
      if (c == '?') {
        ++pos_;
        t.kind = Token::Kind::Var;
        t.text = ident();
        if (t.text.empty()) error("expected variable name");
      } else if (c == '<' && looks_like_iri()) {
        t.kind = Token::Kind::Iri;
        const std::size_t end = s_.find('>', pos_);
        t.text = std::string(s_.substr(pos_ + 1, end - pos_ - 1));
        pos_ = end + 1;
      } else if (c == '"') {
        t.kind = Token::Kind::String;
        t.term = string_literal();
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
        t.kind = Token::Kind::Number;
        t.term = number();
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        t.kind = Token::Kind::Word;
        t.text = ident();
        std::transform(t.text.begin(), t.text.end(), t.text.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
      } else {
        t.kind = Token::Kind::Punct;
        static constexpr std::string_view two[] = {"<=", ">=", "!=", "&&", "||"};
        t.text = std::string(1, c);
        for (auto op : two)
          if (s_.substr(pos_, 2) == op) t.text = std::string(op);
        static constexpr std::string_view single = "{}().,;<>=!+-*/";
        if (t.text.size() == 1 && single.find(c) == std::string_view::npos)
          error(std::string("unexpected character '") + c + "'");
        pos_ += t.text.size();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  std::size_t col() const { return pos_ - line_start_ + 1; }

  [[noreturn]] void error(const std::string& what) const { throw Error(Errc::Syntax, what, line_, col()); }

  void skip() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '\n') {
        ++pos_;
        ++line_;
        line_start_ = pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  // '<' starts an IRI when a '>' follows before any whitespace.
  bool looks_like_iri() const {
    if (pos_ + 1 >= s_.size()) return false;
    const char next = s_[pos_ + 1];
    if (next == '=' || std::isspace(static_cast<unsigned char>(next))) return false;
    for (std::size_t i = pos_ + 1; i < s_.size(); ++i) {
      if (s_[i] == '>') return true;
      if (std::isspace(static_cast<unsigned char>(s_[i])) || s_[i] == '"' || s_[i] == '<') return false;
    }
    return false;
  }

  std::string ident() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  kg::Term number() {
    const std::size_t start = pos_;
    bool decimal = false, exponent = false;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.' && pos_ + 1 < s_.size() &&
        std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
      decimal = true;
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        exponent = true;
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    std::string lex(s_.substr(start, pos_ - start));
    const std::string_view dt = exponent ? kg::kXsdDouble : decimal ? kg::kXsdDecimal : kg::kXsdInteger;
    return kg::make_literal(std::move(lex), std::string(dt));
  }

  kg::Term string_literal() {
    ++pos_;
    std::string lex;
    while (true) {
      if (pos_ >= s_.size() || s_[pos_] == '\n') error("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= s_.size()) error("dangling escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': lex += '\n'; break;
          case 't': lex += '\t'; break;
          case 'r': lex += '\r'; break;
          case '"': lex += '"'; break;
          case '\\': lex += '\\'; break;
          default: error(std::string("unknown escape \\") + e);
        }
      } else {
        lex += c;
      }
    }
    if (s_.substr(pos_, 3) == "^^<") {
      pos_ += 3;
      const std::size_t end = s_.find('>', pos_);
      if (end == std::string_view::npos) error("unterminated datatype IRI");
      std::string dt(s_.substr(pos_, end - pos_));
      pos_ = end + 1;
      if (dt == kg::kDistDatatype) {
        try {
          return kg::make_dist(dist::parse_distribution(lex));
        } catch (const Error& e) {
          error(e.what());
        }
      }
      return kg::make_literal(std::move(lex), std::move(dt));
    }
    if (pos_ < s_.size() && s_[pos_] == '@') {
      ++pos_;
      std::string lang = ident();
      if (lang.empty()) error("empty language tag");
      return kg::make_literal(std::move(lex), std::string(kg::kXsdString), std::move(lang));
    }
    return kg::make_literal(std::move(lex));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

std::optional<Builtin> builtin_of(const std::string& w) {
  static const std::pair<const char*, Builtin> table[] = {
      {"PGT", Builtin::Pgt},   {"PBETWEEN", Builtin::Pbetween}, {"CDF", Builtin::Cdf},
      {"JSD", Builtin::Jsd},   {"CONV", Builtin::Conv},         {"FUSE", Builtin::Fuse},
      {"MEAN", Builtin::Mean}, {"VAR", Builtin::Var}};
  for (const auto& [name, b] : table)
    if (w == name) return b;
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  QueryAst query() {
    QueryAst q;
    expect_word("SELECT");
    bool star = false;
    if (is_punct("*")) {
      ++i_;
      star = true;
    } else {
      while (peek().kind == Token::Kind::Var) q.select.push_back(t_[i_++].text);
      if (q.select.empty()) error("expected '?var' or '*' after SELECT");
    }
    expect_word("WHERE");
    q.where = group();
    if (peek().kind != Token::Kind::End) error("expected end of query");
    if (star) {
      const auto bound = possible_vars(q.where);
      q.select.assign(bound.begin(), bound.end());
    }
    return q;
  }

  ExprPtr standalone_expression() {
    ExprPtr e = expression();
    if (peek().kind != Token::Kind::End) error("expected end of expression");
    return e;
  }

 private:
  const Token& peek() const { return t_[i_]; }
  bool is_punct(std::string_view p) const { return peek().kind == Token::Kind::Punct && peek().text == p; }
  bool is_word(std::string_view w) const { return peek().kind == Token::Kind::Word && peek().text == w; }

  [[noreturn]] void error(const std::string& expected) const {
    throw Error(Errc::Syntax, expected, peek().line, peek().col);
  }
  void expect_punct(std::string_view p) {
    if (!is_punct(p)) error("expected '" + std::string(p) + "'");
    ++i_;
  }
  void expect_word(std::string_view w) {
    if (!is_word(w)) error("expected " + std::string(w));
    ++i_;
  }
  std::string expect_var() {
    if (peek().kind != Token::Kind::Var) error("expected variable");
    return t_[i_++].text;
  }

  static PatternPtr join(PatternPtr g, PatternPtr x) {
    if (g->kind == Pattern::Kind::Bgp && g->triples.empty()) return x;
    return make_binary(Pattern::Kind::Join, std::move(g), std::move(x));
  }

  static void check_bound(const ExprPtr& e, const PatternPtr& g) {
    const auto bound = possible_vars(g);
    for (const auto& v : expr_vars(e))
      if (!bound.count(v)) throw Error(Errc::UnboundVariable, "?" + v + " is not bound in this group");
  }

  PatternPtr group() {
    expect_punct("{");
    PatternPtr g = make_bgp({});
    std::vector<kg::TriplePattern> pending;
    std::vector<ExprPtr> filters;
    auto flush = [&] {
      if (pending.empty()) return;
      if (g->kind == Pattern::Kind::Bgp) {
        auto all = g->triples;
        all.insert(all.end(), pending.begin(), pending.end());
        g = make_bgp(std::move(all));
      } else {
        g = make_binary(Pattern::Kind::Join, g, make_bgp(pending));
      }
      pending.clear();
    };

    while (!is_punct("}")) {
      if (peek().kind == Token::Kind::End) error("expected '}'");
      if (is_word("FILTER")) {
        ++i_;
        expect_punct("(");
        filters.push_back(expression());
        expect_punct(")");
      } else if (is_word("BIND")) {
        ++i_;
        flush();
        expect_punct("(");
        ExprPtr e = expression();
        expect_word("AS");
        std::string v = expect_var();
        expect_punct(")");
        check_bound(e, g);
        if (possible_vars(g).count(v)) throw Error(Errc::Syntax, "BIND target ?" + v + " is already bound");
        g = make_bind(g, e, std::move(v));
      } else if (is_word("OPTIONAL") || is_word("MINUS")) {
        const auto kind = is_word("OPTIONAL") ? Pattern::Kind::Optional : Pattern::Kind::Minus;
        ++i_;
        flush();
        g = make_binary(kind, g, group());
      } else if (is_punct("{")) {
        flush();
        PatternPtr x = group();
        while (is_word("UNION")) {
          ++i_;
          x = make_binary(Pattern::Kind::Union, x, group());
        }
        g = join(g, x);
      } else if (is_word("SIMJOIN")) {
        ++i_;
        flush();
        expect_punct("(");
        std::string a = expect_var();
        expect_punct(",");
        std::string b = expect_var();
        expect_punct(",");
        expect_word("JSD");
        expect_punct(",");
        if (peek().kind != Token::Kind::Number) error("expected threshold");
        const double theta = *kg::numeric_value(t_[i_++].term);
        expect_punct(")");
        const auto bound = possible_vars(g);
        for (const auto* v : {&a, &b})
          if (!bound.count(*v)) throw Error(Errc::UnboundVariable, "?" + *v + " is not bound in this group");
        g = split_simjoin(g, std::move(a), std::move(b), theta);
      } else {
        pending.push_back(triple());
        if (is_punct(".")) ++i_;
      }
    }
    ++i_;
    flush();
    for (auto& f : filters) {
      check_bound(f, g);
      g = make_filter(g, f);
    }
    return g;
  }

  // Splits a BGP into the connected part holding ?b (right) and the rest
  // (left). When both variables share a component the right side is empty.
  static PatternPtr split_simjoin(const PatternPtr& g, std::string a, std::string b, double theta) {
    if (g->kind != Pattern::Kind::Bgp)
      return make_simjoin(g, make_bgp({}), std::move(a), std::move(b), theta);
    const auto& tps = g->triples;
    std::vector<char> in_b(tps.size(), 0);
    std::set<std::string> reach{b};
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t i = 0; i < tps.size(); ++i) {
        if (in_b[i]) continue;
        const auto vs = pattern_vars(tps[i]);
        if (std::any_of(vs.begin(), vs.end(), [&](const std::string& v) { return reach.count(v) > 0; })) {
          in_b[i] = 1;
          reach.insert(vs.begin(), vs.end());
          grew = true;
        }
      }
    }
    if (reach.count(a)) return make_simjoin(g, make_bgp({}), std::move(a), std::move(b), theta);
    std::vector<kg::TriplePattern> left, right;
    for (std::size_t i = 0; i < tps.size(); ++i) (in_b[i] ? right : left).push_back(tps[i]);
    return make_simjoin(make_bgp(std::move(left)), make_bgp(std::move(right)), std::move(a), std::move(b),
                        theta);
  }

  kg::PatternSlot slot(bool allow_literal) {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Var: ++i_; return kg::Variable{t.text};
      case Token::Kind::Iri: ++i_; return kg::make_iri(t.text);
      case Token::Kind::String:
      case Token::Kind::Number:
        if (!allow_literal) error("literal not allowed in this position");
        ++i_;
        return t.term;
      case Token::Kind::Punct:
        // Signed numeric literal.
        if (allow_literal && (t.text == "-" || t.text == "+") && t_[i_ + 1].kind == Token::Kind::Number) {
          auto lit = std::get<kg::Literal>(t_[i_ + 1].term);
          if (t.text == "-") lit.lexical = "-" + lit.lexical;
          i_ += 2;
          return kg::Term(std::move(lit));
        }
        error("expected term or variable");
      case Token::Kind::Word:
        if (allow_literal && (t.text == "TRUE" || t.text == "FALSE")) {
          ++i_;
          return kg::make_boolean(t.text == "TRUE");
        }
        [[fallthrough]];
      default: error("expected term or variable");
    }
  }

  kg::TriplePattern triple() {
    kg::TriplePattern tp;
    tp.s = slot(false);
    tp.p = slot(false);
    tp.o = slot(true);
    return tp;
  }

  ExprPtr expression() { return disjunction(); }

  ExprPtr disjunction() {
    ExprPtr e = conjunction();
    while (is_punct("||")) {
      ++i_;
      e = make_binary_expr("||", e, conjunction());
    }
    return e;
  }

  ExprPtr conjunction() {
    ExprPtr e = comparison();
    while (is_punct("&&")) {
      ++i_;
      e = make_binary_expr("&&", e, comparison());
    }
    return e;
  }

  ExprPtr comparison() {
    ExprPtr e = additive();
    for (std::string_view op : {"<=", ">=", "!=", "<", ">", "="}) {
      if (is_punct(op)) {
        ++i_;
        return make_binary_expr(std::string(op), e, additive());
      }
    }
    return e;
  }

  ExprPtr additive() {
    ExprPtr e = multiplicative();
    while (is_punct("+") || is_punct("-")) {
      std::string op = t_[i_++].text;
      e = make_binary_expr(op, e, multiplicative());
    }
    return e;
  }

  ExprPtr multiplicative() {
    ExprPtr e = unary();
    while (is_punct("*") || is_punct("/")) {
      std::string op = t_[i_++].text;
      e = make_binary_expr(op, e, unary());
    }
    return e;
  }

  ExprPtr unary() {
    if (is_punct("!") || is_punct("-")) {
      const bool neg = peek().text == "-";
      ++i_;
      auto e = std::make_shared<Expr>();
      e->kind = neg ? Expr::Kind::Neg : Expr::Kind::Not;
      e->args = {unary()};
      return e;
    }
    if (is_punct("+")) {
      ++i_;
      return unary();
    }
    return primary();
  }

  ExprPtr primary() {
    const Token& t = peek();
    if (is_punct("(")) {
      ++i_;
      ExprPtr e = expression();
      expect_punct(")");
      return e;
    }
    switch (t.kind) {
      case Token::Kind::Var: ++i_; return make_var(t.text);
      case Token::Kind::Iri: ++i_; return make_const(kg::make_iri(t.text));
      case Token::Kind::Number:
      case Token::Kind::String: ++i_; return make_const(t.term);
      case Token::Kind::Word: {
        if (t.text == "TRUE" || t.text == "FALSE") {
          ++i_;
          return make_const(kg::make_boolean(t.text == "TRUE"));
        }
        const auto b = builtin_of(t.text);
        if (!b) error("unknown function " + t.text);
        ++i_;
        expect_punct("(");
        std::vector<ExprPtr> args;
        if (!is_punct(")")) {
          args.push_back(expression());
          while (is_punct(",")) {
            ++i_;
            args.push_back(expression());
          }
        }
        expect_punct(")");
        if (args.size() != builtin_arity(*b))
          error(std::string(builtin_name(*b)) + " takes " + std::to_string(builtin_arity(*b)) + " arguments");
        return make_call(*b, std::move(args));
      }
      default: error("expected expression");
    }
  }

  std::vector<Token> t_;
  std::size_t i_ = 0;
};

}  // namespace

QueryAst parse_query(std::string_view text) { return Parser(Lexer(text).run()).query(); }

ExprPtr parse_expression(std::string_view text) {
  return Parser(Lexer(text).run()).standalone_expression();
}

}  // namespace probkg::query
