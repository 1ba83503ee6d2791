#include "probkg/kg/pkg_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "probkg/util/error.hpp"

namespace probkg::kg {

namespace {

class LineReader {
 public:
  LineReader(std::string_view s, std::size_t line) : s_(s), line_(line) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  [[noreturn]] void error(const std::string& what) const {
    throw Error(Errc::LineParse, what, line_, pos_ + 1);
  }

  std::string iri_body() {
    // at '<'
    ++pos_;
    const std::size_t end = s_.find('>', pos_);
    if (end == std::string_view::npos) error("unterminated IRI");
    std::string v(s_.substr(pos_, end - pos_));
    if (v.empty()) error("empty IRI");
    for (char c : v)
      if (c == ' ' || c == '<' || c == '"') error("illegal character in IRI");
    pos_ = end + 1;
    return v;
  }

  Term term() {
    skip_ws();
    const char c = peek();
    if (c == '<') return Iri{iri_body()};
    if (c == '_') {
      if (s_.substr(pos_, 2) != "_:") error("expected '_:' blank node");
      pos_ += 2;
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                  s_[pos_] == '_' || s_[pos_] == '-' || s_[pos_] == '.'))
        ++pos_;
      // A trailing '.' belongs to the statement terminator.
      while (pos_ > start && s_[pos_ - 1] == '.') --pos_;
      if (pos_ == start) error("empty blank node label");
      return BlankNode{std::string(s_.substr(start, pos_ - start))};
    }
    if (c == '"') return literal();
    error("expected a term");
  }

  Term literal() {
    ++pos_;
    std::string lex;
    while (true) {
      if (pos_ >= s_.size()) error("unterminated string literal");
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
    if (s_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      if (peek() != '<') error("expected datatype IRI");
      std::string dt = iri_body();
      if (dt == kDistDatatype) {
        try {
          return make_dist(dist::parse_distribution(lex));
        } catch (const Error& e) {
          error(e.what());
        }
      }
      return Literal{std::move(lex), std::move(dt), {}};
    }
    if (peek() == '@') {
      ++pos_;
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-'))
        ++pos_;
      if (pos_ == start) error("empty language tag");
      return Literal{std::move(lex), std::string(kXsdString), std::string(s_.substr(start, pos_ - start))};
    }
    return Literal{std::move(lex), std::string(kXsdString), {}};
  }

  double probability() {
    // at '@'
    ++pos_;
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    double v = 0.0;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || p == first) error("expected a probability after '@'");
    pos_ += static_cast<std::size_t>(p - first);
    if (!(v > 0.0 && v <= 1.0)) throw Error(Errc::BadProbability, "probability must be in (0,1]", line_);
    return v;
  }

  std::size_t pos_ = 0;

 private:
  std::string_view s_;
  std::size_t line_;
};

}  // namespace

Term parse_term(std::string_view text) {
  LineReader r(text, 1);
  Term t = r.term();
  if (!r.at_end()) r.error("trailing characters after term");
  return t;
}

Graph parse_graph_file(std::string_view text) {
  Graph::Builder builder;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;

    LineReader r(line, line_no);
    if (r.at_end() || r.peek() == '#') {
      if (end == text.size()) break;
      continue;
    }
    Term s = r.term();
    Term p = r.term();
    Term o = r.term();
    double prob = 1.0;
    r.skip_ws();
    if (r.peek() == '@') prob = r.probability();
    r.skip_ws();
    if (r.peek() != '.') r.error("expected '.' at end of statement");
    ++r.pos_;
    if (!r.at_end()) r.error("trailing characters after '.'");
    builder.add(s, p, o, prob, line_no);
    if (end == text.size()) break;
  }
  return std::move(builder).build();
}

Graph load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_graph_file(ss.str());
}

std::string serialize_graph(const Graph& g) {
  std::string out;
  for (const auto& t : g.triples()) {
    out += to_ntriples(g.term(t.s));
    out += ' ';
    out += to_ntriples(g.term(t.p));
    out += ' ';
    out += to_ntriples(g.term(t.o));
    if (t.p_exist != 1.0) {
      out += " @";
      out += dist::format_number(t.p_exist);
    }
    out += " .\n";
  }
  return out;
}

}  // namespace probkg::kg
