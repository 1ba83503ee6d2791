#include "probkg/kg/term.hpp"

#include <charconv>
#include <cmath>

#include "probkg/util/error.hpp"

namespace probkg::kg {

Term make_iri(std::string value) {
  if (value.empty()) fail(Errc::InvalidArgument, "IRI must be non-empty");
  return Iri{std::move(value)};
}

Term make_blank(std::string label) { return BlankNode{std::move(label)}; }

Term make_literal(std::string lexical, std::string datatype, std::optional<std::string> lang) {
  if (datatype.empty()) datatype = std::string(kXsdString);
  return Literal{std::move(lexical), std::move(datatype), std::move(lang)};
}

Term make_number(double v) { return Literal{dist::format_number(v), std::string(kXsdDouble), {}}; }

Term make_boolean(bool v) { return Literal{v ? "true" : "false", std::string(kXsdBoolean), {}}; }

Term make_dist(dist::Distribution d) {
  dist::validate(d);
  return DistLiteral{std::make_shared<const dist::Distribution>(std::move(d))};
}

std::string escape_lexical(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string to_ntriples(const Term& t) {
  if (const auto* i = std::get_if<Iri>(&t)) return "<" + i->value + ">";
  if (const auto* b = std::get_if<BlankNode>(&t)) return "_:" + b->label;
  if (const auto* l = std::get_if<Literal>(&t)) {
    std::string out = "\"" + escape_lexical(l->lexical) + "\"";
    if (l->lang) return out + "@" + *l->lang;
    if (l->datatype != kXsdString) out += "^^<" + l->datatype + ">";
    return out;
  }
  const auto& d = std::get<DistLiteral>(t);
  return "\"" + dist::format_distribution(*d.value) + "\"^^<" + std::string(kDistDatatype) + ">";
}

namespace {
void append_shortest(std::string& out, double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, p);
}
}  // namespace

std::string term_key(const Term& t) {
  const auto* d = std::get_if<DistLiteral>(&t);
  if (!d) return to_ntriples(t);
  // Shortest round-trip digits: same identity as the 17-digit form, cheaper.
  std::string key = "D";
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, dist::Gmm>) {
          key += 'g';
          for (std::size_t k = 0; k < x.size(); ++k) {
            key += ';';
            append_shortest(key, x.weights[k]);
            for (double m : x.components[k].mean) {
              key += ',';
              append_shortest(key, m);
            }
            key += '/';
            for (double v : x.components[k].var) {
              key += ',';
              append_shortest(key, v);
            }
          }
        } else if constexpr (std::is_same_v<T, dist::Histogram>) {
          key += 'h';
          for (double e : x.edges) {
            key += ',';
            append_shortest(key, e);
          }
          key += '|';
          for (double m : x.masses) {
            key += ',';
            append_shortest(key, m);
          }
        } else {
          key += 'd';
          for (double a : x.alphas) {
            key += ',';
            append_shortest(key, a);
          }
        }
      },
      *d->value);
  return key;
}

std::optional<double> numeric_value(const Term& t) {
  const auto* l = std::get_if<Literal>(&t);
  if (!l) return std::nullopt;
  if (l->datatype != kXsdDouble && l->datatype != kXsdDecimal && l->datatype != kXsdInteger &&
      l->datatype != "http://www.w3.org/2001/XMLSchema#float")
    return std::nullopt;
  double v = 0.0;
  const char* b = l->lexical.data();
  const char* e = b + l->lexical.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e) return std::nullopt;
  return v;
}

const dist::Distribution* distribution_of(const Term& t) {
  const auto* d = std::get_if<DistLiteral>(&t);
  return d ? d->value.get() : nullptr;
}

std::string display_value(const Term& t) {
  if (const auto* l = std::get_if<Literal>(&t)) return l->lexical;
  if (const auto* d = std::get_if<DistLiteral>(&t)) return dist::format_distribution(*d->value);
  return to_ntriples(t);
}

}  // namespace probkg::kg
