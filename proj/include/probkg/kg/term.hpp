#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "probkg/dist/distribution.hpp"

namespace probkg::kg {

inline constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view kXsdDouble = "http://www.w3.org/2001/XMLSchema#double";
inline constexpr std::string_view kXsdDecimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view kXsdBoolean = "http://www.w3.org/2001/XMLSchema#boolean";
/// Datatype IRI of distribution-valued literals.
inline constexpr std::string_view kDistDatatype = "urn:prob:dist";

struct Iri {
  std::string value;
  bool operator==(const Iri&) const = default;
};

struct BlankNode {
  std::string label;
  bool operator==(const BlankNode&) const = default;
};

struct Literal {
  std::string lexical;
  std::string datatype{kXsdString};
  std::optional<std::string> lang;
  bool operator==(const Literal&) const = default;
};

/// Literal whose value is a probability distribution. Shared so that terms
/// stay cheap to copy; equality compares the distributions.
struct DistLiteral {
  std::shared_ptr<const dist::Distribution> value;
  bool operator==(const DistLiteral& o) const { return *value == *o.value; }
};

using Term = std::variant<Iri, BlankNode, Literal, DistLiteral>;

Term make_iri(std::string value);
Term make_blank(std::string label);
Term make_literal(std::string lexical, std::string datatype = std::string(kXsdString),
                  std::optional<std::string> lang = std::nullopt);
Term make_number(double v);
Term make_boolean(bool v);
Term make_dist(dist::Distribution d);

inline bool is_iri(const Term& t) { return std::holds_alternative<Iri>(t); }
inline bool is_blank(const Term& t) { return std::holds_alternative<BlankNode>(t); }
inline bool is_literal(const Term& t) {
  return std::holds_alternative<Literal>(t) || std::holds_alternative<DistLiteral>(t);
}

/// N-Triples style form; distribution literals use 17 significant digits.
std::string to_ntriples(const Term& t);
/// Interning key: equal keys iff equal terms.
std::string term_key(const Term& t);
/// Value of a numeric-datatype literal, if any.
std::optional<double> numeric_value(const Term& t);
const dist::Distribution* distribution_of(const Term& t);
/// Plain value for JSON output: IRIs and blank nodes in N-Triples form,
/// literals by lexical form.
std::string display_value(const Term& t);

/// Escapes a lexical form for a quoted literal.
std::string escape_lexical(std::string_view s);

}  // namespace probkg::kg
