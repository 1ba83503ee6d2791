#include <cmath>
#include <sstream>

#include "json.hpp"
#include "probkg/geo/boxes.hpp"
#include "probkg/util/error.hpp"

namespace probkg::geo {

std::vector<StatAxiom> parse_axioms(std::string_view text) {
  std::vector<StatAxiom> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    StatAxiom a;
    if (kind == "cond") {
      if (!(ls >> a.c >> a.d >> a.p)) throw Error(Errc::LineParse, "expected: cond <C> <D> <p>", lineno);
      if (!(a.p >= 0.0 && a.p <= 1.0)) throw Error(Errc::BadProbability, "probability outside [0, 1]", lineno);
    } else if (kind == "subs") {
      if (!(ls >> a.c >> a.d)) throw Error(Errc::LineParse, "expected: subs <C> <D>", lineno);
      a.kind = StatAxiom::Kind::Subsumption;
    } else {
      throw Error(Errc::LineParse, "unknown axiom kind '" + kind + "'", lineno);
    }
    std::string extra;
    if (ls >> extra) throw Error(Errc::LineParse, "trailing token '" + extra + "'", lineno);
    out.push_back(std::move(a));
  }
  return out;
}

std::string space_to_json(const ConceptSpace& s) {
  nlohmann::ordered_json j;
  j["dim"] = s.dim;
  j["tau"] = s.tau;
  j["concepts"] = nlohmann::ordered_json::object();
  for (const auto& [name, b] : s.boxes) j["concepts"][name] = {{"lo", b.lo}, {"hi", b.hi}};
  return j.dump();
}

ConceptSpace space_from_json(std::string_view text) {
  ConceptSpace s;
  try {
    const auto j = nlohmann::json::parse(text);
    s.dim = j.at("dim").get<std::size_t>();
    s.tau = j.value("tau", 0.0);
    for (const auto& [name, b] : j.at("concepts").items()) {
      Box box{b.at("lo").get<std::vector<double>>(), b.at("hi").get<std::vector<double>>()};
      if (box.lo.size() != s.dim || box.hi.size() != s.dim)
        fail(Errc::DimensionMismatch, "concept " + name + " does not have " + std::to_string(s.dim) + " dimensions");
      for (std::size_t i = 0; i < s.dim; ++i)
        if (!(box.lo[i] <= box.hi[i])) fail(Errc::InvalidArgument, "concept " + name + " has lo > hi");
      s.boxes.emplace(name, std::move(box));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidArgument, std::string("concept space JSON: ") + e.what());
  }
  if (s.tau < 0.0) fail(Errc::InvalidArgument, "tau must be nonnegative");
  return s;
}

}  // namespace probkg::geo
