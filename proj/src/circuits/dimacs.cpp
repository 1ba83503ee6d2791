#include "probkg/circuits/dimacs.hpp"

#include <sstream>

#include "probkg/dist/distribution.hpp"
#include "probkg/util/error.hpp"

namespace probkg::circuits {

Cnf read_dimacs(std::string_view text) {
  Cnf cnf;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::size_t declared_clauses = 0;
  std::vector<int> current;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") {
      std::string kind;
      if (ls >> kind && kind == "w") {
        long v;
        double pos, neg;
        if (!(ls >> v >> pos >> neg) || v <= 0 || pos < 0 || neg < 0)
          throw Error(Errc::LineParse, "malformed weight line", lineno);
        cnf.weights[static_cast<Var>(v)] = {pos, neg};
      }
      continue;
    }
    if (tok == "p") {
      std::string fmt;
      long nv;
      long nc;
      if (header || !(ls >> fmt >> nv >> nc) || fmt != "cnf" || nv < 0 || nc < 0)
        throw Error(Errc::LineParse, "malformed problem line", lineno);
      header = true;
      cnf.num_vars = static_cast<Var>(nv);
      declared_clauses = static_cast<std::size_t>(nc);
      continue;
    }
    if (!header) throw Error(Errc::LineParse, "clause before the problem line", lineno);
    ls.clear();
    ls.str(line);
    long lit;
    while (ls >> lit) {
      if (lit == 0) {
        cnf.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (static_cast<unsigned long>(std::labs(lit)) > cnf.num_vars)
        throw Error(Errc::LineParse, "literal exceeds the declared variable count", lineno);
      current.push_back(static_cast<int>(lit));
    }
    if (!ls.eof()) throw Error(Errc::LineParse, "unexpected token", lineno);
  }
  if (!header) fail(Errc::LineParse, "missing problem line");
  if (!current.empty()) cnf.clauses.push_back(std::move(current));
  if (cnf.clauses.size() != declared_clauses)
    fail(Errc::LineParse, "declared " + std::to_string(declared_clauses) + " clauses, found " +
                              std::to_string(cnf.clauses.size()));
  for (const auto& [v, w] : cnf.weights)
    if (v > cnf.num_vars) fail(Errc::LineParse, "weight on undeclared variable " + std::to_string(v));
  for (Var v = 1; v <= cnf.num_vars; ++v) cnf.weights.try_emplace(v, LitWeight{1.0, 1.0});
  return cnf;
}

std::string write_dimacs(const Cnf& cnf) {
  std::string out = "p cnf " + std::to_string(cnf.num_vars) + " " + std::to_string(cnf.clauses.size()) + "\n";
  for (const auto& [v, w] : cnf.weights)
    out += "c w " + std::to_string(v) + " " + dist::format_number(w.pos) + " " + dist::format_number(w.neg) + "\n";
  for (const auto& c : cnf.clauses) {
    for (int l : c) out += std::to_string(l) + " ";
    out += "0\n";
  }
  return out;
}

}  // namespace probkg::circuits
