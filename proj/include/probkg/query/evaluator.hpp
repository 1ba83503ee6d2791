#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "probkg/query/expr_eval.hpp"
#include "probkg/query/planner.hpp"
#include "probkg/query/simjoin.hpp"
#include "probkg/query/solution.hpp"

namespace probkg::query {

struct EvalOptions {
  /// Build lineage for every mapping.
  bool lineage = true;
  /// Deterministic evaluation on a sub-graph: world[t] says whether triple t
  /// is present. Lineage is not built in this mode.
  const std::vector<char>* world = nullptr;
  /// Decide `PGT(..) >= theta` comparisons by sampling instead of closed form.
  std::optional<SamplingMode> sampling;
};

struct EvalStats {
  std::size_t warnings = 0;
  SimJoinStats simjoin;
};

struct ResultSet {
  std::vector<std::string> vars;
  /// Projected onto `vars`, sorted by binding terms.
  std::vector<Row> rows;
  std::shared_ptr<TermTable> terms;
  EvalStats stats;
};

ResultSet evaluate(const Plan& plan, const kg::Graph& g, const EvalOptions& opts = {});

/// parse + plan + evaluate.
ResultSet run_query(std::string_view text, const kg::Graph& g, const PlanOptions& popts = {},
                    const EvalOptions& eopts = {});

/// True when the lineage holds in every world: no monus and every variable is
/// a triple with existence probability 1, combined through the connectives.
bool lineage_certain(const prov::Lineage& l, const kg::Graph& g);

}  // namespace probkg::query
