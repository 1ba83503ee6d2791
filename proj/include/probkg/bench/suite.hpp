#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "probkg/query/simjoin.hpp"

namespace probkg::bench {

struct VariantResult {
  std::string name;
  bool pushdown = true;
  /// "dedicated" or "naive" (SIMJOIN rewritten to a join plus a JSD filter).
  std::string simjoin = "dedicated";
  /// "closed" or a sampling strategy name.
  std::string sampling = "closed";
  /// "prob" or "twin".
  std::string graph = "prob";
  /// Part of the equality gate.
  bool gated = true;
  std::vector<std::int64_t> ns;
  std::size_t results = 0;
  std::size_t warnings = 0;
  query::SimJoinStats simjoin_stats;
  /// Sampling variants: size of the symmetric difference to the closed-form
  /// result multiset over its size.
  std::optional<double> error;

  std::int64_t median_ns() const;
};

struct QueryReport {
  std::string name;
  std::string dataset;
  std::vector<VariantResult> variants;
  /// False when gated variants disagree; timings are then suppressed.
  bool consistent = true;
  std::optional<double> pushdown_speedup;
  std::optional<double> simjoin_speedup;
  std::optional<double> overhead_ratio;
};

struct BenchReport {
  std::vector<QueryReport> queries;
  std::size_t runs = 7;
  std::size_t warmups = 2;

  /// With timing=false only the run-independent fields are written.
  std::string to_json(bool timing = true) const;
  std::string to_csv() const;
  bool consistent() const;
};

/// Suite document:
///   {"datasets":[{"name":..,"file":..} | {"name":..,<GenConfig fields>}],
///    "queries":[{"name":..,"dataset":..,"text":..,"twin_text":..}],
///    "variants":{"pushdown":[true,false],"simjoin":["dedicated","naive"],
///                "sampling":["naive","sprt"],"twin":true},
///    "runs":7,"warmups":2,"seed":42,"lineage":false}
/// Relative file paths resolve against `base_dir`.
BenchReport run_suite(std::string_view config_json, const std::string& base_dir = ".");

/// Reads the suite file and writes report.json and report.csv into out_dir.
/// Throws VariantMismatch after writing when gated variants disagreed.
BenchReport run_suite_file(const std::string& path, const std::string& out_dir);

}  // namespace probkg::bench
