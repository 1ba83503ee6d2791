#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "probkg/circuits/ddnnf.hpp"
#include "probkg/circuits/formula.hpp"

namespace probkg::circuits {

struct CompileOptions {
  std::size_t var_limit = 4096;
  double time_budget_s = 30.0;
  /// Per-call sub-formula cache.
  bool cache = true;
};

struct CompileStats {
  std::size_t decisions = 0;
  std::size_t component_splits = 0;
  std::size_t cache_hits = 0;
};

/// Search-based compilation: unit literals of a conjunction are factored
/// out, variable-disjoint components are compiled independently, otherwise
/// the most frequent variable (lowest id on ties) is decided.
/// Throws VarLimitExceeded or Timeout.
DDnnf compile(const BoolFormula& f, const CompileOptions& opts = {}, CompileStats* stats = nullptr);

/// Thread-safe cross-query cache keyed by the formula's printed form.
class CircuitCache {
 public:
  std::shared_ptr<const DDnnf> get_or_compile(const BoolFormula& f, const CompileOptions& opts = {});
  std::size_t hits() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<const DDnnf>> map_;
  std::size_t hits_ = 0;
};

}  // namespace probkg::circuits
