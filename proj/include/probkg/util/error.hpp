#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace probkg {

enum class Errc {
  InvalidArgument,
  Io,
  // ingestion
  LineParse,
  BadProbability,
  DuplicateTriple,
  // distributions
  InvalidDistribution,
  DimensionMismatch,
  UnsupportedFamily,
  ZeroScale,
  BadInterval,
  FamilyMismatch,
  EdgesMismatch,
  UnsupportedMethod,
  BadGrid,
  // queries
  Syntax,
  UnboundVariable,
  TypeError,
  // circuits
  VarLimitExceeded,
  Timeout,
  MissingWeight,
  CyclicNetwork,
  MalformedCpt,
  // oracle
  TooManyWorlds,
  IncompleteAssignment,
  // boxes
  UnknownConcept,
  DegenerateConditioningBox,
  EmptyAxioms,
  UnknownIndividual,
  // bench
  VariantMismatch,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::size_t line = 0,
        std::size_t col = 0);

  Errc code() const noexcept { return code_; }
  /// 1-based source position, 0 when not applicable.
  std::size_t line() const noexcept { return line_; }
  std::size_t col() const noexcept { return col_; }

 private:
  Errc code_;
  std::size_t line_;
  std::size_t col_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace probkg
