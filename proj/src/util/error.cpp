#include "probkg/util/error.hpp"

namespace probkg {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    case Errc::LineParse: return "LineParse";
    case Errc::BadProbability: return "BadProbability";
    case Errc::DuplicateTriple: return "DuplicateTriple";
    case Errc::InvalidDistribution: return "InvalidDistribution";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::UnsupportedFamily: return "UnsupportedFamily";
    case Errc::ZeroScale: return "ZeroScale";
    case Errc::BadInterval: return "BadInterval";
    case Errc::FamilyMismatch: return "FamilyMismatch";
    case Errc::EdgesMismatch: return "EdgesMismatch";
    case Errc::UnsupportedMethod: return "UnsupportedMethod";
    case Errc::BadGrid: return "BadGrid";
    case Errc::Syntax: return "Syntax";
    case Errc::UnboundVariable: return "UnboundVariable";
    case Errc::TypeError: return "TypeError";
    case Errc::VarLimitExceeded: return "VarLimitExceeded";
    case Errc::Timeout: return "Timeout";
    case Errc::MissingWeight: return "MissingWeight";
    case Errc::CyclicNetwork: return "CyclicNetwork";
    case Errc::MalformedCpt: return "MalformedCpt";
    case Errc::TooManyWorlds: return "TooManyWorlds";
    case Errc::IncompleteAssignment: return "IncompleteAssignment";
    case Errc::UnknownConcept: return "UnknownConcept";
    case Errc::DegenerateConditioningBox: return "DegenerateConditioningBox";
    case Errc::EmptyAxioms: return "EmptyAxioms";
    case Errc::UnknownIndividual: return "UnknownIndividual";
    case Errc::VariantMismatch: return "VariantMismatch";
  }
  return "Unknown";
}

namespace {
std::string decorate(Errc code, const std::string& message, std::size_t line,
                     std::size_t col) {
  std::string out(to_string(code));
  if (line != 0) {
    out += " at line " + std::to_string(line);
    if (col != 0) out += ", col " + std::to_string(col);
  }
  out += ": ";
  out += message;
  return out;
}
}  // namespace

Error::Error(Errc code, const std::string& message, std::size_t line,
             std::size_t col)
    : std::runtime_error(decorate(code, message, line, col)),
      code_(code),
      line_(line),
      col_(col) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace probkg
