#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace probkg::geo {

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// tau > 0 replaces every edge length w by the smooth length
/// tau * log(1 + exp(w / tau)); tau = 0 is the hard, clamped geometry.
struct ConceptSpace {
  std::size_t dim = 0;
  double tau = 0.1;
  std::map<std::string, Box> boxes;
};

struct StatAxiom {
  enum class Kind { Conditional, Subsumption };
  Kind kind = Kind::Conditional;
  std::string c;
  std::string d;
  /// 1 for subsumptions.
  double p = 1.0;
};

/// Vol(C and D) / Vol(C), clamped to [0, 1]. Throws UnknownConcept, or
/// DegenerateConditioningBox when C has zero hard volume.
double cond_prob(const ConceptSpace& s, const std::string& c, const std::string& d);

/// Volume of a concept's box under the space's length function.
double volume(const ConceptSpace& s, const std::string& c);

/// Mean squared error of the axioms.
double loss(const ConceptSpace& s, const std::vector<StatAxiom>& axioms);

struct FitOptions {
  double lr = 0.5;
  std::size_t iters = 3000;
  double tau = 0.1;
  std::uint64_t seed = 42;
  /// Stop once the loss falls below this.
  double tol = 1e-10;
};

struct FitResult {
  ConceptSpace space;
  /// Accepted loss after each iteration; never increases.
  std::vector<double> loss;
};

/// Gradient descent on centre and log edge length per dimension. A step that
/// raises the loss is rejected and the learning rate halved; an accepted step
/// grows it by 10%. Throws EmptyAxioms.
FitResult fit(const std::vector<StatAxiom>& axioms, std::size_t dim, const FitOptions& opts = {});

/// Analytic loss gradient in the fit parameterisation, concept by concept in
/// name order, per dimension (d centre, d log length).
std::vector<double> loss_gradient(const ConceptSpace& s, const std::vector<StatAxiom>& axioms);

/// Max relative error between loss_gradient and central differences with
/// step h; entries where both are below 1e-8 in magnitude count as their
/// absolute difference.
double finite_diff_check(const ConceptSpace& s, const std::vector<StatAxiom>& axioms, double h = 1e-5);

/// Probability that individual `a` belongs to D given its asserted concepts:
/// 1 when asserted in D, else cond_prob from the asserted concept with the
/// smallest volume. Throws UnknownIndividual.
double instance_prob(const ConceptSpace& s, const std::vector<std::pair<std::string, std::string>>& abox,
                     const std::string& a, const std::string& d);

/// `cond <C> <D> <p>` and `subs <C> <D>` lines; '#' starts a comment.
std::vector<StatAxiom> parse_axioms(std::string_view text);

/// `{"dim":2,"tau":0.1,"concepts":{"C":{"lo":[..],"hi":[..]}}}`
std::string space_to_json(const ConceptSpace& s);
ConceptSpace space_from_json(std::string_view text);

}  // namespace probkg::geo
