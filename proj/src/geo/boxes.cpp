#include "probkg/geo/boxes.hpp"

#include <algorithm>
#include <cmath>

#include "probkg/mc/rng.hpp"
#include "probkg/util/error.hpp"

namespace probkg::geo {

namespace {

double softlen(double w, double tau) {
  if (tau <= 0.0) return std::max(0.0, w);
  const double z = w / tau;
  // log1p(exp(z)) without overflow
  return tau * (z > 30.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)));
}

// d softlen / dw
double softlen_slope(double w, double tau) {
  if (tau <= 0.0) return w > 0.0 ? 1.0 : 0.0;
  return 1.0 / (1.0 + std::exp(-w / tau));
}

const Box& box_of(const ConceptSpace& s, const std::string& c) {
  auto it = s.boxes.find(c);
  if (it == s.boxes.end()) fail(Errc::UnknownConcept, "unknown concept " + c);
  return it->second;
}

// Unclamped ratio; hard mode reports degenerate conditioning boxes.
double ratio(const ConceptSpace& s, const Box& c, const Box& d) {
  double num = 1.0;
  double den = 1.0;
  for (std::size_t i = 0; i < s.dim; ++i) {
    num *= softlen(std::min(c.hi[i], d.hi[i]) - std::max(c.lo[i], d.lo[i]), s.tau);
    den *= softlen(c.hi[i] - c.lo[i], s.tau);
  }
  if (den <= 0.0) fail(Errc::DegenerateConditioningBox, "conditioning box has zero volume");
  return num / den;
}

using Params = std::vector<double>;  // per concept: centre[d], log length[d]

std::vector<std::string> names_of(const ConceptSpace& s) {
  std::vector<std::string> out;
  for (const auto& [n, b] : s.boxes) out.push_back(n);
  return out;
}

Params to_params(const ConceptSpace& s) {
  Params p;
  for (const auto& [n, b] : s.boxes) {
    for (std::size_t i = 0; i < s.dim; ++i) p.push_back(0.5 * (b.lo[i] + b.hi[i]));
    for (std::size_t i = 0; i < s.dim; ++i) p.push_back(std::log(b.hi[i] - b.lo[i]));
  }
  return p;
}

void from_params(ConceptSpace& s, const Params& p) {
  std::size_t k = 0;
  for (auto& [n, b] : s.boxes) {
    for (std::size_t i = 0; i < s.dim; ++i) {
      const double c = p[k + i];
      const double half = 0.5 * std::exp(p[k + s.dim + i]);
      b.lo[i] = c - half;
      b.hi[i] = c + half;
    }
    k += 2 * s.dim;
  }
}

void check_axioms(const std::vector<StatAxiom>& axioms) {
  if (axioms.empty()) fail(Errc::EmptyAxioms, "no axioms to fit");
  for (const auto& a : axioms)
    if (!(a.p >= 0.0 && a.p <= 1.0)) fail(Errc::InvalidArgument, "axiom probability outside [0, 1]");
}

double target(const StatAxiom& a) { return a.kind == StatAxiom::Kind::Subsumption ? 1.0 : a.p; }

}  // namespace

double cond_prob(const ConceptSpace& s, const std::string& c, const std::string& d) {
  return std::clamp(ratio(s, box_of(s, c), box_of(s, d)), 0.0, 1.0);
}

double volume(const ConceptSpace& s, const std::string& c) {
  const auto& b = box_of(s, c);
  double v = 1.0;
  for (std::size_t i = 0; i < s.dim; ++i) v *= softlen(b.hi[i] - b.lo[i], s.tau);
  return v;
}

double loss(const ConceptSpace& s, const std::vector<StatAxiom>& axioms) {
  if (axioms.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& a : axioms) {
    const double e = ratio(s, box_of(s, a.c), box_of(s, a.d)) - target(a);
    sum += e * e;
  }
  return sum / static_cast<double>(axioms.size());
}

std::vector<double> loss_gradient(const ConceptSpace& s, const std::vector<StatAxiom>& axioms) {
  const auto names = names_of(s);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;
  const std::size_t d = s.dim;
  // Gradient with respect to lo and hi first, then chained to the parameters.
  std::vector<double> g_lo(names.size() * d, 0.0), g_hi(names.size() * d, 0.0);
  const double scale = 2.0 / static_cast<double>(axioms.size());
  for (const auto& a : axioms) {
    const std::size_t ci = index.at(a.c), di = index.at(a.d);
    const Box& c = box_of(s, a.c);
    const Box& b = box_of(s, a.d);
    const double r = ratio(s, c, b);
    const double outer = scale * (r - target(a)) * r;
    for (std::size_t i = 0; i < d; ++i) {
      // log r = sum log L(overlap) - log L(width of C)
      const double hi = std::min(c.hi[i], b.hi[i]);
      const double lo = std::max(c.lo[i], b.lo[i]);
      const double ov = hi - lo;
      const double g_ov = softlen_slope(ov, s.tau) / softlen(ov, s.tau);
      const double wc = c.hi[i] - c.lo[i];
      const double g_wc = softlen_slope(wc, s.tau) / softlen(wc, s.tau);
      // Same concept on both sides: overlap is the box itself.
      const bool same = ci == di;
      const std::size_t hi_owner = same || c.hi[i] <= b.hi[i] ? ci : di;
      const std::size_t lo_owner = same || c.lo[i] >= b.lo[i] ? ci : di;
      g_hi[hi_owner * d + i] += outer * g_ov;
      g_lo[lo_owner * d + i] -= outer * g_ov;
      g_hi[ci * d + i] -= outer * g_wc;
      g_lo[ci * d + i] += outer * g_wc;
    }
  }
  std::vector<double> grad;
  grad.reserve(names.size() * 2 * d);
  for (std::size_t k = 0; k < names.size(); ++k) {
    const Box& b = s.boxes.at(names[k]);
    for (std::size_t i = 0; i < d; ++i) grad.push_back(g_lo[k * d + i] + g_hi[k * d + i]);
    for (std::size_t i = 0; i < d; ++i) {
      const double half = 0.5 * (b.hi[i] - b.lo[i]);
      grad.push_back(half * (g_hi[k * d + i] - g_lo[k * d + i]));
    }
  }
  return grad;
}

double finite_diff_check(const ConceptSpace& s, const std::vector<StatAxiom>& axioms, double h) {
  const auto analytic = loss_gradient(s, axioms);
  ConceptSpace probe = s;
  Params p = to_params(s);
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double keep = p[k];
    p[k] = keep + h;
    from_params(probe, p);
    const double up = loss(probe, axioms);
    p[k] = keep - h;
    from_params(probe, p);
    const double down = loss(probe, axioms);
    p[k] = keep;
    const double numeric = (up - down) / (2.0 * h);
    const double diff = std::abs(numeric - analytic[k]);
    const double mag = std::max(std::abs(numeric), std::abs(analytic[k]));
    worst = std::max(worst, mag < 1e-8 ? diff : diff / mag);
  }
  return worst;
}

FitResult fit(const std::vector<StatAxiom>& axioms, std::size_t dim, const FitOptions& opts) {
  check_axioms(axioms);
  if (dim == 0) fail(Errc::InvalidArgument, "dimension must be at least 1");
  if (!(opts.tau > 0.0)) fail(Errc::InvalidArgument, "fitting needs tau > 0");
  FitResult out;
  auto& s = out.space;
  s.dim = dim;
  s.tau = opts.tau;
  for (const auto& a : axioms) {
    s.boxes.try_emplace(a.c, Box{std::vector<double>(dim), std::vector<double>(dim)});
    s.boxes.try_emplace(a.d, Box{std::vector<double>(dim), std::vector<double>(dim)});
  }
  // Overlapping unit-scale boxes so that every pair starts with signal.
  mc::CounterRng rng(mc::derive_stream(opts.seed, mc::StreamTag::BoxInit, dim));
  Params p;
  for (std::size_t k = 0; k < s.boxes.size(); ++k) {
    for (std::size_t i = 0; i < dim; ++i) p.push_back(0.4 + 0.2 * rng.uniform());
    for (std::size_t i = 0; i < dim; ++i) p.push_back(std::log(0.4 + 0.2 * rng.uniform()));
  }
  from_params(s, p);
  double current = loss(s, axioms);
  double lr = opts.lr;
  ConceptSpace trial = s;
  for (std::size_t it = 0; it < opts.iters && current > opts.tol; ++it) {
    const auto g = loss_gradient(s, axioms);
    Params next = p;
    for (std::size_t k = 0; k < p.size(); ++k) next[k] -= lr * g[k];
    from_params(trial, next);
    const double l = loss(trial, axioms);
    if (l <= current) {
      p = std::move(next);
      std::swap(s, trial);
      current = l;
      lr *= 1.1;
    } else {
      lr *= 0.5;
    }
    out.loss.push_back(current);
    if (lr < 1e-14) break;
  }
  return out;
}

double instance_prob(const ConceptSpace& s, const std::vector<std::pair<std::string, std::string>>& abox,
                     const std::string& a, const std::string& d) {
  box_of(s, d);
  const std::string* best = nullptr;
  double best_vol = 0.0;
  for (const auto& [ind, cls] : abox) {
    if (ind != a) continue;
    if (cls == d) return 1.0;
    const double v = volume(s, cls);
    if (!best || v < best_vol) {
      best = &cls;
      best_vol = v;
    }
  }
  if (!best) fail(Errc::UnknownIndividual, "no asserted concept for " + a);
  return cond_prob(s, *best, d);
}

}  // namespace probkg::geo
