#pragma once

// Data-parallel inner loops shared by the distribution algebra and the
// sampling baselines. Every kernel has a scalar reference in
// probkg::simd::scalar; vector variants live in per-ISA namespaces and are
// selected once at startup from the CPU feature set.

#include <span>
#include <string_view>

namespace probkg::simd {

enum class Isa { Scalar, Avx2 };

bool isa_supported(Isa isa) noexcept;
/// Highest supported ISA, unless PROBKG_SIMD=scalar|avx2 narrows it.
Isa active_isa() noexcept;
/// Overrides the dispatch target; unsupported requests fall back to Scalar.
void set_isa(Isa isa) noexcept;
std::string_view isa_name(Isa isa) noexcept;

/// out[i] = sum_k weights[k] * N(xs[i]; means[k], vars[k]).
void mixture_pdf(std::span<const double> xs, std::span<const double> weights,
                 std::span<const double> means, std::span<const double> vars,
                 std::span<double> out);

/// Jensen-Shannon divergence (natural log) of two discrete distributions
/// over the same cells. Zero-mass cells contribute nothing.
double hist_jsd(std::span<const double> p, std::span<const double> q);

/// Elementwise exp / log. log requires strictly positive normal inputs.
void exp(std::span<const double> xs, std::span<double> out);
void log(std::span<const double> xs, std::span<double> out);

namespace scalar {
void mixture_pdf(std::span<const double> xs, std::span<const double> weights,
                 std::span<const double> means, std::span<const double> vars,
                 std::span<double> out);
double hist_jsd(std::span<const double> p, std::span<const double> q);
void exp(std::span<const double> xs, std::span<double> out);
void log(std::span<const double> xs, std::span<double> out);
}  // namespace scalar

#if defined(PROBKG_HAVE_AVX2)
namespace avx2 {
void mixture_pdf(std::span<const double> xs, std::span<const double> weights,
                 std::span<const double> means, std::span<const double> vars,
                 std::span<double> out);
double hist_jsd(std::span<const double> p, std::span<const double> q);
void exp(std::span<const double> xs, std::span<double> out);
void log(std::span<const double> xs, std::span<double> out);
}  // namespace avx2
#endif

}  // namespace probkg::simd
