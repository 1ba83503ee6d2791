#include <atomic>
#include <cstdlib>
#include <string_view>

#include "probkg/simd/kernels.hpp"

namespace probkg::simd {

namespace {

Isa detect() noexcept {
#if defined(PROBKG_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Isa::Avx2;
#endif
  return Isa::Scalar;
}

Isa initial() noexcept {
  Isa isa = detect();
  if (const char* env = std::getenv("PROBKG_SIMD")) {
    const std::string_view v(env);
    if (v == "scalar") isa = Isa::Scalar;
  }
  return isa;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial()};
  return isa;
}

}  // namespace

bool isa_supported(Isa isa) noexcept {
  return isa == Isa::Scalar || detect() == Isa::Avx2;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) noexcept {
  current().store(isa_supported(isa) ? isa : Isa::Scalar);
}

std::string_view isa_name(Isa isa) noexcept {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

#if defined(PROBKG_HAVE_AVX2)
#define PROBKG_DISPATCH(fn, ...)                              \
  return active_isa() == Isa::Avx2 ? avx2::fn(__VA_ARGS__)    \
                                   : scalar::fn(__VA_ARGS__)
#else
#define PROBKG_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void mixture_pdf(std::span<const double> xs, std::span<const double> weights,
                 std::span<const double> means, std::span<const double> vars,
                 std::span<double> out) {
  PROBKG_DISPATCH(mixture_pdf, xs, weights, means, vars, out);
}

double hist_jsd(std::span<const double> p, std::span<const double> q) {
  PROBKG_DISPATCH(hist_jsd, p, q);
}

void exp(std::span<const double> xs, std::span<double> out) {
  PROBKG_DISPATCH(exp, xs, out);
}

void log(std::span<const double> xs, std::span<double> out) {
  PROBKG_DISPATCH(log, xs, out);
}

#undef PROBKG_DISPATCH

}  // namespace probkg::simd
