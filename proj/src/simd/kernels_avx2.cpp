// Compiled with -mavx2 -mfma; only reached when the CPU reports both.

#include <immintrin.h>

#include <cassert>
#include <cmath>
#include <numbers>
#include <vector>

#include "probkg/simd/kernels.hpp"

namespace probkg::simd::avx2 {

namespace {

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

// exp via 2^n * e^r with |r| <= ln2/2 and a degree-13 Taylor polynomial.
// Inputs below -708 flush to zero instead of producing subnormals.
inline __m256d exp4(__m256d x) {
  const __m256d under = _mm256_cmp_pd(x, set1(-708.0), _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, set1(-708.0)), set1(709.0));
  const __m256d n = _mm256_round_pd(
      _mm256_mul_pd(x, set1(std::numbers::log2e)),
      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, set1(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(n, set1(1.90821492927058770002e-10), r);

  static constexpr double kInvFact[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0,
      1.0 / 3628800.0,    1.0 / 362880.0,    1.0 / 40320.0,
      1.0 / 5040.0,       1.0 / 720.0,       1.0 / 120.0,
      1.0 / 24.0,         1.0 / 6.0,         1.0 / 2.0,
      1.0,                1.0};
  __m256d p = set1(kInvFact[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, set1(kInvFact[i]));

  // n + 1023 lands in the exponent field via the 1.5 * 2^52 rounding trick.
  __m256i bits =
      _mm256_castpd_si256(_mm256_add_pd(n, set1(6755399441055744.0)));
  bits = _mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52);
  const __m256d res = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
  return _mm256_blendv_pd(res, _mm256_setzero_pd(), under);
}

// log for positive normal inputs: e*ln2 + log(m), m in [sqrt(2)/2, sqrt(2)],
// log(m) = 2 atanh((m-1)/(m+1)) as an odd series through f^23.
inline __m256d log4(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i ebits = _mm256_srli_epi64(bits, 52);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(
          ebits, _mm256_set1_epi64x(0x4330000000000000LL))),
      set1(4503599627370496.0));
  e = _mm256_sub_pd(e, set1(1023.0));
  const __m256i mbits = _mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
      _mm256_set1_epi64x(0x3FF0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mbits);
  const __m256d big = _mm256_cmp_pd(m, set1(std::numbers::sqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, set1(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, set1(1.0)));

  const __m256d f = _mm256_div_pd(_mm256_sub_pd(m, set1(1.0)),
                                  _mm256_add_pd(m, set1(1.0)));
  const __m256d s = _mm256_mul_pd(f, f);
  __m256d poly = set1(1.0 / 23.0);
  for (int k = 21; k >= 3; k -= 2)
    poly = _mm256_fmadd_pd(poly, s, set1(1.0 / k));
  poly = _mm256_fmadd_pd(poly, s, set1(1.0));
  const __m256d logm = _mm256_mul_pd(_mm256_add_pd(f, f), poly);
  return _mm256_fmadd_pd(e, set1(6.93147180369123816490e-01),
                         _mm256_fmadd_pd(e, set1(1.90821492927058770002e-10),
                                         logm));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void mixture_pdf(std::span<const double> xs, std::span<const double> weights,
                 std::span<const double> means, std::span<const double> vars,
                 std::span<double> out) {
  assert(out.size() >= xs.size());
  const std::size_t k = weights.size();
  std::vector<double> coef(k), neg_half_prec(k);
  for (std::size_t j = 0; j < k; ++j) {
    coef[j] = weights[j] / std::sqrt(2.0 * std::numbers::pi * vars[j]);
    neg_half_prec[j] = -0.5 / vars[j];
  }
  std::size_t i = 0;
  for (; i + 4 <= xs.size(); i += 4) {
    const __m256d x = _mm256_loadu_pd(xs.data() + i);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < k; ++j) {
      const __m256d d = _mm256_sub_pd(x, set1(means[j]));
      const __m256d arg = _mm256_mul_pd(_mm256_mul_pd(d, d), set1(neg_half_prec[j]));
      acc = _mm256_fmadd_pd(set1(coef[j]), exp4(arg), acc);
    }
    _mm256_storeu_pd(out.data() + i, acc);
  }
  if (i < xs.size())
    scalar::mixture_pdf(xs.subspan(i), weights, means, vars, out.subspan(i));
}

double hist_jsd(std::span<const double> p, std::span<const double> q) {
  assert(p.size() == q.size());
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = set1(1.0);
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= p.size(); i += 4) {
    const __m256d a = _mm256_loadu_pd(p.data() + i);
    const __m256d b = _mm256_loadu_pd(q.data() + i);
    __m256d s = _mm256_add_pd(a, b);
    s = _mm256_blendv_pd(s, one, _mm256_cmp_pd(s, zero, _CMP_LE_OQ));
    const __m256d ra = _mm256_blendv_pd(
        _mm256_div_pd(_mm256_add_pd(a, a), s), one,
        _mm256_cmp_pd(a, zero, _CMP_LE_OQ));
    const __m256d rb = _mm256_blendv_pd(
        _mm256_div_pd(_mm256_add_pd(b, b), s), one,
        _mm256_cmp_pd(b, zero, _CMP_LE_OQ));
    acc = _mm256_fmadd_pd(a, log4(ra), acc);
    acc = _mm256_fmadd_pd(b, log4(rb), acc);
  }
  double total = 0.5 * hsum(acc);
  if (i < p.size()) total += scalar::hist_jsd(p.subspan(i), q.subspan(i));
  return total;
}

void exp(std::span<const double> xs, std::span<double> out) {
  std::size_t i = 0;
  for (; i + 4 <= xs.size(); i += 4)
    _mm256_storeu_pd(out.data() + i, exp4(_mm256_loadu_pd(xs.data() + i)));
  for (; i < xs.size(); ++i) out[i] = std::exp(xs[i]);
}

void log(std::span<const double> xs, std::span<double> out) {
  std::size_t i = 0;
  for (; i + 4 <= xs.size(); i += 4)
    _mm256_storeu_pd(out.data() + i, log4(_mm256_loadu_pd(xs.data() + i)));
  for (; i < xs.size(); ++i) out[i] = std::log(xs[i]);
}

}  // namespace probkg::simd::avx2
