// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "npmix/smoothing/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace npmix::simd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double hsum(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

inline double hmax(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return std::max(std::max(lane[0], lane[1]), std::max(lane[2], lane[3]));
}

// Loads up to 4 values; missing lanes take `fill`.
inline __m256d load_tail(const double* p, std::size_t count, double fill) {
  alignas(32) double lane[4] = {fill, fill, fill, fill};
  std::memcpy(lane, p, count * sizeof(double));
  return _mm256_load_pd(lane);
}

inline void store_tail(double* p, std::size_t count, __m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  std::memcpy(p, lane, count * sizeof(double));
}

inline __m256d poly(__m256d x, const double* c, int degree) {
  __m256d r = _mm256_set1_pd(c[0]);
  for (int i = 1; i <= degree; ++i) r = _mm256_fmadd_pd(r, x, _mm256_set1_pd(c[i]));
  return r;
}

// Integral doubles with |v| < 2^51 to int64 lanes and back.
inline __m256i to_i64(__m256d v) {
  const __m256d kMagic = _mm256_set1_pd(6755399441055744.0);  // 1.5 * 2^52
  return _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(v, kMagic)), _mm256_castpd_si256(kMagic));
}

inline __m256d from_i64(__m256i v) {
  const __m256d kMagic = _mm256_set1_pd(6755399441055744.0);
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_add_epi64(v, _mm256_castpd_si256(kMagic))), kMagic);
}

// Cephes-style exp: argument reduction by ln 2 and a (2,3) Pade form.
// Inputs below -708.39 (including -inf) give 0; inputs must not exceed 709.
inline __m256d exp_pd(__m256d x) {
  static const double P[3] = {1.26177193074810590878e-4, 3.02994407707441961300e-2, 9.99999999999999999910e-1};
  static const double Q[4] = {3.00198505138664455042e-6, 2.52448340349684104192e-3, 2.27265548208155028766e-1,
                              2.00000000000000000009e0};
  const __m256d lo = _mm256_set1_pd(-708.39641853226408);
  const __m256d under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo);
  x = _mm256_min_pd(x, _mm256_set1_pd(709.0));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125e-1), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), r);
  const __m256d rr = _mm256_mul_pd(r, r);
  const __m256d px = _mm256_mul_pd(r, poly(rr, P, 2));
  const __m256d qx = poly(rr, Q, 3);
  const __m256d frac = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  const __m256d e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), frac, _mm256_set1_pd(1.0));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(to_i64(n), _mm256_set1_epi64x(1023)), 52);
  const __m256d out = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(under, out);
}

// Cephes-style sin/cos pair, reduction by pi/4 in three parts. Valid for
// |x| up to about 1e7; callers route larger lanes to the scalar functions.
inline void sincos_pd(__m256d x, __m256d& s, __m256d& c) {
  static const double S[6] = {1.58962301576546568060e-10, -2.50507477628578072866e-8, 2.75573136213857245213e-6,
                              -1.98412698295895385996e-4, 8.33333333332211858878e-3,  -1.66666666666666307295e-1};
  static const double C[6] = {-1.13585365213876817300e-11, 2.08757008419747316778e-9, -2.75573141792967388112e-7,
                              2.48015872888517045348e-5,   -1.38888888888730564116e-3, 4.16666666666665929218e-2};
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d sign_x = _mm256_and_pd(x, sign_mask);
  const __m256d ax = _mm256_andnot_pd(sign_mask, x);
  __m256i j = to_i64(_mm256_floor_pd(_mm256_mul_pd(ax, _mm256_set1_pd(1.27323954473516268615))));
  j = _mm256_and_si256(_mm256_add_epi64(j, _mm256_set1_epi64x(1)), _mm256_set1_epi64x(~1LL));
  const __m256d y = from_i64(j);
  __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(7.85398125648498535156e-1), ax);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(3.77489470793079817668e-8), z);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(2.69515142907905952645e-15), z);
  const __m256d zz = _mm256_mul_pd(z, z);
  const __m256d ps = _mm256_fmadd_pd(_mm256_mul_pd(z, zz), poly(zz, S, 5), z);
  const __m256d pc = _mm256_fmadd_pd(_mm256_mul_pd(zz, zz), poly(zz, C, 5),
                                     _mm256_fnmadd_pd(_mm256_set1_pd(0.5), zz, _mm256_set1_pd(1.0)));
  const __m256i q = _mm256_and_si256(_mm256_srli_epi64(j, 1), _mm256_set1_epi64x(3));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
  const __m256d sin_neg = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, two), two));
  const __m256d cos_neg =
      _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(_mm256_add_epi64(q, one), two), two));
  const __m256d sv = _mm256_blendv_pd(ps, pc, swap);
  const __m256d cv = _mm256_blendv_pd(pc, ps, swap);
  s = _mm256_xor_pd(_mm256_xor_pd(sv, _mm256_and_pd(sin_neg, sign_mask)), sign_x);
  c = _mm256_xor_pd(cv, _mm256_and_pd(cos_neg, sign_mask));
}

void gaussian_log_weights(std::span<const double> x, double center, double inv_h, std::span<double> lw) {
  const std::size_t n = x.size();
  const __m256d vc = _mm256_set1_pd(center);
  const __m256d vi = _mm256_set1_pd(inv_h);
  const __m256d half = _mm256_set1_pd(-0.5);
  auto step = [&](__m256d xv, __m256d lv) {
    const __m256d u = _mm256_mul_pd(_mm256_sub_pd(xv, vc), vi);
    return _mm256_fmadd_pd(half, _mm256_mul_pd(u, u), lv);
  };
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(&lw[i], step(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&lw[i])));
  if (i < n) store_tail(&lw[i], n - i, step(load_tail(&x[i], n - i, center), load_tail(&lw[i], n - i, 0.0)));
}

void quartic_weights(std::span<const double> x, double center, double inv_h, std::span<double> w) {
  const std::size_t n = x.size();
  const __m256d vc = _mm256_set1_pd(center);
  const __m256d vi = _mm256_set1_pd(inv_h);
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  auto step = [&](__m256d xv, __m256d wv) {
    const __m256d u = _mm256_mul_pd(_mm256_sub_pd(xv, vc), vi);
    const __m256d inside = _mm256_cmp_pd(_mm256_and_pd(u, abs_mask), _mm256_set1_pd(0.5), _CMP_LE_OQ);
    const __m256d v = _mm256_fnmadd_pd(_mm256_set1_pd(4.0), _mm256_mul_pd(u, u), _mm256_set1_pd(1.0));
    const __m256d k = _mm256_and_pd(inside, _mm256_mul_pd(_mm256_set1_pd(1.875), _mm256_mul_pd(v, v)));
    return _mm256_mul_pd(wv, k);
  };
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(&w[i], step(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&w[i])));
  if (i < n) store_tail(&w[i], n - i, step(load_tail(&x[i], n - i, center), load_tail(&w[i], n - i, 0.0)));
}

void exp_shift(std::span<const double> lw, double shift, std::span<double> w) {
  const std::size_t n = lw.size();
  const __m256d vs = _mm256_set1_pd(shift);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(&w[i], exp_pd(_mm256_sub_pd(_mm256_loadu_pd(&lw[i]), vs)));
  if (i < n) store_tail(&w[i], n - i, exp_pd(_mm256_sub_pd(load_tail(&lw[i], n - i, -kInf), vs)));
}

double lse_affine(std::span<const double> z, std::span<const double> lw, double t) {
  const std::size_t n = z.size();
  const __m256d vt = _mm256_set1_pd(t);
  __m256d vmax = _mm256_set1_pd(-kInf);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    vmax = _mm256_max_pd(vmax, _mm256_fmadd_pd(vt, _mm256_loadu_pd(&z[i]), _mm256_loadu_pd(&lw[i])));
  if (i < n) vmax = _mm256_max_pd(vmax, _mm256_fmadd_pd(vt, load_tail(&z[i], n - i, 0.0), load_tail(&lw[i], n - i, -kInf)));
  const double top = hmax(vmax);
  if (std::isinf(top)) return top;
  const __m256d vtop = _mm256_set1_pd(top);
  __m256d acc = _mm256_setzero_pd();
  for (i = 0; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_fmadd_pd(vt, _mm256_loadu_pd(&z[i]), _mm256_loadu_pd(&lw[i]));
    acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(a, vtop)));
  }
  if (i < n) {
    const __m256d a = _mm256_fmadd_pd(vt, load_tail(&z[i], n - i, 0.0), load_tail(&lw[i], n - i, -kInf));
    acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(a, vtop)));
  }
  return top + std::log(hsum(acc));
}

Moments weighted_moments(std::span<const double> w, std::span<const double> z, double ref) {
  const std::size_t n = w.size();
  const __m256d vr = _mm256_set1_pd(ref);
  __m256d sw = _mm256_setzero_pd(), swd = sw, swd2 = sw, sw2 = sw;
  auto step = [&](__m256d wv, __m256d zv) {
    const __m256d d = _mm256_sub_pd(zv, vr);
    const __m256d wd = _mm256_mul_pd(wv, d);
    sw = _mm256_add_pd(sw, wv);
    swd = _mm256_add_pd(swd, wd);
    swd2 = _mm256_fmadd_pd(wd, d, swd2);
    sw2 = _mm256_fmadd_pd(wv, wv, sw2);
  };
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) step(_mm256_loadu_pd(&w[i]), _mm256_loadu_pd(&z[i]));
  if (i < n) step(load_tail(&w[i], n - i, 0.0), load_tail(&z[i], n - i, ref));
  return {hsum(sw), hsum(swd), hsum(swd2), hsum(sw2)};
}

CisSums weighted_cis(std::span<const double> w, std::span<const double> z, double s) {
  const std::size_t n = w.size();
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d sw = _mm256_setzero_pd(), sc = sw, ss = sw;
  auto step = [&](__m256d wv, __m256d zv) {
    const __m256d a = _mm256_mul_pd(vs, zv);
    __m256d sv, cv;
    if (_mm256_movemask_pd(_mm256_cmp_pd(_mm256_and_pd(a, abs_mask), _mm256_set1_pd(1e7), _CMP_GT_OQ))) {
      alignas(32) double lane[4], ls[4], lc[4];
      _mm256_store_pd(lane, a);
      for (int k = 0; k < 4; ++k) {
        ls[k] = std::sin(lane[k]);
        lc[k] = std::cos(lane[k]);
      }
      sv = _mm256_load_pd(ls);
      cv = _mm256_load_pd(lc);
    } else {
      sincos_pd(a, sv, cv);
    }
    sw = _mm256_add_pd(sw, wv);
    sc = _mm256_fmadd_pd(wv, cv, sc);
    ss = _mm256_fmadd_pd(wv, sv, ss);
  };
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) step(_mm256_loadu_pd(&w[i]), _mm256_loadu_pd(&z[i]));
  if (i < n) step(load_tail(&w[i], n - i, 0.0), load_tail(&z[i], n - i, 0.0));
  return {hsum(sw), hsum(sc), hsum(ss)};
}

double weighted_indicator(std::span<const double> w, std::span<const double> z, double threshold) {
  const std::size_t n = w.size();
  const __m256d vt = _mm256_set1_pd(threshold);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_cmp_pd(_mm256_loadu_pd(&z[i]), vt, _CMP_LE_OQ), _mm256_loadu_pd(&w[i])));
  if (i < n)
    acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_cmp_pd(load_tail(&z[i], n - i, kInf), vt, _CMP_LE_OQ), load_tail(&w[i], n - i, 0.0)));
  return hsum(acc);
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2",           gaussian_log_weights, quartic_weights, exp_shift, lse_affine,
                                 weighted_moments, weighted_cis,         weighted_indicator};
  return table;
}

}  // namespace npmix::simd
