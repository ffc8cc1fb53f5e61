#pragma once

// Closed-form bound evaluators: Matveev's lower bound for linear forms in
// logarithms, the analytic x/(log x)^m inversion lemma, and the derivation
// chain that turns them into explicit caps on the index n and the order k of
// a candidate smooth term.
//
// Every value returned here is an upper bound (or a lower-bound magnitude)
// and is computed in outward-rounded interval arithmetic, then rounded up
// once more on the way out to double. Decimal constants are kept as exact
// rationals; a rounded-down upper bound would be unsound.

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "klucas/interval.hpp"
#include "klucas/numutil.hpp"

namespace klucas {

struct BoundReport {
    std::string name;
    std::vector<std::pair<std::string, double>> inputs;
    double value = 0.0;
    std::string side;  // "upper-bound" or "lower-bound-magnitude"
};

namespace detail {

inline constexpr mpfr_prec_t kBoundPrec = 192;

inline RealInterval iv(long v) { return RealInterval::from_long(v, kBoundPrec); }

inline RealInterval iv(const mpq_class& q) { return RealInterval::from_q(q, kBoundPrec); }

inline RealInterval iv(double v) {
    if (!std::isfinite(v)) throw std::domain_error("bound input not finite");
    return RealInterval::from_q(mpq_class(v), kBoundPrec);  // doubles are exact rationals
}

// x^(e + 1/2) for a positive enclosure.
inline RealInterval pow_half(const RealInterval& x, long e) { return x.pow_si(e) * x.sqrt(); }

}  // namespace detail

struct MatveevInstance {
    long t = 0;             // number of logarithms
    long D = 1;             // field degree
    double B = 1.0;         // >= max |b_i|
    std::vector<double> A;  // t entries, each >= max(D h(gamma_i), |log gamma_i|, 0.16)
};

// The magnitude M with log|e^Lambda - 1| > -M:
//   M = 1.4 * 30^(t+3) * t^4.5 * D^2 (1+log D)(1+log B) * A_1...A_t.
inline double matveev_log_lower_bound(const MatveevInstance& inst) {
    if (inst.t < 1 || static_cast<std::size_t>(inst.t) != inst.A.size())
        throw std::domain_error("matveev: t >= 1 and |A| = t");
    if (inst.D < 1) throw std::domain_error("matveev: D >= 1");
    if (!(inst.B >= 1.0)) throw std::domain_error("matveev: B >= 1");
    for (double a : inst.A)
        if (!std::isfinite(a) || mpq_class(a) < mpq_class(16, 100))
            throw std::domain_error("matveev: every A_i >= 0.16");
    using detail::iv;
    RealInterval m = iv(mpq_class(7, 5)) * iv(mpq_class(pow_z(30, static_cast<unsigned long>(inst.t + 3))));
    m = m * detail::pow_half(iv(inst.t), 4);
    m = m * iv(mpq_class(inst.D * inst.D)) * (iv(inst.D).log() + 1);
    m = m * (iv(inst.B).log() + 1);
    for (double a : inst.A) m = m * iv(a);
    return m.to_double_up();
}

// Inversion of x/(log x)^m < T into x < 2^m T (log T)^m, valid once
// T > (4 m^2)^m.
inline double guz_bound(int m, double T) {
    if (m < 1) throw std::domain_error("guz_bound: m >= 1");
    mpq_class floor_T = mpq_class(pow_z(mpz_class(4L * m * m), static_cast<unsigned long>(m)));
    if (!std::isfinite(T) || mpq_class(T) <= floor_T)
        throw std::domain_error("guz_bound: T must exceed (4m^2)^m");
    using detail::iv;
    RealInterval t = iv(T);
    return (iv(mpq_class(pow2_q(m))) * t * t.log().pow_si(m)).to_double_up();
}

// Cap on log n when the largest prime factor of L_n^(k) is the s-th prime:
//   35 s log s + 3 s log k + 3 log(12 s + k).
inline double smooth_index_log_bound(long s, long k) {
    if (s < 2 || k < 2) throw std::domain_error("smooth_index_log_bound: s, k >= 2");
    using detail::iv;
    RealInterval ls = iv(s).log();
    RealInterval lk = iv(k).log();
    RealInterval v = 35L * (iv(s) * ls) + 3L * (iv(s) * lk) + 3L * iv(12 * s + k).log();
    return v.to_double_up();
}

// The same cap folded into a single prime-indexed form: 46 s log s when the
// order is at most s, and 46 s log k once s < k.
inline double smooth_index_log_bound_small_order(long s) {
    if (s < 2) throw std::domain_error("s >= 2");
    using detail::iv;
    return (46L * (iv(s) * iv(s).log())).to_double_up();
}

inline double smooth_index_log_bound_general(long s, long k) {
    if (s < 2 || k < 2) throw std::domain_error("s, k >= 2");
    using detail::iv;
    return (46L * (iv(s) * iv(k).log())).to_double_up();
}

// Matveev magnitude envelopes for the two linear forms the derivation uses.
// The full form carries the three algebraic constants alongside s primes; the
// prime form (the n < 2^(k/2) regime) is purely rational with D = 1.

// 5.5*10^12 * 30^s s^4.5 k^(3+s) (log k)^2 (log p_s)^s log(n+1)
inline BoundReport full_form_matveev_envelope(long s, long k, double n) {
    if (s < 2 || k < 2 || !(n >= 3)) throw std::domain_error("envelope: s,k >= 2, n >= 3");
    using detail::iv;
    RealInterval v = iv(mpq_class(55) * pow10_z(11)) *
                     iv(mpq_class(pow_z(30, static_cast<unsigned long>(s)))) *
                     detail::pow_half(iv(s), 4) * iv(k).pow_si(3 + s) * iv(k).log().pow_si(2) *
                     iv(nth_prime(s)).log().pow_si(s) * (iv(n) + 1).log();
    return BoundReport{"full-form-matveev-envelope",
                       {{"s", static_cast<double>(s)}, {"k", static_cast<double>(k)}, {"n", n}},
                       v.to_double_up(),
                       "lower-bound-magnitude"};
}

// 10^5 * 30^s s^4.5 (log p_s)^s log n
inline BoundReport prime_form_matveev_envelope(long s, double n) {
    if (s < 2 || !(n >= 3)) throw std::domain_error("envelope: s >= 2, n >= 3");
    using detail::iv;
    RealInterval v = iv(mpq_class(pow10_z(5))) *
                     iv(mpq_class(pow_z(30, static_cast<unsigned long>(s)))) *
                     detail::pow_half(iv(s), 4) * iv(nth_prime(s)).log().pow_si(s) * iv(n).log();
    return BoundReport{"prime-form-matveev-envelope",
                       {{"s", static_cast<double>(s)}, {"n", n}},
                       v.to_double_up(),
                       "lower-bound-magnitude"};
}

// Matveev instances matching the two envelopes, with the A-values assembled
// from the closed-form height bounds (k log p_s per prime, then 3, 0.7,
// 3 k log k for 2 alpha - 1, alpha, f_k(alpha)).
inline MatveevInstance full_form_instance(long s, long k, double n) {
    if (s < 2 || k < 2 || !(n >= 3)) throw std::domain_error("instance: s,k >= 2, n >= 3");
    MatveevInstance inst;
    inst.t = s + 3;
    inst.D = k;
    inst.B = n + 1;
    double klps = (detail::iv(k) * detail::iv(nth_prime(s)).log()).to_double_up();
    inst.A.assign(static_cast<std::size_t>(s), klps);
    inst.A.push_back(3.0);
    inst.A.push_back(0.7);
    inst.A.push_back((3L * (detail::iv(k) * detail::iv(k).log())).to_double_up());
    return inst;
}

inline MatveevInstance prime_form_instance(long s, double n) {
    if (s < 2 || !(n >= 3)) throw std::domain_error("instance: s >= 2, n >= 3");
    MatveevInstance inst;
    inst.t = s;
    inst.D = 1;
    inst.B = n + 1;
    inst.A.assign(static_cast<std::size_t>(s),
                  detail::iv(nth_prime(s)).log().to_double_up());
    return inst;
}

// The n >= 2^(k/2) branch: the order is capped by 2143 s log s, its log by
// 14 log s, and the index log by 86 s log s.
inline double order_bound_above_split(long s) {
    if (s < 2) throw std::domain_error("s >= 2");
    using detail::iv;
    return (2143L * (iv(s) * iv(s).log())).to_double_up();
}

inline double order_log_bound_above_split(long s) {
    if (s < 2) throw std::domain_error("s >= 2");
    return (14L * detail::iv(s).log()).to_double_up();
}

inline double index_log_bound_above_split(long s) {
    if (s < 2) throw std::domain_error("s >= 2");
    using detail::iv;
    return (86L * (iv(s) * iv(s).log())).to_double_up();
}

// The n < 2^(k/2) branch: k < 6*10^8 s^6.5 (60 log s)^s log s, log k < 26 s log s.
inline BoundReport order_bound_below_split(long s) {
    if (s < 2) throw std::domain_error("s >= 2");
    using detail::iv;
    RealInterval ls = iv(s).log();
    RealInterval v = iv(mpq_class(6) * pow10_z(8)) * detail::pow_half(iv(s), 6) *
                     (60L * ls).pow_si(s) * ls;
    return BoundReport{"order-bound-below-split",
                       {{"s", static_cast<double>(s)}},
                       v.to_double_up(),
                       "upper-bound"};
}

inline double order_log_bound_below_split(long s) {
    if (s < 2) throw std::domain_error("s >= 2");
    using detail::iv;
    return (26L * (iv(s) * iv(s).log())).to_double_up();
}

// Absolute index cap for 7-smooth terms: n < 1.4*10^27 k^7 (log k)^3.
// k is real-valued because the iterated reduction feeds back fractional caps.
inline double seven_smooth_index_bound(double k) {
    if (!(k >= 2)) throw std::domain_error("seven_smooth_index_bound: k >= 2");
    using detail::iv;
    RealInterval kk = iv(k);
    return (iv(mpq_class(14) * pow10_z(26)) * kk.pow_si(7) * kk.log().pow_si(3)).to_double_up();
}

// Absolute caps when the order exceeds 1000: the order bound instantiates the
// below-split chain at s = 4 with its sharpened leading constant, and the
// index bound follows by substitution.
struct AbsoluteCaps {
    double k_bound;
    double n_bound;
};

inline AbsoluteCaps seven_smooth_absolute_bounds() {
    using detail::iv;
    RealInterval l4 = iv(4L).log();
    RealInterval k_cap = iv(mpq_class(3) * pow10_z(8)) * detail::pow_half(iv(4L), 6) *
                         (60L * l4).pow_si(4) * l4;
    double kb = k_cap.to_double_up();
    return AbsoluteCaps{kb, seven_smooth_index_bound(kb)};
}

// (1/86) log log n, the largest-prime-factor threshold; needs log log n > 0.
inline double prime_factor_threshold(double n) {
    if (!(n >= 3)) throw std::domain_error("prime_factor_threshold: n >= 3");
    using detail::iv;
    return (iv(n).log().log() / detail::iv(86L)).to_double_up();
}

// 2^(k/2), the index threshold separating the two derivation branches.
inline double index_split_threshold(int k) {
    if (k < 2) throw std::domain_error("index_split_threshold: k >= 2");
    mpfr_t t;
    mpfr_init2(t, 64);
    mpfr_set_si(t, k, MPFR_RNDN);
    mpfr_div_2ui(t, t, 1, MPFR_RNDN);
    mpfr_exp2(t, t, MPFR_RNDU);
    double r = mpfr_get_d(t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
}

}  // namespace klucas
