#pragma once

// Certified isolation of the dominant root alpha(k) of
//   Psi_k(x) = x^k - x^(k-1) - ... - x - 1,
// the unique real root in (2(1 - 2^-k), 2), and the constants derived from it.
//
// Strategy: bisect until the bracket is narrow, then contract with an interval
// Newton iteration on N(x) = x^(k+1) - 2x^k + 1 = Psi_k(x) (x - 1), whose
// derivative x^(k-1) ((k+1)x - 2k) is positive on the bracket. Every returned
// enclosure is certified by exact rational sign evaluation at the endpoints;
// the floating-point iteration only decides where to look.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "klucas/errors.hpp"
#include "klucas/interval.hpp"
#include "klucas/numutil.hpp"
#include "klucas/sequence.hpp"

namespace klucas {

inline constexpr long kPrecisionCapBits = 1L << 21;

// Psi_k at an exact rational point.
inline mpq_class psi_eval(int k, const mpq_class& x) {
    if (k < 2) throw std::domain_error("psi_eval: k >= 2");
    if (x == 1) return mpq_class(1 - k);
    mpq_class xk;  // x^k
    mpz_pow_ui(xk.get_num_mpz_t(), x.get_num_mpz_t(), static_cast<unsigned long>(k));
    mpz_pow_ui(xk.get_den_mpz_t(), x.get_den_mpz_t(), static_cast<unsigned long>(k));
    // (x^(k+1) - 2 x^k + 1) / (x - 1), numerator grouped as x^k (x-2) + 1
    return (xk * (x - 2) + 1) / (x - 1);
}

// Exact sign of Psi_k at a rational point, avoiding the full quotient.
inline int psi_sign_at(int k, const mpq_class& x) {
    if (x == 1) return -1;  // Psi_k(1) = 1 - k < 0 for k >= 2
    const mpz_class& p = x.get_num();
    const mpz_class& q = x.get_den();
    mpz_class t = pow_z(p, static_cast<unsigned long>(k)) * (p - 2 * q) +
                  pow_z(q, static_cast<unsigned long>(k + 1));
    int num_sign = sgn(t);
    int den_sign = sgn(mpz_class(p - q));
    return num_sign * den_sign;
}

// f_k at an exact rational point: (x - 1) / (2 + (k+1)(x - 2)).
inline mpq_class f_eval(int k, const mpq_class& x) {
    if (k < 2) throw std::domain_error("f_eval: k >= 2");
    mpq_class den = 2 + (k + 1) * (x - 2);
    if (den == 0) throw std::domain_error("f_eval: pole of f_k");
    return (x - 1) / den;
}

struct RootCertificate {
    int k = 0;
    RealInterval alpha;       // width <= 2^-precision_bits, inside (2(1-2^-k), 2)
    long precision_bits = 0;  // the guarantee the enclosure was built for
    int sign_lo = 0;          // exact sign of Psi_k at alpha.lo (always -1)
    int sign_hi = 0;          // exact sign of Psi_k at alpha.hi (always +1)
};

// Open bracket (2(1 - 2^-k), 2) = ((2^k - 1)/2^(k-1), 2) as exact rationals.
inline mpq_class root_bracket_lo(int k) {
    return mpq_class((mpz_class(1) << static_cast<unsigned>(k)) - 1,
                     mpz_class(1) << static_cast<unsigned>(k - 1));
}

namespace detail {

inline std::optional<RealInterval> intersect(const RealInterval& a, const RealInterval& b) {
    mpfr_srcptr lo = mpfr_cmp(a.lo(), b.lo()) >= 0 ? a.lo() : b.lo();
    mpfr_srcptr hi = mpfr_cmp(a.hi(), b.hi()) <= 0 ? a.hi() : b.hi();
    if (mpfr_cmp(lo, hi) > 0) return std::nullopt;
    return RealInterval::from_endpoints(lo, hi, std::max(a.precision(), b.precision()));
}

// N(x) = x^k (x - 2) + 1 over an enclosure.
inline RealInterval eval_n(int k, const RealInterval& x) {
    return x.pow_si(k) * (x - 2) + 1;
}

// One attempt at a certified enclosure at a given working precision.
inline std::optional<RootCertificate> isolate_root(int k, long target_bits, mpfr_prec_t work) {
    mpfr_t lo, hi, mid;
    mpfr_init2(lo, work);
    mpfr_init2(hi, work);
    mpfr_init2(mid, work);
    struct Guard {
        mpfr_ptr a, b, c;
        ~Guard() {
            mpfr_clear(a);
            mpfr_clear(b);
            mpfr_clear(c);
        }
    } guard{lo, hi, mid};

    // 2 - 2^(1-k) and 2; exact at work >= k+1 bits
    mpfr_set_ui(lo, 2, MPFR_RNDN);
    mpfr_set_ui_2exp(mid, 1, static_cast<mpfr_exp_t>(1 - k), MPFR_RNDN);
    mpfr_sub(lo, lo, mid, MPFR_RNDD);
    mpfr_set_ui(hi, 2, MPFR_RNDN);

    auto bisect_once = [&](RealInterval& x) -> bool {
        x.midpoint(mid);
        if (mpfr_cmp(mid, x.lo()) <= 0 || mpfr_cmp(mid, x.hi()) >= 0) return false;  // out of headroom
        int s = psi_sign_at(k, RealInterval::to_q(mid));
        if (s == 0) throw std::logic_error("rational point cannot be a root of Psi_k");
        if (s < 0)
            x = RealInterval::from_endpoints(mid, x.hi(), work);
        else
            x = RealInterval::from_endpoints(x.lo(), mid, work);
        return true;
    };

    RealInterval x = RealInterval::from_endpoints(lo, hi, work);
    while (!x.width_le_2exp(-8))
        if (!bisect_once(x)) return std::nullopt;

    for (int iter = 0; iter < 4 * 64 && !x.width_le_2exp(-target_bits); ++iter) {
        x.midpoint(mid);
        RealInterval xm = RealInterval::from_endpoints(mid, mid, work);
        RealInterval nm = eval_n(k, xm);
        RealInterval np = x.pow_si(k - 1) * ((static_cast<long>(k) + 1) * x - 2L * k);
        if (!np.is_positive()) {
            if (!bisect_once(x)) return std::nullopt;
            continue;
        }
        auto next = intersect(x, xm - nm / np);
        if (!next) throw std::logic_error("interval Newton lost the root");
        // insist on real contraction, otherwise fall back to a bisection step
        if (next->width_q() * 8 > x.width_q() * 7) {
            if (!bisect_once(x)) return std::nullopt;
        } else {
            x = *next;
        }
    }
    if (!x.width_le_2exp(-target_bits)) return std::nullopt;

    // Pull endpoints strictly inside the open bracket if they still touch it.
    mpq_class bracket_lo = root_bracket_lo(k);
    for (int i = 0; i < 4 && !(x.certainly_above(bracket_lo) && x.certainly_below(mpq_class(2))); ++i)
        if (!bisect_once(x)) return std::nullopt;
    if (!(x.certainly_above(bracket_lo) && x.certainly_below(mpq_class(2)))) return std::nullopt;

    RootCertificate cert;
    cert.k = k;
    cert.sign_lo = psi_sign_at(k, x.lo_q());
    cert.sign_hi = psi_sign_at(k, x.hi_q());
    if (cert.sign_lo != -1 || cert.sign_hi != +1) return std::nullopt;
    cert.alpha = std::move(x);
    cert.precision_bits = target_bits;
    return cert;
}

}  // namespace detail

// Certified enclosure of alpha(k) with width <= 2^-precision_bits.
inline RootCertificate dominant_root(int k, long precision_bits) {
    if (k < 2) throw std::domain_error("dominant_root: k >= 2");
    if (precision_bits < 16) precision_bits = 16;
    if (precision_bits > kPrecisionCapBits)
        throw resource_error("requested root precision beyond the cap");
    long work = std::max({192L, precision_bits + 32, static_cast<long>(k) + 64});
    for (; work <= kPrecisionCapBits; work *= 2) {
        auto cert = detail::isolate_root(k, precision_bits, static_cast<mpfr_prec_t>(work));
        if (cert) return std::move(*cert);
    }
    throw resource_error("root isolation exhausted the precision cap");
}

struct DerivedConstants {
    int k = 0;
    RealInterval alpha;
    RealInterval f_alpha;                // (alpha-1) / (2 + (k+1)(alpha-2)), in (1/2, 3/4)
    RealInterval two_alpha_minus_one;    // in (3 - 4/2^k, 3)
    RealInterval log_alpha;              // > 10/21, i.e. 1/log(alpha) < 2.1
    RealInterval log_two_alpha_minus_one;
    RealInterval log_f_alpha;            // negative
    long precision_bits = 0;
};

// Interval images of the root-derived constants, each log with width
// <= 2^-precision_bits, with the defining inequalities certified. Refines the
// root certificate internally when the input enclosure is too wide.
inline DerivedConstants derived_constants(RootCertificate cert, long precision_bits) {
    if (precision_bits < 16) precision_bits = 16;
    const int k = cert.k;
    const mpq_class near_three = 3 - mpq_class(4, mpz_class(1) << static_cast<unsigned>(k));
    long root_bits = std::max(cert.precision_bits, precision_bits + 32);
    for (;;) {
        if (cert.precision_bits < root_bits) cert = dominant_root(k, root_bits);
        const RealInterval& a = cert.alpha;
        DerivedConstants out;
        out.k = k;
        out.alpha = a;
        out.f_alpha = (a - 1) / ((static_cast<long>(k) + 1) * (a - 2) + 2);
        out.two_alpha_minus_one = 2L * a - 1;
        bool ok = out.f_alpha.certainly_above(mpq_class(1, 2)) &&
                  out.f_alpha.certainly_below(mpq_class(3, 4)) &&
                  out.two_alpha_minus_one.certainly_above(near_three) &&
                  out.two_alpha_minus_one.certainly_below(mpq_class(3));
        if (ok) {
            out.log_alpha = a.log();
            out.log_two_alpha_minus_one = out.two_alpha_minus_one.log();
            out.log_f_alpha = out.f_alpha.log();
            ok = out.log_alpha.certainly_above(mpq_class(10, 21)) &&
                 out.log_alpha.width_le_2exp(-precision_bits) &&
                 out.log_two_alpha_minus_one.width_le_2exp(-precision_bits) &&
                 out.log_f_alpha.width_le_2exp(-precision_bits);
        }
        if (ok) {
            out.precision_bits = precision_bits;
            return out;
        }
        if (root_bits >= kPrecisionCapBits)
            throw resource_error("derived constants exhausted the precision cap");
        root_bits = std::min(2 * root_bits, kPrecisionCapBits);
    }
}

// Enclosure of L_n - f_k(alpha) (2 alpha - 1) alpha^(n-1), certified < 3/2 in
// absolute value before it is returned. Starts from the supplied constants and
// escalates precision through the certificate when they are too wide.
inline RealInterval binet_residual(const RootCertificate& cert, const DerivedConstants& consts,
                                   long n) {
    const int k = cert.k;
    if (consts.k != k) throw std::domain_error("binet_residual: certificate/constants mismatch");
    mpz_class ln = term(KParams(k), n);
    const mpq_class bound(3, 2);
    long bits = consts.precision_bits;
    const DerivedConstants* dc = &consts;
    DerivedConstants refined;
    for (;;) {
        RealInterval resid =
            RealInterval::from_z(ln, static_cast<mpfr_prec_t>(bits + 64)) -
            dc->f_alpha * dc->two_alpha_minus_one * dc->alpha.pow_si(n - 1);
        if (resid.certainly_below(bound) && (-resid).certainly_below(bound)) return resid;
        if (bits >= kPrecisionCapBits)
            throw resource_error("binet residual exhausted the precision cap");
        bits = std::min(std::max(2 * bits, n + 96), kPrecisionCapBits);
        refined = derived_constants(cert, bits);
        dc = &refined;
    }
}

// Convenience overload deriving the constants at a precision adequate for n.
inline RealInterval binet_residual(const RootCertificate& cert, long n) {
    long bits = std::max({192L, n + 96, cert.precision_bits});
    return binet_residual(cert, derived_constants(cert, bits), n);
}

// Certified proximity checks used in the n < 2^(k/2) regime. Each confirms the
// stated inequality by squaring both sides in outward-rounded arithmetic (the
// difference may contain zero, but the square's upper endpoint is what the
// comparison needs).

// |alpha^(n-1) - 2^(n-1)| < 2^n / 2^(k/2)
inline bool certify_alpha_power_gap(const DerivedConstants& dc, long n) {
    RealInterval diff = dc.alpha.pow_si(n - 1) -
                        RealInterval::from_q(pow2_q(n - 1), dc.alpha.precision());
    return (diff * diff).certainly_below(pow2_q(2 * n - dc.k));
}

// |f_k(alpha) - 1/2| < 2k / 2^k
inline bool certify_f_alpha_gap(const DerivedConstants& dc) {
    RealInterval diff = dc.f_alpha - RealInterval::from_q(mpq_class(1, 2), dc.f_alpha.precision());
    return (diff * diff).certainly_below(mpq_class(4L * dc.k * dc.k) * pow2_q(-2 * dc.k));
}

// |(2 alpha - 1) - 3| < 4 / 2^k
inline bool certify_two_alpha_gap(const DerivedConstants& dc) {
    RealInterval diff = dc.two_alpha_minus_one - 3;
    return (diff * diff).certainly_below(pow2_q(4 - 2 * dc.k));
}

struct HeightBounds {
    double f_alpha;               // 3 log k
    double alpha;                 // 0.7 / k
    double two_alpha_minus_one;   // 3 / k
};

// Upper bounds on the logarithmic heights of the three algebraic numbers in
// the linear form, rounded up.
inline HeightBounds height_bounds(int k) {
    if (k < 2) throw std::domain_error("height_bounds: k >= 2");
    HeightBounds hb{};
    mpfr_t t;
    mpfr_init2(t, 64);
    mpfr_set_ui(t, static_cast<unsigned long>(k), MPFR_RNDU);
    mpfr_log(t, t, MPFR_RNDU);
    mpfr_mul_ui(t, t, 3, MPFR_RNDU);
    hb.f_alpha = mpfr_get_d(t, MPFR_RNDU);
    mpq_class q(7, 10 * static_cast<long>(k));
    mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDU);
    hb.alpha = mpfr_get_d(t, MPFR_RNDU);
    q = mpq_class(3, k);
    mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDU);
    hb.two_alpha_minus_one = mpfr_get_d(t, MPFR_RNDU);
    mpfr_clear(t);
    return hb;
}

}  // namespace klucas
