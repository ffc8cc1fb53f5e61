#pragma once

// Directed-rounding enclosures on top of MPFR. An interval carries dyadic
// endpoints [lo, hi] at a fixed working precision; every operation rounds the
// low endpoint down and the high endpoint up, so a composite expression's
// result is a guaranteed enclosure of the exact value. Endpoints are exact
// binary floats and convert losslessly to rationals, which is what the
// lattice layer relies on when it takes exact floors of C*eta.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace klucas {

class RealInterval {
public:
    explicit RealInterval(mpfr_prec_t prec = 64) : prec_(check_prec(prec)) {
        mpfr_init2(lo_, prec_);
        mpfr_init2(hi_, prec_);
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
    }

    RealInterval(const RealInterval& o) : prec_(o.prec_) {
        mpfr_init2(lo_, prec_);
        mpfr_init2(hi_, prec_);
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }

    RealInterval(RealInterval&& o) noexcept : prec_(o.prec_) {
        mpfr_init2(lo_, 2);
        mpfr_init2(hi_, 2);
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
    }

    RealInterval& operator=(RealInterval o) noexcept {
        std::swap(prec_, o.prec_);
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
        return *this;
    }

    ~RealInterval() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }

    static RealInterval from_long(long v, mpfr_prec_t prec) {
        RealInterval r(prec);
        mpfr_set_si(r.lo_, v, MPFR_RNDD);
        mpfr_set_si(r.hi_, v, MPFR_RNDU);
        return r;
    }

    static RealInterval from_z(const mpz_class& v, mpfr_prec_t prec) {
        RealInterval r(prec);
        mpfr_set_z(r.lo_, v.get_mpz_t(), MPFR_RNDD);
        mpfr_set_z(r.hi_, v.get_mpz_t(), MPFR_RNDU);
        return r;
    }

    static RealInterval from_q(const mpq_class& v, mpfr_prec_t prec) {
        RealInterval r(prec);
        mpfr_set_q(r.lo_, v.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_, v.get_mpq_t(), MPFR_RNDU);
        return r;
    }

    // Enclosure from already-directed endpoints.
    static RealInterval from_endpoints(mpfr_srcptr lo, mpfr_srcptr hi, mpfr_prec_t prec) {
        RealInterval r(prec);
        mpfr_set(r.lo_, lo, MPFR_RNDD);
        mpfr_set(r.hi_, hi, MPFR_RNDU);
        r.require_ordered();
        return r;
    }

    mpfr_prec_t precision() const { return prec_; }
    mpfr_srcptr lo() const { return lo_; }
    mpfr_srcptr hi() const { return hi_; }

    mpq_class lo_q() const { return to_q(lo_); }
    mpq_class hi_q() const { return to_q(hi_); }

    bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
    bool is_positive() const { return mpfr_sgn(lo_) > 0; }
    bool is_negative() const { return mpfr_sgn(hi_) < 0; }

    bool contains(const mpq_class& v) const {
        return mpfr_cmp_q(lo_, v.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, v.get_mpq_t()) >= 0;
    }

    // hi < v (the whole enclosure is certainly below v)
    bool certainly_below(const mpq_class& v) const { return mpfr_cmp_q(hi_, v.get_mpq_t()) < 0; }
    bool certainly_above(const mpq_class& v) const { return mpfr_cmp_q(lo_, v.get_mpq_t()) > 0; }

    // Exact width hi - lo as a rational (endpoints are dyadic).
    mpq_class width_q() const { return hi_q() - lo_q(); }

    bool width_le_2exp(long e) const {
        mpq_class w = width_q();
        mpq_class t;
        if (e >= 0) {
            t = mpz_class(1) << static_cast<unsigned long>(e);
        } else {
            t = mpq_class(1, mpz_class(1) << static_cast<unsigned long>(-e));
        }
        return w <= t;
    }

    RealInterval operator-() const {
        RealInterval r(prec_);
        mpfr_neg(r.lo_, hi_, MPFR_RNDD);
        mpfr_neg(r.hi_, lo_, MPFR_RNDU);
        return r;
    }

    friend RealInterval operator+(const RealInterval& a, const RealInterval& b) {
        RealInterval r(join_prec(a, b));
        mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
        mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
        return r;
    }

    friend RealInterval operator-(const RealInterval& a, const RealInterval& b) {
        RealInterval r(join_prec(a, b));
        mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
        mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
        return r;
    }

    friend RealInterval operator*(const RealInterval& a, const RealInterval& b) {
        RealInterval r(join_prec(a, b));
        mpfr_t p;
        mpfr_init2(p, r.prec_);
        bool first = true;
        for (int i = 0; i < 4; ++i) {
            mpfr_srcptr x = (i & 1) ? a.hi_ : a.lo_;
            mpfr_srcptr y = (i & 2) ? b.hi_ : b.lo_;
            mpfr_mul(p, x, y, MPFR_RNDD);
            if (first || mpfr_cmp(p, r.lo_) < 0) mpfr_set(r.lo_, p, MPFR_RNDD);
            mpfr_mul(p, x, y, MPFR_RNDU);
            if (first || mpfr_cmp(p, r.hi_) > 0) mpfr_set(r.hi_, p, MPFR_RNDU);
            first = false;
        }
        mpfr_clear(p);
        return r;
    }

    friend RealInterval operator/(const RealInterval& a, const RealInterval& b) {
        if (b.contains_zero())
            throw std::domain_error("interval division: denominator encloses zero");
        RealInterval r(join_prec(a, b));
        mpfr_t p;
        mpfr_init2(p, r.prec_);
        bool first = true;
        for (int i = 0; i < 4; ++i) {
            mpfr_srcptr x = (i & 1) ? a.hi_ : a.lo_;
            mpfr_srcptr y = (i & 2) ? b.hi_ : b.lo_;
            mpfr_div(p, x, y, MPFR_RNDD);
            if (first || mpfr_cmp(p, r.lo_) < 0) mpfr_set(r.lo_, p, MPFR_RNDD);
            mpfr_div(p, x, y, MPFR_RNDU);
            if (first || mpfr_cmp(p, r.hi_) > 0) mpfr_set(r.hi_, p, MPFR_RNDU);
            first = false;
        }
        mpfr_clear(p);
        return r;
    }

    friend RealInterval operator*(long s, const RealInterval& a) {
        return RealInterval::from_long(s, a.prec_) * a;
    }

    friend RealInterval operator+(const RealInterval& a, long s) {
        return a + RealInterval::from_long(s, a.prec_);
    }

    friend RealInterval operator-(const RealInterval& a, long s) {
        return a - RealInterval::from_long(s, a.prec_);
    }

    // Natural log; requires a strictly positive enclosure.
    RealInterval log() const {
        if (!is_positive()) throw std::domain_error("interval log: enclosure not positive");
        RealInterval r(prec_);
        mpfr_log(r.lo_, lo_, MPFR_RNDD);
        mpfr_log(r.hi_, hi_, MPFR_RNDU);
        return r;
    }

    // Square root of a nonnegative enclosure.
    RealInterval sqrt() const {
        if (mpfr_sgn(lo_) < 0) throw std::domain_error("interval sqrt: enclosure negative");
        RealInterval r(prec_);
        mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
        mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
        return r;
    }

    // Integer power of a strictly positive enclosure (monotone in the base).
    RealInterval pow_si(long e) const {
        if (!is_positive()) throw std::domain_error("interval pow: base not positive");
        RealInterval r(prec_);
        if (e >= 0) {
            mpfr_pow_ui(r.lo_, lo_, static_cast<unsigned long>(e), MPFR_RNDD);
            mpfr_pow_ui(r.hi_, hi_, static_cast<unsigned long>(e), MPFR_RNDU);
        } else {
            mpfr_pow_si(r.lo_, hi_, e, MPFR_RNDD);
            mpfr_pow_si(r.hi_, lo_, e, MPFR_RNDU);
        }
        return r;
    }

    // Exact enclosure of log(m) for a positive integer m.
    static RealInterval log_of_ulong(unsigned long m, mpfr_prec_t prec) {
        if (m == 0) throw std::domain_error("log of zero");
        RealInterval r(prec);
        mpfr_set_ui(r.lo_, m, MPFR_RNDN);  // exact for any reasonable m
        mpfr_log(r.hi_, r.lo_, MPFR_RNDU);
        mpfr_log(r.lo_, r.lo_, MPFR_RNDD);
        return r;
    }

    // Midpoint rounded to nearest at the working precision.
    void midpoint(mpfr_ptr out) const {
        mpfr_add(out, lo_, hi_, MPFR_RNDN);
        mpfr_div_2ui(out, out, 1, MPFR_RNDN);
    }

    double to_double_up() const { return mpfr_get_d(hi_, MPFR_RNDU); }
    double to_double_down() const { return mpfr_get_d(lo_, MPFR_RNDD); }

    // Decimal endpoint strings, rounded outward so the printed interval still
    // encloses the value.
    std::string lo_str(int digits) const { return fmt(lo_, digits, MPFR_RNDD); }
    std::string hi_str(int digits) const { return fmt(hi_, digits, MPFR_RNDU); }

    static mpq_class to_q(mpfr_srcptr x) {
        if (!mpfr_number_p(x)) throw std::domain_error("non-finite endpoint");
        mpq_class q;
        mpfr_get_q(q.get_mpq_t(), x);
        return q;
    }

private:
    static mpfr_prec_t check_prec(mpfr_prec_t p) {
        if (p < 2) throw std::domain_error("interval precision must be >= 2 bits");
        return p;
    }

    static mpfr_prec_t join_prec(const RealInterval& a, const RealInterval& b) {
        return std::max(a.prec_, b.prec_);
    }

    void require_ordered() const {
        if (mpfr_cmp(lo_, hi_) > 0) throw std::domain_error("interval endpoints out of order");
    }

    static std::string fmt(mpfr_srcptr x, int digits, mpfr_rnd_t rnd) {
        char* s = nullptr;
        if (mpfr_asprintf(&s, "%.*R*e", digits, rnd, x) < 0)
            throw std::runtime_error("mpfr_asprintf failed");
        std::string out(s);
        mpfr_free_str(s);
        return out;
    }

    mpfr_prec_t prec_;
    mpfr_t lo_, hi_;
};

}  // namespace klucas
