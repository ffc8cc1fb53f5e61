#pragma once

#include <gmpxx.h>

#include <stdexcept>

namespace klucas {

inline mpz_class pow_z(const mpz_class& base, unsigned long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline mpz_class pow10_z(unsigned long e) { return pow_z(10, e); }

inline mpz_class floor_q(const mpq_class& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline mpz_class ceil_q(const mpq_class& q) {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

// Nearest integer, ties toward +infinity: floor(q + 1/2). Deterministic
// rounding matters for reproducible reduction transcripts.
inline mpz_class round_q(const mpq_class& q) {
    mpq_class t = q + mpq_class(1, 2);
    return floor_q(t);
}

// 2^e as an exact rational, e of either sign.
inline mpq_class pow2_q(long e) {
    if (e >= 0) return mpq_class(mpz_class(1) << static_cast<unsigned long>(e));
    return mpq_class(1, mpz_class(1) << static_cast<unsigned long>(-e));
}

// p_s, the s-th prime, 1-indexed (p_1 = 2). Trial division; intended for the
// small s that index the smoothness prime sets.
inline long nth_prime(long s) {
    if (s < 1) throw std::domain_error("nth_prime: s >= 1");
    long count = 0;
    for (long c = 2;; ++c) {
        bool prime = true;
        for (long d = 2; d * d <= c; ++d)
            if (c % d == 0) {
                prime = false;
                break;
            }
        if (prime && ++count == s) return c;
    }
}

// Distance from q to the nearest integer, in [0, 1/2].
inline mpq_class int_dist_q(const mpq_class& q) {
    mpq_class d = q - round_q(q);
    if (d < 0) d = -d;
    return d;
}

inline bool is_integer_q(const mpq_class& q) { return q.get_den() == 1; }

}  // namespace klucas
