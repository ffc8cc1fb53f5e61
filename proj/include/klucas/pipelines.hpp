#pragma once

// The two end-to-end reduction pipelines. The small-order pipeline builds,
// for each order k, the 7-dimensional approximation lattice over the four
// prime logarithms and the three root-derived logarithms, and converts the
// certified shortest-distance bound into a cap on the index n. The
// large-order pipeline iterates the 4-dimensional prime-logarithm lattice,
// feeding each round's order cap back into the index cap.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "klucas/bounds.hpp"
#include "klucas/errors.hpp"
#include "klucas/interval.hpp"
#include "klucas/lattice.hpp"
#include "klucas/numutil.hpp"
#include "klucas/parallel.hpp"
#include "klucas/roots.hpp"

namespace klucas {

struct ReductionCertificate {
    int k = 0;  // order the certificate belongs to; 0 for the order-free stage
    mpz_class C;
    std::vector<mpz_class> eta_floors;
    std::vector<double> X;
    double X0 = 0.0;
    mpq_class c1_sq;
    mpq_class S;
    mpq_class T;
    double c3 = 0.0;
    double c4 = 0.0;
    DewegerStatus status = DewegerStatus::hypothesis_failed;
    double H_bound = 0.0;  // caps n-1 (small-order) or k/2 (large-order)
    int retries = 0;
    long precision_bits = 0;
};

namespace detail {

// Smallest power-of-ten exponent e with 10^e >= X0^dim, via upward rounding.
inline long scale_exponent(double X0, int dim) {
    RealInterval v = static_cast<long>(dim) * (RealInterval::from_q(mpq_class(X0), 96).log() /
                                               RealInterval::log_of_ulong(10, 96));
    return mpz_get_si(ceil_q(v.hi_q()).get_mpz_t());
}

}  // namespace detail

// One order's reduction: 7-dimensional lattice at scale C, coordinate caps
// X_i = min(n_cap, 4.62e50) on every coordinate, decay constant the lower
// endpoint of log alpha(k). A failed distance hypothesis raises C by 10^5,
// at most max_retries times; the final certificate is returned either way
// with its status intact.
inline ReductionCertificate reduce_small_k_case(int k, double n_cap,
                                                const mpz_class& C0 = pow10_z(355),
                                                int max_retries = 5) {
    if (k < 2 || k > 1000) throw std::domain_error("reduce_small_k_case: 2 <= k <= 1000");
    if (!(n_cap > 0) || !std::isfinite(n_cap))
        throw std::domain_error("reduce_small_k_case: n_cap must be positive and finite");
    if (C0 <= 0) throw std::domain_error("reduce_small_k_case: C must be positive");

    const double X0 = std::min(n_cap, 4.62e50);
    const std::vector<double> X(7, X0);
    ReductionCertificate cert;
    cert.k = k;
    cert.c3 = 12.0;
    cert.X = X;
    cert.X0 = X0;

    mpz_class C = C0;
    for (int attempt = 0;; ++attempt) {
        long bits = static_cast<long>(mpz_sizeinbase(C.get_mpz_t(), 2)) + 64;
        for (;; bits *= 2) {
            if (bits > kPrecisionCapBits)
                throw resource_error("reduce_small_k_case: precision cap while disambiguating floors");
            RootCertificate rc = dominant_root(k, bits + 32);
            DerivedConstants dc = derived_constants(rc, bits);
            const mpfr_prec_t prec = static_cast<mpfr_prec_t>(bits + 32);
            std::vector<RealInterval> etas = {
                RealInterval::log_of_ulong(2, prec), RealInterval::log_of_ulong(3, prec),
                RealInterval::log_of_ulong(5, prec), RealInterval::log_of_ulong(7, prec),
                dc.log_two_alpha_minus_one,          dc.log_alpha,
                dc.log_f_alpha};
            cert.c4 = dc.log_alpha.to_double_down();
            try {
                auto [basis, floors] = build_lattice(etas, C);
                ReducedBasis red = lll_reduce(basis);
                C1Bound c1 = c1_lower_bound(red, QVec(7, mpq_class(0)));
                DewegerResult dw = deweger_bound(c1.c1_sq, X, cert.c3, cert.c4, C);
                cert.C = C;
                cert.eta_floors = floors;
                cert.c1_sq = c1.c1_sq;
                cert.S = dw.S;
                cert.T = dw.T;
                cert.status = dw.status;
                cert.H_bound = dw.H_bound;
                cert.retries = attempt;
                cert.precision_bits = bits;
                break;
            } catch (const ambiguous_floor&) {
                continue;  // tighter enclosures resolve the floor
            }
        }
        if (cert.status == DewegerStatus::ok || attempt >= max_retries) return cert;
        C *= pow10_z(5);
    }
}

struct SmallKSweep {
    int k_lo = 0;
    int k_hi = 0;
    std::vector<ReductionCertificate> certificates;  // indexed by k - k_lo
    bool all_ok = false;
    double max_H = 0.0;  // largest n-1 cap among the certificates
    int argmax_k = 0;
    int max_retries_used = 0;
};

inline SmallKSweep reduce_small_k_sweep(int k_lo = 2, int k_hi = 1000,
                                        int workers = default_worker_count()) {
    if (k_lo < 2 || k_hi < k_lo) throw std::domain_error("reduce_small_k_sweep: bad range");
    SmallKSweep out;
    out.k_lo = k_lo;
    out.k_hi = k_hi;
    out.certificates.resize(static_cast<std::size_t>(k_hi - k_lo + 1));
    parallel_for(k_lo, static_cast<long>(k_hi) + 1, workers, [&](long k) {
        double n_cap = seven_smooth_index_bound(static_cast<double>(k));
        out.certificates[static_cast<std::size_t>(k - k_lo)] =
            reduce_small_k_case(static_cast<int>(k), n_cap);
    });
    out.all_ok = true;
    for (const ReductionCertificate& c : out.certificates) {
        out.max_retries_used = std::max(out.max_retries_used, c.retries);
        if (c.status != DewegerStatus::ok) {
            out.all_ok = false;
            continue;
        }
        if (c.H_bound > out.max_H) {
            out.max_H = c.H_bound;
            out.argmax_k = c.k;
        }
    }
    return out;
}

struct LargeKRound {
    double k_bound_in = 0.0;
    double n_bound_in = 0.0;
    ReductionCertificate cert;
    double k_bound_out = 0.0;
    double n_bound_out = 0.0;
};

enum class LargeKStatus { reached, no_progress, round_limit };

struct LargeKResult {
    std::vector<LargeKRound> rounds;
    double final_k_bound = 0.0;
    LargeKStatus status = LargeKStatus::round_limit;
};

// Iterated order reduction: each round scales by C = 10^(ceil(4 log10 X0) +
// margin), bumping the margin one digit whenever a floor is ambiguous or the
// distance hypothesis fails, reduces the 4-dimensional lattice, caps k/2,
// and recomputes the index cap from the new order cap. Rounds must strictly
// shrink the order bound; the loop stops below 1000 or at the round limit.
inline LargeKResult reduce_large_k_case(double k_bound, double n_bound, int max_rounds = 4,
                                        int max_margin = 25) {
    if (!(k_bound > 1000) || !std::isfinite(k_bound))
        throw std::domain_error("reduce_large_k_case: k bound must exceed 1000");
    if (!(n_bound > 1) || !std::isfinite(n_bound))
        throw std::domain_error("reduce_large_k_case: n bound must exceed 1");
    LargeKResult out;
    for (int round = 0; round < max_rounds; ++round) {
        LargeKRound r;
        r.k_bound_in = k_bound;
        r.n_bound_in = n_bound;
        const double X0 = n_bound;
        const std::vector<double> X(4, X0);
        const long base_exp = detail::scale_exponent(X0, 4);

        ReductionCertificate cert;
        cert.k = 0;
        cert.c3 = 72.0;
        cert.X = X;
        cert.X0 = X0;
        bool done = false;
        for (int margin = 0; margin <= max_margin && !done; ++margin) {
            mpz_class C = pow10_z(base_exp + margin);
            long bits = static_cast<long>(mpz_sizeinbase(C.get_mpz_t(), 2)) + 64;
            const mpfr_prec_t prec = static_cast<mpfr_prec_t>(bits + 32);
            std::vector<RealInterval> etas = {
                RealInterval::log_of_ulong(2, prec), RealInterval::log_of_ulong(3, prec),
                RealInterval::log_of_ulong(5, prec), RealInterval::log_of_ulong(7, prec)};
            cert.c4 = etas[0].to_double_down();
            try {
                auto [basis, floors] = build_lattice(etas, C);
                ReducedBasis red = lll_reduce(basis);
                C1Bound c1 = c1_lower_bound(red, QVec(4, mpq_class(0)));
                DewegerResult dw = deweger_bound(c1.c1_sq, X, cert.c3, cert.c4, C);
                if (dw.status != DewegerStatus::ok) continue;  // margin += 1
                cert.C = C;
                cert.eta_floors = floors;
                cert.c1_sq = c1.c1_sq;
                cert.S = dw.S;
                cert.T = dw.T;
                cert.status = dw.status;
                cert.H_bound = dw.H_bound;
                cert.retries = margin;
                cert.precision_bits = bits;
                done = true;
            } catch (const ambiguous_floor&) {
                continue;  // margin += 1
            }
        }
        if (!done) throw resource_error("reduce_large_k_case: margin cap without a valid round");

        const double k_new = std::floor(2.0 * cert.H_bound);
        r.cert = cert;
        r.k_bound_out = k_new;
        r.n_bound_out = seven_smooth_index_bound(k_new);
        if (!(k_new < k_bound)) {
            // A first round that cannot shrink the bound is divergent outright;
            // a later plateau still carries the useful part of the chain.
            if (out.rounds.empty())
                throw divergence_error("reduce_large_k_case: order bound failed to decrease");
            out.rounds.push_back(r);
            out.status = LargeKStatus::no_progress;
            out.final_k_bound = k_bound;
            return out;
        }
        out.rounds.push_back(r);
        k_bound = k_new;
        n_bound = r.n_bound_out;
        if (k_bound < 1000.0) {
            out.status = LargeKStatus::reached;
            out.final_k_bound = k_bound;
            return out;
        }
    }
    out.status = LargeKStatus::round_limit;
    out.final_k_bound = k_bound;
    return out;
}

}  // namespace klucas
