#pragma once

// Re-checkable invariant suites behind the `verify` command. Each runner
// re-derives one family of certified claims from scratch and reports
// pass/fail with the number of checks performed and a short detail line.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "klucas/bounds.hpp"
#include "klucas/errors.hpp"
#include "klucas/numutil.hpp"
#include "klucas/parallel.hpp"
#include "klucas/roots.hpp"
#include "klucas/sequence.hpp"
#include "klucas/smooth.hpp"

namespace klucas {

struct SuiteReport {
    std::string name;
    bool pass = false;
    long checks = 0;
    std::string detail;
};

// Closed forms at the head of each sequence: the power-of-two family, the
// first post-head term, and the strict upper envelope.
inline SuiteReport run_identities_suite(int k_max, int workers = default_worker_count()) {
    if (k_max < 2) throw std::domain_error("identities suite: k_max >= 2");
    SuiteReport rep{"identities", true, 0, ""};
    std::mutex mu;
    parallel_for(2, static_cast<long>(k_max) + 1, workers, [&](long k) {
        KParams p(static_cast<int>(k));
        IdentityReport r = check_identities(p, k + 50);
        std::lock_guard<std::mutex> lock(mu);
        rep.checks += r.terms_checked;
        if (!r.passed && rep.pass) {
            rep.pass = false;
            std::ostringstream os;
            os << "k=" << k << " n=" << r.first_failure_n << " family=" << r.failed_family;
            rep.detail = os.str();
        }
    });
    if (rep.pass) rep.detail = "all head identities hold";
    return rep;
}

// Certified dominant-term residual |L_n - f(a)(2a-1)a^(n-1)| < 3/2. The
// residual routine certifies the bound internally or throws; any failure to
// certify is a suite failure.
inline SuiteReport run_binet_suite(int k_lo, int k_hi, long n_max,
                                   int workers = default_worker_count()) {
    if (k_lo < 2 || k_hi < k_lo) throw std::domain_error("binet suite: need 2 <= k_lo <= k_hi");
    if (n_max < 2) throw std::domain_error("binet suite: n_max >= 2");
    SuiteReport rep{"binet", true, 0, ""};
    std::mutex mu;
    parallel_for(k_lo, static_cast<long>(k_hi) + 1, workers, [&](long k) {
        long bits = std::max(192L, n_max + 96);
        RootCertificate cert = dominant_root(static_cast<int>(k), bits);
        DerivedConstants dc = derived_constants(cert, bits);
        long done = 0;
        std::string fail;
        for (long n = 2; n <= n_max; ++n) {
            try {
                binet_residual(cert, dc, n);
                ++done;
            } catch (const resource_error& e) {
                std::ostringstream os;
                os << "k=" << k << " n=" << n << ": " << e.what();
                fail = os.str();
                break;
            }
        }
        std::lock_guard<std::mutex> lock(mu);
        rep.checks += done;
        if (!fail.empty() && rep.pass) {
            rep.pass = false;
            rep.detail = fail;
        }
    });
    if (rep.pass) rep.detail = "every residual certified below 3/2";
    return rep;
}

// Root enclosures: exact-endpoint bracket membership, the advertised width,
// and the exact polynomial signs at the endpoints.
inline SuiteReport run_roots_suite(int k_max, int workers = default_worker_count()) {
    if (k_max < 2) throw std::domain_error("roots suite: k_max >= 2");
    SuiteReport rep{"roots", true, 0, ""};
    std::mutex mu;
    parallel_for(2, static_cast<long>(k_max) + 1, workers, [&](long k) {
        RootCertificate c = dominant_root(static_cast<int>(k), 128);
        bool ok = c.alpha.lo_q() > root_bracket_lo(static_cast<int>(k)) && c.alpha.hi_q() < 2 &&
                  c.alpha.hi_q() - c.alpha.lo_q() <= pow2_q(-128) && c.sign_lo == -1 &&
                  c.sign_hi == 1 &&
                  psi_sign_at(static_cast<int>(k), c.alpha.lo_q()) == -1 &&
                  psi_sign_at(static_cast<int>(k), c.alpha.hi_q()) == 1;
        std::lock_guard<std::mutex> lock(mu);
        ++rep.checks;
        if (!ok && rep.pass) {
            rep.pass = false;
            rep.detail = "k=" + std::to_string(k);
        }
    });
    if (rep.pass) rep.detail = "all enclosures inside the open bracket at width 2^-128";
    return rep;
}

// Derived-constant ranges: f(a) strictly inside (1/2, 3/4) and 2a-1 strictly
// inside (3 - 4/2^k, 3), by exact endpoint comparison.
inline SuiteReport run_f_range_suite(int k_max, int workers = default_worker_count()) {
    if (k_max < 2) throw std::domain_error("f-range suite: k_max >= 2");
    SuiteReport rep{"f-range", true, 0, ""};
    std::mutex mu;
    parallel_for(2, static_cast<long>(k_max) + 1, workers, [&](long k) {
        DerivedConstants dc = derived_constants(dominant_root(static_cast<int>(k), 160), 96);
        mpq_class lo3(3);
        lo3 -= mpq_class(4) / pow2_q(static_cast<long>(k));
        bool ok = dc.f_alpha.lo_q() > mpq_class(1, 2) && dc.f_alpha.hi_q() < mpq_class(3, 4) &&
                  dc.two_alpha_minus_one.lo_q() > lo3 && dc.two_alpha_minus_one.hi_q() < 3;
        std::lock_guard<std::mutex> lock(mu);
        ++rep.checks;
        if (!ok && rep.pass) {
            rep.pass = false;
            rep.detail = "k=" + std::to_string(k);
        }
    });
    if (rep.pass) rep.detail = "f and 2a-1 ranges certified";
    return rep;
}

// Proximity estimates of the small-index regime n < 2^(k/2): the power gap,
// the f gap, and the 2a-1 gap, on a fixed sample grid.
inline SuiteReport run_proximity_suite() {
    SuiteReport rep{"proximity", true, 0, ""};
    const int ks[] = {12, 16, 20, 30, 50};
    for (int k : ks) {
        long bits = 6L * k + 128;
        DerivedConstants dc = derived_constants(dominant_root(k, bits), bits);
        const long ns[] = {k + 1L, 2L * k, 3L * k};
        for (long n : ns) {
            bool ok = certify_alpha_power_gap(dc, n);
            ++rep.checks;
            if (!ok && rep.pass) {
                rep.pass = false;
                rep.detail = "power gap at k=" + std::to_string(k) + " n=" + std::to_string(n);
            }
        }
        bool ok = certify_f_alpha_gap(dc) && certify_two_alpha_gap(dc);
        rep.checks += 2;
        if (!ok && rep.pass) {
            rep.pass = false;
            rep.detail = "constant gap at k=" + std::to_string(k);
        }
    }
    if (rep.pass) rep.detail = "all sampled proximity estimates certified";
    return rep;
}

// Threshold spot checks on the largest prime factor.
inline SuiteReport run_t11_suite(int k_lo, int k_hi, long n_max,
                                 int workers = default_worker_count()) {
    T11Report r = verify_t11(k_lo, k_hi, n_max, workers);
    SuiteReport rep{"t11", r.all_pass, r.pairs, ""};
    std::ostringstream os;
    os << r.passed << "/" << r.pairs << " pairs pass, " << r.skipped
       << " skipped; tightest ratio " << r.min_ratio << " at k=" << r.min_k << " n=" << r.min_n;
    rep.detail = os.str();
    return rep;
}

namespace detail {

// Largest integer x with x/(log x)^m <= T. The ratio is strictly increasing
// for x > e^m, so beyond a full scan of the initial segment the crossover is
// found by bisection — equivalent to an exhaustive scan.
inline long max_qualifying_integer(int m, double T) {
    auto ratio = [m](long x) {
        double lx = std::log(static_cast<double>(x));
        return static_cast<double>(x) / std::pow(lx, m);
    };
    long head_end = static_cast<long>(std::ceil(std::exp(m))) + 2;
    long best = 0;
    for (long x = 3; x <= head_end; ++x)
        if (ratio(x) <= T) best = x;
    // Bisect the monotone tail for the last qualifying integer.
    long lo = head_end;                 // ratio may still be <= T here
    long hi = static_cast<long>(1e15);  // far beyond any bound used in checks
    if (ratio(lo) > T) return best;
    while (lo + 1 < hi) {
        long mid = lo + (hi - lo) / 2;
        if (ratio(mid) <= T)
            lo = mid;
        else
            hi = mid;
    }
    return std::max(best, lo);
}

}  // namespace detail

// Soundness of the analytic inversion: every integer with x/(log x)^m <= T
// stays below the returned bound, for m in {1,2,3} at three admissible T
// values each.
inline SuiteReport run_guz_suite() {
    SuiteReport rep{"guz", true, 0, ""};
    struct Combo {
        int m;
        double T;
    };
    const Combo grid[] = {{1, 5.0},     {1, 50.0},    {1, 46657.0},
                          {2, 257.0},   {2, 5000.0},  {2, 46657.0},
                          {3, 46657.0}, {3, 50000.0}, {3, 60000.0}};
    for (const Combo& c : grid) {
        double bound = guz_bound(c.m, c.T);
        long q = detail::max_qualifying_integer(c.m, c.T);
        ++rep.checks;
        if (!(static_cast<double>(q) < bound) && rep.pass) {
            rep.pass = false;
            std::ostringstream os;
            os << "m=" << c.m << " T=" << c.T << " qualifier " << q << " >= bound " << bound;
            rep.detail = os.str();
        }
    }
    if (rep.pass) rep.detail = "largest qualifying integer below the bound on all nine grids";
    return rep;
}

}  // namespace klucas
