#pragma once

// Exact-arithmetic lattice tools: Gram-Schmidt data, LLL reduction with a
// rational Lovász parameter, the reduced-basis lower bound on lattice-point
// distance, approximation-lattice construction from certified enclosures, and
// the de Weger conversion of that lower bound into an exponent cap.
//
// Everything structural is exact (mpz columns, mpq Gram-Schmidt); floating
// point appears only on the way out of deweger_bound, with directed rounding.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "klucas/errors.hpp"
#include "klucas/interval.hpp"
#include "klucas/numutil.hpp"

namespace klucas {

using ZVec = std::vector<mpz_class>;
using QVec = std::vector<mpq_class>;
using ZMat = std::vector<ZVec>;  // columns

struct LatticeBasis {
    int dim = 0;
    ZMat cols;  // cols[j] is the (j+1)-th basis vector

    LatticeBasis() = default;
    explicit LatticeBasis(ZMat c) : dim(static_cast<int>(c.size())), cols(std::move(c)) {
        for (const ZVec& col : cols)
            if (static_cast<int>(col.size()) != dim)
                throw std::domain_error("lattice basis must be square");
        if (dim == 0) throw std::domain_error("lattice basis must be nonempty");
    }
};

namespace detail {

inline mpq_class dot_zz(const ZVec& a, const ZVec& b) {
    mpz_class s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return mpq_class(s);
}

inline mpq_class dot_qq(const QVec& a, const QVec& b) {
    mpq_class s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline mpq_class dot_zq(const ZVec& a, const QVec& b) {
    mpq_class s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += b[i] * a[i];
    return s;
}

// Determinant by fraction-free (Bareiss) elimination; exact.
inline mpz_class det_bareiss(const ZMat& cols) {
    const int n = static_cast<int>(cols.size());
    std::vector<ZVec> m(static_cast<std::size_t>(n), ZVec(static_cast<std::size_t>(n)));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    mpz_class prev = 1;
    int sign = 1;
    for (int p = 0; p < n - 1; ++p) {
        if (m[static_cast<std::size_t>(p)][static_cast<std::size_t>(p)] == 0) {
            int r = p + 1;
            while (r < n && m[static_cast<std::size_t>(r)][static_cast<std::size_t>(p)] == 0) ++r;
            if (r == n) return 0;
            std::swap(m[static_cast<std::size_t>(p)], m[static_cast<std::size_t>(r)]);
            sign = -sign;
        }
        for (int i = p + 1; i < n; ++i) {
            for (int j = p + 1; j < n; ++j) {
                mpz_class t = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * m[static_cast<std::size_t>(p)][static_cast<std::size_t>(p)] -
                              m[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)] * m[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)];
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = t;
            }
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)] = 0;
        }
        prev = m[static_cast<std::size_t>(p)][static_cast<std::size_t>(p)];
    }
    return sign * m[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(n - 1)];
}

// Solve M z = y exactly over the rationals (Gaussian elimination with
// partial pivoting on exact entries). M given by columns.
inline QVec solve_exact(const ZMat& cols, const QVec& y) {
    const int n = static_cast<int>(cols.size());
    std::vector<QVec> a(static_cast<std::size_t>(n), QVec(static_cast<std::size_t>(n) + 1));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = mpq_class(cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)] = y[static_cast<std::size_t>(i)];
    }
    for (int p = 0; p < n; ++p) {
        int r = p;
        while (r < n && a[static_cast<std::size_t>(r)][static_cast<std::size_t>(p)] == 0) ++r;
        if (r == n) throw rank_error("singular system in exact solve");
        std::swap(a[static_cast<std::size_t>(p)], a[static_cast<std::size_t>(r)]);
        for (int i = 0; i < n; ++i) {
            if (i == p || a[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)] == 0) continue;
            mpq_class f = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)] / a[static_cast<std::size_t>(p)][static_cast<std::size_t>(p)];
            for (int j = p; j <= n; ++j)
                a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -= f * a[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)];
        }
    }
    QVec z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        z[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)] / a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    return z;
}

}  // namespace detail

struct GramSchmidtData {
    std::vector<QVec> b_star;         // orthogonalized vectors
    std::vector<QVec> mu;             // mu[i][j] for j < i (ragged rows)
    QVec norms_sq;                    // ||b*_i||^2, all positive
};

inline GramSchmidtData gram_schmidt(const LatticeBasis& basis) {
    const int n = basis.dim;
    GramSchmidtData gs;
    gs.b_star.resize(static_cast<std::size_t>(n));
    gs.mu.resize(static_cast<std::size_t>(n));
    gs.norms_sq.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        QVec v(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r) v[static_cast<std::size_t>(r)] = mpq_class(basis.cols[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)]);
        gs.mu[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(i));
        for (int j = 0; j < i; ++j) {
            mpq_class m = detail::dot_zq(basis.cols[static_cast<std::size_t>(i)], gs.b_star[static_cast<std::size_t>(j)]) / gs.norms_sq[static_cast<std::size_t>(j)];
            gs.mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m;
            for (int r = 0; r < n; ++r) v[static_cast<std::size_t>(r)] -= m * gs.b_star[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)];
        }
        mpq_class nsq = detail::dot_qq(v, v);
        if (nsq == 0) throw rank_error("dependent columns in Gram-Schmidt");
        gs.b_star[static_cast<std::size_t>(i)] = std::move(v);
        gs.norms_sq[static_cast<std::size_t>(i)] = nsq;
    }
    return gs;
}

struct ReducedBasis {
    LatticeBasis basis;
    GramSchmidtData gs;
    ZMat transform;  // columns; basis = original * transform, det = +-1
};

namespace detail {

// Exact post-verification of every promise lll_reduce makes.
inline void verify_reduction(const LatticeBasis& original, const ReducedBasis& red,
                             const mpq_class& y_param) {
    const int n = original.dim;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            mpq_class m = red.gs.mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (m < 0) m = -m;
            if (m > mpq_class(1, 2)) throw std::logic_error("size reduction violated");
        }
    for (int i = 1; i < n; ++i) {
        const mpq_class& m = red.gs.mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(i - 1)];
        if (red.gs.norms_sq[static_cast<std::size_t>(i)] < (y_param - m * m) * red.gs.norms_sq[static_cast<std::size_t>(i - 1)])
            throw std::logic_error("Lovasz condition violated");
    }
    mpz_class dt = detail::det_bareiss(red.transform);
    if (dt != 1 && dt != -1) throw std::logic_error("transform not unimodular");
    for (int j = 0; j < n; ++j)
        for (int r = 0; r < n; ++r) {
            mpz_class s = 0;
            for (int l = 0; l < n; ++l)
                s += original.cols[static_cast<std::size_t>(l)][static_cast<std::size_t>(r)] * red.transform[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)];
            if (s != red.basis.cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)])
                throw std::logic_error("transform does not reproduce the reduced basis");
        }
}

}  // namespace detail

// LLL reduction over exact rationals. The working state follows the classic
// incremental scheme: mu and the squared Gram-Schmidt norms are updated in
// place under size-reduction steps and neighbor swaps, so no vector is ever
// re-orthogonalized from scratch inside the loop. A full recomputation at the
// end certifies the result independently of the incremental bookkeeping.
inline ReducedBasis lll_reduce(const LatticeBasis& input, const mpq_class& y_param = mpq_class(3, 4)) {
    if (!(y_param > mpq_class(1, 4) && y_param < 1))
        throw std::domain_error("Lovasz parameter must lie in (1/4, 1)");
    const int n = input.dim;
    ZMat b = input.cols;
    ZMat u(static_cast<std::size_t>(n), ZVec(static_cast<std::size_t>(n), 0));
    for (int j = 0; j < n; ++j) u[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = 1;

    std::vector<QVec> mu(static_cast<std::size_t>(n), QVec(static_cast<std::size_t>(n), mpq_class(0)));
    QVec bnorm(static_cast<std::size_t>(n), mpq_class(0));  // ||b*_i||^2
    int kmax = 0;

    auto gs_row = [&](int k) {
        // c[j] = <b_k, b*_j>, built through the mu recursion
        QVec c(static_cast<std::size_t>(k) + 1);
        for (int j = 0; j < k; ++j) {
            mpq_class t = detail::dot_zz(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(j)]);
            for (int l = 0; l < j; ++l) t -= mu[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] * c[static_cast<std::size_t>(l)];
            c[static_cast<std::size_t>(j)] = t;
            mu[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = t / bnorm[static_cast<std::size_t>(j)];
        }
        mpq_class t = detail::dot_zz(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(k)]);
        for (int l = 0; l < k; ++l) t -= mu[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] * c[static_cast<std::size_t>(l)];
        if (t == 0) throw rank_error("dependent columns in LLL");
        bnorm[static_cast<std::size_t>(k)] = t;
    };

    auto red = [&](int k, int l) {
        mpq_class m = mu[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
        if (m < mpq_class(1, 2) && m > mpq_class(-1, 2)) return;
        mpz_class q = round_q(m);
        for (int r = 0; r < n; ++r) {
            b[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] -= q * b[static_cast<std::size_t>(l)][static_cast<std::size_t>(r)];
            u[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] -= q * u[static_cast<std::size_t>(l)][static_cast<std::size_t>(r)];
        }
        mu[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] -= mpq_class(q);
        for (int i = 0; i < l; ++i) mu[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] -= mpq_class(q) * mu[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
    };

    auto swap_step = [&](int k) {
        std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(k - 1)]);
        std::swap(u[static_cast<std::size_t>(k)], u[static_cast<std::size_t>(k - 1)]);
        for (int j = 0; j < k - 1; ++j) std::swap(mu[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)], mu[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j)]);
        mpq_class m = mu[static_cast<std::size_t>(k)][static_cast<std::size_t>(k - 1)];
        mpq_class bp = bnorm[static_cast<std::size_t>(k)] + m * m * bnorm[static_cast<std::size_t>(k - 1)];
        mu[static_cast<std::size_t>(k)][static_cast<std::size_t>(k - 1)] = m * bnorm[static_cast<std::size_t>(k - 1)] / bp;
        bnorm[static_cast<std::size_t>(k)] = bnorm[static_cast<std::size_t>(k - 1)] * bnorm[static_cast<std::size_t>(k)] / bp;
        bnorm[static_cast<std::size_t>(k - 1)] = bp;
        for (int i = k + 1; i <= kmax; ++i) {
            mpq_class t = mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(k - 1)] - m * t;
            mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(k - 1)] =
                t + mu[static_cast<std::size_t>(k)][static_cast<std::size_t>(k - 1)] * mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        }
    };

    bnorm[0] = detail::dot_zz(b[0], b[0]);
    if (bnorm[0] == 0) throw rank_error("zero column in LLL input");
    int k = 1;
    while (k < n) {
        if (k > kmax) {
            kmax = k;
            gs_row(k);
        }
        red(k, k - 1);
        if (bnorm[static_cast<std::size_t>(k)] <
            (y_param - mu[static_cast<std::size_t>(k)][static_cast<std::size_t>(k - 1)] * mu[static_cast<std::size_t>(k)][static_cast<std::size_t>(k - 1)]) *
                bnorm[static_cast<std::size_t>(k - 1)]) {
            swap_step(k);
            k = std::max(k - 1, 1);
        } else {
            for (int l = k - 2; l >= 0; --l) red(k, l);
            ++k;
        }
    }

    ReducedBasis out;
    out.basis = LatticeBasis(std::move(b));
    out.gs = gram_schmidt(out.basis);
    out.transform = std::move(u);
    detail::verify_reduction(input, out, y_param);
    return out;
}

enum class SigmaCase { in_lattice, out_of_lattice };

struct C1Bound {
    mpq_class c1_sq;
    mpq_class sigma;
    SigmaCase sigma_case = SigmaCase::in_lattice;
};

// Lower bound on the squared distance from y to the lattice (or on the
// squared length of the shortest nonzero vector when y is a lattice point):
// c1^2 = sigma^2 ||b_1||^2 / c2 with c2 = max_j ||b_1||^2 / ||b*_j||^2.
inline C1Bound c1_lower_bound(const ReducedBasis& red, const QVec& y) {
    const int n = red.basis.dim;
    if (static_cast<int>(y.size()) != n) throw std::domain_error("c1_lower_bound: dimension mismatch");
    QVec z = detail::solve_exact(red.basis.cols, y);
    C1Bound out;
    out.sigma = 1;
    out.sigma_case = SigmaCase::in_lattice;
    bool integral = true;
    for (const mpq_class& zi : z)
        if (!is_integer_q(zi)) {
            integral = false;
            break;
        }
    if (!integral) {
        int i0 = -1;
        for (int i = 0; i < n; ++i)
            if (z[static_cast<std::size_t>(i)] != 0) i0 = i;
        // distance of the last nonzero coordinate to its nearest integer; it
        // can be zero (vacuous but valid bound) when that coordinate happens
        // to be integral
        out.sigma = int_dist_q(z[static_cast<std::size_t>(i0)]);
        out.sigma_case = SigmaCase::out_of_lattice;
    }
    const mpq_class& b1 = red.gs.norms_sq[0];
    mpq_class c2 = 1;  // j = 0 term is exactly 1
    for (int j = 1; j < n; ++j) {
        mpq_class r = b1 / red.gs.norms_sq[static_cast<std::size_t>(j)];
        if (r > c2) c2 = r;
    }
    out.c1_sq = out.sigma * out.sigma * b1 / c2;
    return out;
}

// Approximation lattice: identity in the leading rows, floors of C * eta_i in
// the last row. The floors come from certified enclosures and must be
// unambiguous: if an enclosure of C * eta_i straddles an integer, the floor is
// not determined and the caller has to refine the enclosures.
inline std::pair<LatticeBasis, ZVec> build_lattice(const std::vector<RealInterval>& etas,
                                                   const mpz_class& C) {
    const int n = static_cast<int>(etas.size());
    if (n < 2) throw std::domain_error("build_lattice: need at least 2 entries");
    if (C <= 0) throw std::domain_error("build_lattice: C must be positive");
    ZVec floors(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        mpq_class scaled_lo = mpq_class(C) * etas[static_cast<std::size_t>(i)].lo_q();
        mpq_class scaled_hi = mpq_class(C) * etas[static_cast<std::size_t>(i)].hi_q();
        mpz_class flo = floor_q(scaled_lo);
        mpz_class fhi = floor_q(scaled_hi);
        if (flo != fhi)
            throw ambiguous_floor(static_cast<std::size_t>(i),
                                  "floor of C*eta straddles an integer at index " + std::to_string(i));
        floors[static_cast<std::size_t>(i)] = flo;
    }
    ZMat cols(static_cast<std::size_t>(n), ZVec(static_cast<std::size_t>(n), 0));
    for (int j = 0; j < n; ++j) {
        if (j < n - 1) cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = 1;
        cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(n - 1)] = floors[static_cast<std::size_t>(j)];
    }
    return {LatticeBasis(std::move(cols)), floors};
}

enum class DewegerStatus { ok, hypothesis_failed };

struct DewegerResult {
    DewegerStatus status = DewegerStatus::hypothesis_failed;
    double H_bound = 0.0;   // valid when status == ok; rounded up
    mpq_class S;            // sum of X_i^2 over the first dim-1 coordinates
    mpq_class T;            // (1 + sum of all X_i) / 2
    bool degenerate_branch; // the all-but-last-zero alternative always exists
};

// Converts the exact distance bound c1^2 into a cap on the exponent H of a
// small linear form |eta_0 + sum x_i eta_i| <= c3 exp(-c4 H) with |x_i| <= X_i:
//   H <= (log(C c3) - log(sqrt(c1^2 - S) - T)) / c4,
// provided c1^2 >= T^2 + S. A failed hypothesis is an expected signal (the
// caller raises C), not an exception. c4 must be a lower bound on the true
// decay constant and c3 an upper bound on the form's size, so the quotient
// rounds conservatively upward.
inline DewegerResult deweger_bound_st(const mpq_class& c1_sq, const mpq_class& S,
                                      const mpq_class& T, double c3, double c4,
                                      const mpz_class& C) {
    if (!(c3 > 0) || !(c4 > 0)) throw std::domain_error("deweger_bound: c3, c4 > 0");
    if (S < 0 || T <= 0) throw std::domain_error("deweger_bound: S >= 0, T > 0");
    if (C <= 0) throw std::domain_error("deweger_bound: C positive");
    DewegerResult out;
    out.degenerate_branch = true;
    out.S = S;
    out.T = T;
    if (c1_sq <= T * T + S) {  // strict margin required for the log
        out.status = DewegerStatus::hypothesis_failed;
        return out;
    }
    mpq_class radicand = c1_sq - S;  // > T^2 > 0 here
    mpq_class log_num_arg = mpq_class(C) * mpq_class(c3);
    for (mpfr_prec_t prec = 192;; prec *= 2) {
        RealInterval inner =
            RealInterval::from_q(radicand, prec).sqrt() - RealInterval::from_q(T, prec);
        if (inner.is_positive()) {
            RealInterval h = (RealInterval::from_q(log_num_arg, prec).log() - inner.log()) /
                             RealInterval::from_q(mpq_class(c4), prec);
            out.status = DewegerStatus::ok;
            out.H_bound = h.to_double_up();
            return out;
        }
        if (prec > (1 << 20))
            throw resource_error("deweger_bound: cancellation beyond the precision cap");
    }
}

inline DewegerResult deweger_bound(const mpq_class& c1_sq, const std::vector<double>& X,
                                   double c3, double c4, const mpz_class& C) {
    if (X.empty()) throw std::domain_error("deweger_bound: X empty");
    mpq_class sum = 0;
    mpq_class S = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (!(X[i] >= 0) || !std::isfinite(X[i]))
            throw std::domain_error("deweger_bound: X_i >= 0");
        sum += mpq_class(X[i]);
        if (i + 1 < X.size()) S += mpq_class(X[i]) * mpq_class(X[i]);
    }
    mpq_class T = (1 + sum) / 2;
    return deweger_bound_st(c1_sq, S, T, c3, c4, C);
}

}  // namespace klucas
