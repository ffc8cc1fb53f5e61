#include <catch2/catch_amalgamated.hpp>

#include <gmpxx.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "klucas/interval.hpp"
#include "klucas/lattice.hpp"
#include "klucas/numutil.hpp"
#include "klucas/roots.hpp"
#include "oracles.hpp"

using klucas::C1Bound;
using klucas::GramSchmidtData;
using klucas::LatticeBasis;
using klucas::QVec;
using klucas::RealInterval;
using klucas::ReducedBasis;
using klucas::SigmaCase;
using klucas::ZMat;
using klucas::ZVec;

namespace {

LatticeBasis make(const std::vector<std::vector<long>>& cols) {
    ZMat z;
    for (const auto& c : cols) {
        ZVec v;
        for (long e : c) v.emplace_back(e);
        z.push_back(v);
    }
    return LatticeBasis(z);
}

mpq_class gs_norm_product(const GramSchmidtData& gs) {
    mpq_class p = 1;
    for (const mpq_class& v : gs.norms_sq) p *= v;
    return p;
}

// Exact squared norm of a column.
mpq_class col_norm_sq(const ZVec& c) {
    mpz_class s = 0;
    for (const mpz_class& v : c) s += v * v;
    return mpq_class(s);
}

}  // namespace

TEST_CASE("gram_schmidt on a worked 2d example") {
    LatticeBasis b = make({{1, 0}, {1, 2}});
    GramSchmidtData gs = klucas::gram_schmidt(b);
    CHECK(gs.b_star[0][0] == 1);
    CHECK(gs.b_star[0][1] == 0);
    CHECK(gs.mu[1][0] == 1);
    CHECK(gs.b_star[1][0] == 0);
    CHECK(gs.b_star[1][1] == 2);
    CHECK(gs.norms_sq[0] == 1);
    CHECK(gs.norms_sq[1] == 4);
}

TEST_CASE("gram_schmidt on the identity is trivial") {
    LatticeBasis b = make({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
    GramSchmidtData gs = klucas::gram_schmidt(b);
    for (int i = 0; i < 4; ++i) {
        CHECK(gs.norms_sq[static_cast<std::size_t>(i)] == 1);
        for (int j = 0; j < i; ++j) CHECK(gs.mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == 0);
    }
}

TEST_CASE("gram_schmidt reconstructs and orthogonalizes exactly") {
    std::mt19937 rng(777);
    std::uniform_int_distribution<long> dist(-50, 50);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<long>> cols(3, std::vector<long>(3));
        for (auto& c : cols)
            for (long& e : c) e = dist(rng);
        LatticeBasis b;
        GramSchmidtData gs;
        try {
            b = make(cols);
            gs = klucas::gram_schmidt(b);
        } catch (const klucas::rank_error&) {
            continue;  // dependent sample; skip
        }
        for (int i = 0; i < 3; ++i) {
            // b_i = b*_i + sum_{j<i} mu_ij b*_j, exactly
            for (int r = 0; r < 3; ++r) {
                mpq_class acc = gs.b_star[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
                for (int j = 0; j < i; ++j)
                    acc += gs.mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                           gs.b_star[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)];
                CHECK(acc == mpq_class(b.cols[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)]));
            }
            // pairwise orthogonality
            for (int j = 0; j < i; ++j) {
                mpq_class dot = 0;
                for (int r = 0; r < 3; ++r)
                    dot += gs.b_star[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] *
                           gs.b_star[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)];
                CHECK(dot == 0);
            }
        }
    }
}

TEST_CASE("gram_schmidt rejects dependent columns") {
    CHECK_THROWS_AS(klucas::gram_schmidt(make({{1, 2}, {2, 4}})), klucas::rank_error);
    CHECK_THROWS_AS(klucas::gram_schmidt(make({{0, 0}, {1, 1}})), klucas::rank_error);
}

TEST_CASE("lattice basis shape is validated") {
    ZMat ragged = {{mpz_class(1), mpz_class(0)}, {mpz_class(1)}};
    CHECK_THROWS_AS(LatticeBasis(ragged), std::domain_error);
    CHECK_THROWS_AS(LatticeBasis(ZMat{}), std::domain_error);
}

TEST_CASE("lll leaves the identity alone") {
    LatticeBasis b = make({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    ReducedBasis red = klucas::lll_reduce(b);
    for (int j = 0; j < 3; ++j)
        for (int r = 0; r < 3; ++r) {
            CHECK(red.basis.cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)] == (j == r ? 1 : 0));
            CHECK(red.transform[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)] == (j == r ? 1 : 0));
        }
}

TEST_CASE("lll size-reduces a skewed 2d basis") {
    LatticeBasis b = make({{1, 1}, {0, 2}});
    ReducedBasis red = klucas::lll_reduce(b);
    CHECK(col_norm_sq(red.basis.cols[0]) <= 2);
    // the lattice's shortest nonzero vector has squared length 2
    std::vector<std::vector<mpz_class>> cols = {{1, 1}, {0, 2}};
    CHECK(oracle::shortest_vector_sq(cols) == 2);
}

TEST_CASE("lll rejects a bad Lovasz parameter and dependent input") {
    LatticeBasis b = make({{1, 0}, {0, 1}});
    CHECK_THROWS_AS(klucas::lll_reduce(b, mpq_class(1, 4)), std::domain_error);
    CHECK_THROWS_AS(klucas::lll_reduce(b, mpq_class(1)), std::domain_error);
    CHECK_THROWS_AS(klucas::lll_reduce(make({{1, 2}, {2, 4}})), klucas::rank_error);
}

TEST_CASE("lll against exact enumeration on random small lattices") {
    std::mt19937 rng(12345);
    std::uniform_int_distribution<long> entry(-1000, 1000);
    std::uniform_int_distribution<long> ynum(-3000, 3000);
    std::uniform_int_distribution<long> yden(1, 7);
    int accepted = 0;
    int attempts = 0;
    while (accepted < 200 && attempts < 4000) {
        ++attempts;
        const int dim = 2 + accepted % 3;
        std::vector<std::vector<long>> raw(static_cast<std::size_t>(dim),
                                           std::vector<long>(static_cast<std::size_t>(dim)));
        for (auto& c : raw)
            for (long& e : c) e = entry(rng);
        QVec y(static_cast<std::size_t>(dim));
        for (auto& v : y) v = mpq_class(ynum(rng), yden(rng));

        LatticeBasis basis;
        ReducedBasis red;
        try {
            basis = make(raw);
            red = klucas::lll_reduce(basis);
        } catch (const klucas::rank_error&) {
            continue;
        }

        // determinant invariance via the product of Gram-Schmidt norms
        mpq_class det_sq_orig = gs_norm_product(klucas::gram_schmidt(basis));
        CHECK(gs_norm_product(red.gs) == det_sq_orig);

        mpq_class lambda1_sq;
        mpq_class cvp_sq;
        try {
            // the reduced first vector's coefficients shrink the oracle's box
            lambda1_sq = oracle::shortest_vector_sq(basis.cols, &red.transform[0]);
            // Babai rounding in the reduced basis as the closest-point hint
            QVec zr = klucas::detail::solve_exact(red.basis.cols, y);
            ZVec babai_red(static_cast<std::size_t>(dim));
            for (int i = 0; i < dim; ++i)
                babai_red[static_cast<std::size_t>(i)] =
                    klucas::round_q(zr[static_cast<std::size_t>(i)]);
            ZVec babai_orig(static_cast<std::size_t>(dim), 0);
            for (int j = 0; j < dim; ++j)
                for (int l = 0; l < dim; ++l)
                    babai_orig[static_cast<std::size_t>(j)] +=
                        red.transform[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)] *
                        babai_red[static_cast<std::size_t>(l)];
            cvp_sq = oracle::closest_distance_sq(basis.cols, y, &babai_orig);
        } catch (const std::length_error&) {
            continue;  // box too large for this sample; take another
        }

        // LLL quality guarantee for parameter 3/4
        mpq_class quality = col_norm_sq(red.basis.cols[0]);
        CHECK(quality <= klucas::pow2_q(dim - 1) * lambda1_sq);

        // distance lower bound never exceeds the exact optimum
        QVec zero(static_cast<std::size_t>(dim), mpq_class(0));
        C1Bound home = klucas::c1_lower_bound(red, zero);
        CHECK(home.sigma_case == SigmaCase::in_lattice);
        CHECK(home.sigma == 1);
        CHECK(home.c1_sq <= lambda1_sq);

        C1Bound away = klucas::c1_lower_bound(red, y);
        if (away.sigma_case == SigmaCase::out_of_lattice) {
            CHECK(away.c1_sq <= cvp_sq);
        } else {
            CHECK(away.c1_sq <= lambda1_sq);
        }
        ++accepted;
    }
    REQUIRE(accepted == 200);
}

TEST_CASE("c1 lower bound on worked examples") {
    ReducedBasis id2 = klucas::lll_reduce(make({{1, 0}, {0, 1}}));

    C1Bound at_origin = klucas::c1_lower_bound(id2, QVec{mpq_class(0), mpq_class(0)});
    CHECK(at_origin.sigma_case == SigmaCase::in_lattice);
    CHECK(at_origin.c1_sq == 1);

    C1Bound at_half = klucas::c1_lower_bound(id2, QVec{mpq_class(0), mpq_class(1, 2)});
    CHECK(at_half.sigma_case == SigmaCase::out_of_lattice);
    CHECK(at_half.sigma == mpq_class(1, 2));
    CHECK(at_half.c1_sq == mpq_class(1, 4));
    std::vector<std::vector<mpz_class>> idcols = {{1, 0}, {0, 1}};
    CHECK(oracle::closest_distance_sq(idcols, {mpq_class(0), mpq_class(1, 2)}) == mpq_class(1, 4));

    // last nonzero coordinate integral: the rule yields sigma = 0, a vacuous
    // but still valid lower bound
    C1Bound degenerate = klucas::c1_lower_bound(id2, QVec{mpq_class(1, 2), mpq_class(3)});
    CHECK(degenerate.sigma_case == SigmaCase::out_of_lattice);
    CHECK(degenerate.sigma == 0);
    CHECK(degenerate.c1_sq == 0);

    CHECK_THROWS_AS(klucas::c1_lower_bound(id2, QVec{mpq_class(1)}), std::domain_error);
}

TEST_CASE("c1 lower bound uses the weakest Gram-Schmidt direction") {
    // columns (2,0),(1,1): b*_1=(2,0) norm 4, b*_2=(0,1) norm 1 -> c2 = 4,
    // so at a lattice point c1^2 = 4/4 = 1 (and indeed (1,1)-(2,0)=(-1,1) is
    // not shorter than 1... the true shortest vector is (1,1)-larger; the
    // bound only needs to stay below it)
    LatticeBasis b = make({{2, 0}, {1, 1}});
    ReducedBasis red = klucas::lll_reduce(b);
    C1Bound home = klucas::c1_lower_bound(red, QVec{mpq_class(0), mpq_class(0)});
    std::vector<std::vector<mpz_class>> cols = {{2, 0}, {1, 1}};
    CHECK(home.c1_sq <= oracle::shortest_vector_sq(cols));
}

TEST_CASE("build_lattice floors certified enclosures") {
    // C*eta must not be an integer: a correct outward enclosure of 1/3 is
    // open, so 21 * [1/3 - e, 1/3 + e] straddles 7 and has no readable floor
    std::vector<RealInterval> etas = {RealInterval::from_q(mpq_class(1, 3), 96),
                                      RealInterval::from_q(mpq_class(1, 7), 96)};
    CHECK_THROWS_AS(klucas::build_lattice(etas, mpz_class(21)), klucas::ambiguous_floor);

    auto [basis, floors] = klucas::build_lattice(etas, mpz_class(22));
    CHECK(floors[0] == 7);   // floor(22/3)
    CHECK(floors[1] == 3);   // floor(22/7)
    CHECK(basis.dim == 2);
    CHECK(basis.cols[0][0] == 1);
    CHECK(basis.cols[0][1] == 7);
    CHECK(basis.cols[1][0] == 0);
    CHECK(basis.cols[1][1] == 3);

    // negative entries floor downward; dyadic entries are exact even at an
    // integer image (both endpoints land on it)
    std::vector<RealInterval> neg = {RealInterval::from_q(mpq_class(-1, 3), 96),
                                     RealInterval::from_q(mpq_class(1, 2), 96)};
    auto [nb, nf] = klucas::build_lattice(neg, mpz_class(22));
    CHECK(nf[0] == -8);  // floor(-22/3)
    CHECK(nf[1] == 11);
    CHECK(nb.cols[0][1] == -8);
}

TEST_CASE("build_lattice reports integer-straddling enclosures") {
    // an enclosure of width 2^-89 around 1/2: C = 2 puts C*eta across 1
    mpq_class tiny(mpz_class(1), klucas::pow_z(mpz_class(2), 90));
    RealInterval a = RealInterval::from_q(mpq_class(1, 2) - tiny, 128);
    RealInterval b = RealInterval::from_q(mpq_class(1, 2) + tiny, 128);
    std::vector<RealInterval> etas = {RealInterval::from_endpoints(a.lo(), b.hi(), 128),
                                      RealInterval::from_q(mpq_class(1, 3), 128)};
    bool threw = false;
    try {
        klucas::build_lattice(etas, mpz_class(2));
    } catch (const klucas::ambiguous_floor& e) {
        threw = true;
        CHECK(e.index() == 0);
    }
    CHECK(threw);

    CHECK_THROWS_AS(klucas::build_lattice(etas, mpz_class(0)), std::domain_error);
    std::vector<RealInterval> solo = {a};
    CHECK_THROWS_AS(klucas::build_lattice(solo, mpz_class(4)), std::domain_error);
}

TEST_CASE("exponent cap reproduces the recorded first-stage aggregate") {
    // 7-dimensional stage: C = 10^355, c1^2 = 5.96e106, S = 1.5e102,
    // T = 1.7e51, c3 = 12, c4 = log of the k = 2 dominant root
    klucas::RootCertificate cert = klucas::dominant_root(2, 128);
    klucas::DerivedConstants dc = klucas::derived_constants(cert, 96);
    double c4 = dc.log_alpha.to_double_down();

    mpq_class c1_sq = mpq_class(mpz_class(596) * klucas::pow10_z(104));
    mpq_class S = mpq_class(mpz_class(15) * klucas::pow10_z(101));
    mpq_class T = mpq_class(mpz_class(17) * klucas::pow10_z(50));
    mpz_class C = klucas::pow10_z(355);

    klucas::DewegerResult r = klucas::deweger_bound_st(c1_sq, S, T, 12.0, c4, C);
    REQUIRE(r.status == klucas::DewegerStatus::ok);
    CHECK(r.H_bound > 1448.0);
    CHECK(r.H_bound < 1449.0);
}

TEST_CASE("exponent cap reproduces the recorded second-stage aggregates") {
    double ln2 = RealInterval::from_long(2, 128).log().to_double_down();

    // round one: C = 10^695, c1^2 = 10^350, S = 8.5e347, T = 9.2e173 -> 1733
    klucas::DewegerResult r1 = klucas::deweger_bound_st(
        mpq_class(klucas::pow10_z(350)), mpq_class(mpz_class(85) * klucas::pow10_z(346)),
        mpq_class(mpz_class(92) * klucas::pow10_z(172)), 72.0, ln2, klucas::pow10_z(695));
    REQUIRE(r1.status == klucas::DewegerStatus::ok);
    CHECK(r1.H_bound > 1733.0);
    CHECK(r1.H_bound < 1734.0);

    // round two: C = 10^220, c1^2 = 10^111, S = 8.464e109, T = 9.2e54 -> 553
    klucas::DewegerResult r2 = klucas::deweger_bound_st(
        mpq_class(klucas::pow10_z(111)), mpq_class(mpz_class(8464) * klucas::pow10_z(106)),
        mpq_class(mpz_class(92) * klucas::pow10_z(53)), 72.0, ln2, klucas::pow10_z(220));
    REQUIRE(r2.status == klucas::DewegerStatus::ok);
    CHECK(r2.H_bound > 553.0);
    CHECK(r2.H_bound < 554.0);
}

TEST_CASE("exponent cap computes S and T from the coordinate bounds") {
    // X = (3, 4, 5): S = 9 + 16 = 25, T = (1 + 12) / 2 = 13/2
    klucas::DewegerResult r =
        klucas::deweger_bound(mpq_class(1000), {3.0, 4.0, 5.0}, 2.0, 1.0, mpz_class(100));
    CHECK(r.S == 25);
    CHECK(r.T == mpq_class(13, 2));
    REQUIRE(r.status == klucas::DewegerStatus::ok);
    // by hand: H <= log(200) - log(sqrt(975) - 6.5) = 5.29832 - 3.20781 = 2.09051
    CHECK(r.H_bound > 2.0905);
    CHECK(r.H_bound < 2.0906);
    CHECK(r.degenerate_branch);
}

TEST_CASE("exponent cap signals a failed hypothesis instead of guessing") {
    // T^2 + S = 42.25 + 25 = 67.25: anything at or below fails
    klucas::DewegerResult eq =
        klucas::deweger_bound(mpq_class(269, 4), {3.0, 4.0, 5.0}, 2.0, 1.0, mpz_class(100));
    CHECK(eq.status == klucas::DewegerStatus::hypothesis_failed);
    klucas::DewegerResult below =
        klucas::deweger_bound(mpq_class(60), {3.0, 4.0, 5.0}, 2.0, 1.0, mpz_class(100));
    CHECK(below.status == klucas::DewegerStatus::hypothesis_failed);
    klucas::DewegerResult above =
        klucas::deweger_bound(mpq_class(68), {3.0, 4.0, 5.0}, 2.0, 1.0, mpz_class(100));
    CHECK(above.status == klucas::DewegerStatus::ok);
}

TEST_CASE("exponent cap validates its inputs") {
    CHECK_THROWS_AS(klucas::deweger_bound(mpq_class(10), {}, 2.0, 1.0, mpz_class(10)),
                    std::domain_error);
    CHECK_THROWS_AS(klucas::deweger_bound(mpq_class(10), {1.0}, 0.0, 1.0, mpz_class(10)),
                    std::domain_error);
    CHECK_THROWS_AS(klucas::deweger_bound(mpq_class(10), {1.0}, 2.0, -1.0, mpz_class(10)),
                    std::domain_error);
    CHECK_THROWS_AS(klucas::deweger_bound(mpq_class(10), {-1.0}, 2.0, 1.0, mpz_class(10)),
                    std::domain_error);
    CHECK_THROWS_AS(klucas::deweger_bound(mpq_class(10), {1.0}, 2.0, 1.0, mpz_class(0)),
                    std::domain_error);
}

TEST_CASE("planted small linear forms stay under the returned cap") {
    // Plant |x_1 eta_1 + x_2 eta_2 + x_3 eta_3 + eta_0| = c3 exp(-c4 H)/2 with
    // known coefficients, reduce the corresponding lattice, and confirm the
    // returned cap admits the planted exponent.
    const mpfr_prec_t prec = 256;
    struct Plant {
        long x1, x2, x3;
        double H;
    };
    const Plant plants[] = {{12, -7, 3, 4.0}, {-20, 20, -20, 6.0}, {1, 2, -3, 2.0}, {17, 0, -5, 8.0}};
    const double c3 = 5.0, c4 = 0.5;
    const double X = 20.0;
    const mpz_class C = klucas::pow10_z(9);

    RealInterval l2 = RealInterval::log_of_ulong(2, prec);
    RealInterval l3 = RealInterval::log_of_ulong(3, prec);
    RealInterval l5 = RealInterval::log_of_ulong(5, prec);

    for (const Plant& p : plants) {
        // delta = c3 exp(-c4 H) / 2 built as an enclosure
        mpfr_t t;
        mpfr_init2(t, prec);
        mpfr_set_d(t, -c4 * p.H, MPFR_RNDN);
        mpfr_exp(t, t, MPFR_RNDD);
        mpfr_t t2;
        mpfr_init2(t2, prec);
        mpfr_set_d(t2, -c4 * p.H, MPFR_RNDN);
        mpfr_exp(t2, t2, MPFR_RNDU);
        RealInterval delta =
            RealInterval::from_endpoints(t, t2, prec) * RealInterval::from_q(mpq_class(5, 2), prec);
        mpfr_clear(t);
        mpfr_clear(t2);

        RealInterval eta0 = delta - (p.x1 * l2 + p.x2 * l3 + p.x3 * l5);

        auto [basis, floors] = klucas::build_lattice({l2, l3, l5}, C);
        ReducedBasis red = klucas::lll_reduce(basis);
        mpq_class eta0_lo = mpq_class(C) * eta0.lo_q();
        mpz_class f0_lo = klucas::floor_q(eta0_lo);
        mpz_class f0_hi = klucas::floor_q(mpq_class(C) * eta0.hi_q());
        REQUIRE(f0_lo == f0_hi);
        QVec y = {mpq_class(0), mpq_class(0), mpq_class(-f0_lo)};
        C1Bound c1 = klucas::c1_lower_bound(red, y);

        klucas::DewegerResult r = klucas::deweger_bound(c1.c1_sq, {X, X, X}, c3, c4, C);
        REQUIRE(r.status == klucas::DewegerStatus::ok);
        CHECK(r.H_bound >= p.H);
    }
}

TEST_CASE("deweger cancellation guard certifies tight margins") {
    // c1^2 exceeds T^2 + S by one part in 2^300: the directed-rounding loop
    // must escalate precision rather than return a wrong sign
    mpq_class T = mpq_class(mpz_class(17) * klucas::pow10_z(50));
    mpq_class S = mpq_class(15) * klucas::pow10_z(101);
    mpq_class tiny = mpq_class(mpz_class(1), klucas::pow_z(mpz_class(2), 300));
    mpq_class c1_sq = T * T + S + tiny;
    klucas::DewegerResult r = klucas::deweger_bound_st(c1_sq, S, T, 12.0, 0.48, klucas::pow10_z(355));
    REQUIRE(r.status == klucas::DewegerStatus::ok);
    CHECK(r.H_bound > 0.0);
    // the margin is microscopic, so the cap is far weaker than the recorded
    // aggregate at the same C
    CHECK(r.H_bound > 2000.0);
}
