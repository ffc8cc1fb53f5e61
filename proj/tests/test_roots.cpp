#include <catch2/catch_amalgamated.hpp>

#include <gmpxx.h>

#include "klucas/numutil.hpp"
#include "klucas/roots.hpp"
#include "oracles.hpp"

using klucas::DerivedConstants;
using klucas::RealInterval;
using klucas::RootCertificate;

namespace {

// Rational pin from decimal digits: digits * 10^-frac_digits.
mpq_class dec(const char* digits, unsigned frac_digits) {
    return mpq_class(mpz_class(digits), klucas::pow10_z(frac_digits));
}

}  // namespace

TEST_CASE("psi evaluates exactly at rational points") {
    CHECK(klucas::psi_eval(2, mpq_class(2)) == 1);
    CHECK(klucas::psi_eval(2, mpq_class(3, 2)) == mpq_class(-1, 4));
    CHECK(klucas::psi_eval(3, mpq_class(7, 4)) == mpq_class(-29, 64));
    CHECK(klucas::psi_eval(5, mpq_class(1)) == -4);
    for (int k : {2, 3, 4, 7, 12}) {
        for (const mpq_class& x :
             {mpq_class(1, 2), mpq_class(5, 4), mpq_class(13, 8), mpq_class(9, 5), mpq_class(3)}) {
            CAPTURE(k);
            CHECK(klucas::psi_eval(k, x) == oracle::psi_horner(k, x));
            CHECK(klucas::psi_sign_at(k, x) == sgn(oracle::psi_horner(k, x)));
        }
    }
}

TEST_CASE("f_k at rational points") {
    for (int k = 2; k <= 40; ++k) CHECK(klucas::f_eval(k, mpq_class(2)) == mpq_class(1, 2));
    CHECK(klucas::f_eval(2, mpq_class(3, 2)) == 1);
    CHECK_THROWS_AS(klucas::f_eval(3, mpq_class(3, 2)), std::domain_error);  // pole
    CHECK_THROWS_AS(klucas::f_eval(1, mpq_class(2)), std::domain_error);
}

TEST_CASE("root certificates carry exact opposite signs") {
    for (int k : {2, 3, 6, 17}) {
        CAPTURE(k);
        RootCertificate cert = klucas::dominant_root(k, 128);
        CHECK(cert.k == k);
        CHECK(cert.sign_lo == -1);
        CHECK(cert.sign_hi == +1);
        CHECK(cert.alpha.width_le_2exp(-128));
        CHECK(cert.alpha.certainly_above(klucas::root_bracket_lo(k)));
        CHECK(cert.alpha.certainly_below(mpq_class(2)));
        // re-certify from scratch: the endpoints really do straddle the root
        CHECK(klucas::psi_sign_at(k, cert.alpha.lo_q()) == -1);
        CHECK(klucas::psi_sign_at(k, cert.alpha.hi_q()) == +1);
    }
}

TEST_CASE("root enclosures agree with rational bisection") {
    for (int k : {2, 3, 5, 11, 24}) {
        CAPTURE(k);
        RootCertificate cert = klucas::dominant_root(k, 160);
        mpq_class olo, ohi;
        oracle::psi_root_bisect(k, 160, olo, ohi);
        // both intervals contain the root, so they must overlap
        CHECK(cert.alpha.lo_q() <= ohi);
        CHECK(cert.alpha.hi_q() >= olo);
    }
}

TEST_CASE("k=2 root is the golden ratio") {
    RootCertificate cert = klucas::dominant_root(2, 192);
    CHECK(cert.alpha.certainly_above(dec("16180339887498948482045868343656", 31)));
    CHECK(cert.alpha.certainly_below(dec("16180339887498948482045868343657", 31)));
    // alpha^2 = alpha + 1 up to enclosure width
    RealInterval residue = cert.alpha.pow_si(2) - cert.alpha - 1;
    CHECK(residue.contains(mpq_class(0)));
}

TEST_CASE("k=3 root matches its frozen digits") {
    RootCertificate cert = klucas::dominant_root(3, 192);
    CHECK(cert.alpha.certainly_above(dec("18392867552141611325518525646532", 31)));
    CHECK(cert.alpha.certainly_below(dec("18392867552141611325518525646533", 31)));
}

TEST_CASE("large k roots separate from 2") {
    RootCertificate cert = klucas::dominant_root(1000, 64);
    CHECK(cert.alpha.certainly_above(mpq_class(199, 100)));
    CHECK(cert.alpha.certainly_below(mpq_class(2)));
    CHECK(cert.alpha.certainly_above(klucas::root_bracket_lo(1000)));
    CHECK(cert.sign_lo == -1);
    CHECK(cert.sign_hi == +1);
}

TEST_CASE("root isolation rejects bad inputs") {
    CHECK_THROWS_AS(klucas::dominant_root(1, 64), std::domain_error);
    CHECK_THROWS_AS(klucas::dominant_root(2, 3'000'000), klucas::resource_error);
}

TEST_CASE("derived constants satisfy their defining inequalities") {
    for (int k : {2, 3, 4, 10, 50, 300}) {
        CAPTURE(k);
        DerivedConstants dc = klucas::derived_constants(klucas::dominant_root(k, 96), 96);
        CHECK(dc.f_alpha.certainly_above(mpq_class(1, 2)));
        CHECK(dc.f_alpha.certainly_below(mpq_class(3, 4)));
        mpq_class near3 = 3 - mpq_class(4, mpz_class(1) << static_cast<unsigned>(k));
        CHECK(dc.two_alpha_minus_one.certainly_above(near3));
        CHECK(dc.two_alpha_minus_one.certainly_below(mpq_class(3)));
        CHECK(dc.log_alpha.certainly_above(mpq_class(10, 21)));  // 1/log(alpha) < 2.1
        CHECK(dc.log_alpha.width_le_2exp(-96));
        CHECK(dc.log_two_alpha_minus_one.width_le_2exp(-96));
        CHECK(dc.log_f_alpha.width_le_2exp(-96));
        CHECK(dc.log_f_alpha.is_negative());
    }
}

TEST_CASE("k=2 derived constants hit closed forms") {
    DerivedConstants dc = klucas::derived_constants(klucas::dominant_root(2, 160), 160);
    // 2 alpha - 1 = sqrt(5)
    RealInterval sq = dc.two_alpha_minus_one * dc.two_alpha_minus_one;
    CHECK(sq.contains(mpq_class(5)));
    // f(alpha) (2 alpha - 1) collapses to alpha itself when k = 2
    RealInterval prod = dc.f_alpha * dc.two_alpha_minus_one;
    CHECK(prod.lo_q() <= dc.alpha.hi_q());
    CHECK(prod.hi_q() >= dc.alpha.lo_q());
    // ln(phi) digit pin
    CHECK(dc.log_alpha.certainly_above(dec("481211825059603447497758913424", 30)));
    CHECK(dc.log_alpha.certainly_below(dec("481211825059603447498", 21)));
}

TEST_CASE("derived constants refine an over-wide certificate") {
    // 16-bit enclosure cannot certify 96-bit log widths; refinement must kick in
    DerivedConstants dc = klucas::derived_constants(klucas::dominant_root(5, 16), 96);
    CHECK(dc.log_alpha.width_le_2exp(-96));
    CHECK(dc.alpha.width_le_2exp(-96));
}

TEST_CASE("binet residual is certified below 3/2") {
    for (int k : {2, 3, 7}) {
        for (long n : {5L, 30L, 120L}) {
            CAPTURE(k, n);
            RealInterval r = klucas::binet_residual(klucas::dominant_root(k, 96), n);
            CHECK(r.certainly_below(mpq_class(3, 2)));
            CHECK((-r).certainly_below(mpq_class(3, 2)));
        }
    }
    // explicit-constants form escalates past an inadequate starting width
    RootCertificate cert = klucas::dominant_root(2, 64);
    DerivedConstants dc = klucas::derived_constants(cert, 64);
    RealInterval r = klucas::binet_residual(cert, dc, 200);
    CHECK(r.certainly_below(mpq_class(3, 2)));
    CHECK((-r).certainly_below(mpq_class(3, 2)));
    CHECK_THROWS_AS(klucas::binet_residual(cert, klucas::derived_constants(klucas::dominant_root(3, 64), 64), 5),
                    std::domain_error);
}

TEST_CASE("proximity certifications in the small-index regime") {
    for (int k : {10, 20, 31, 60}) {
        CAPTURE(k);
        DerivedConstants dc = klucas::derived_constants(klucas::dominant_root(k, 192), 192);
        long split = 1L << (k / 2);  // floor(2^(k/2)) is inside the valid range
        for (long n : {static_cast<long>(k), 2L * k, std::min(split - 1, 5000L)}) {
            CAPTURE(n);
            CHECK(klucas::certify_alpha_power_gap(dc, n));
        }
    }
    // far beyond the split the gap genuinely violates the bound
    DerivedConstants dc10 = klucas::derived_constants(klucas::dominant_root(10, 256), 256);
    CHECK_FALSE(klucas::certify_alpha_power_gap(dc10, 200));
    for (int k : {2, 3, 10, 50, 200}) {
        CAPTURE(k);
        DerivedConstants dc = klucas::derived_constants(klucas::dominant_root(k, 192), 192);
        CHECK(klucas::certify_f_alpha_gap(dc));
        CHECK(klucas::certify_two_alpha_gap(dc));
    }
}

TEST_CASE("k=2 binet residual equals the conjugate power") {
    // L_10 - phi^10 = (1-phi)^10 = 0.00813...
    RealInterval r = klucas::binet_residual(klucas::dominant_root(2, 96), 10);
    CHECK(r.certainly_above(mpq_class(8, 1000)));
    CHECK(r.certainly_below(mpq_class(9, 1000)));
}

TEST_CASE("binet residual decays for larger n") {
    RealInterval r = klucas::binet_residual(klucas::dominant_root(3, 96), 40);
    CHECK(r.certainly_below(mpq_class(1, 1000)));
    CHECK((-r).certainly_below(mpq_class(1, 1000)));
}

TEST_CASE("height bounds round upward") {
    klucas::HeightBounds hb = klucas::height_bounds(2);
    CHECK(hb.f_alpha >= 2.0794415416798357);  // 3 log 2
    CHECK(hb.f_alpha <= 2.0794415416798368);
    CHECK(hb.alpha >= 0.35);
    CHECK(hb.alpha <= 0.3500000000000001);
    CHECK(hb.two_alpha_minus_one == 1.5);
    klucas::HeightBounds hb7 = klucas::height_bounds(7);
    CHECK(hb7.f_alpha >= 5.8377303585465437);  // 3 log 7
    CHECK(hb7.alpha >= 0.1);
    CHECK(hb7.two_alpha_minus_one >= 3.0 / 7.0);
    CHECK_THROWS_AS(klucas::height_bounds(1), std::domain_error);
}
