#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "klucas/verify.hpp"

using namespace klucas;

namespace {

// Independent exhaustive oracle for the crossover scan, usable when the
// largest qualifying integer is known to sit below `limit`.
long brute_max_qualifying(int m, double T, long limit) {
    long best = 0;
    for (long x = 3; x <= limit; ++x) {
        double lx = std::log(static_cast<double>(x));
        if (static_cast<double>(x) / std::pow(lx, m) <= T) best = x;
    }
    return best;
}

}  // namespace

TEST_CASE("crossover scan agrees with exhaustive search") {
    CHECK(detail::max_qualifying_integer(1, 5.0) == brute_max_qualifying(1, 5.0, 1000));
    CHECK(detail::max_qualifying_integer(1, 10.0) == 35);
    CHECK(detail::max_qualifying_integer(1, 50.0) == brute_max_qualifying(1, 50.0, 2000));
    CHECK(detail::max_qualifying_integer(2, 257.0) == brute_max_qualifying(2, 257.0, 100000));
    CHECK(detail::max_qualifying_integer(2, 300.0) == brute_max_qualifying(2, 300.0, 100000));
    CHECK(detail::max_qualifying_integer(3, 400.0) == brute_max_qualifying(3, 400.0, 2000000));
}

TEST_CASE("identities suite passes over the opening orders") {
    SuiteReport r = run_identities_suite(40, 2);
    CHECK(r.name == "identities");
    CHECK(r.pass);
    CHECK(r.checks > 0);
    CHECK(r.detail == "all head identities hold");
    CHECK_THROWS_AS(run_identities_suite(1), std::domain_error);
}

TEST_CASE("binet suite certifies residuals across a window") {
    SuiteReport r = run_binet_suite(2, 12, 80, 2);
    CHECK(r.name == "binet");
    CHECK(r.pass);
    CHECK(r.checks == 11 * 79);
    CHECK_THROWS_AS(run_binet_suite(1, 5, 80), std::domain_error);
    CHECK_THROWS_AS(run_binet_suite(5, 3, 80), std::domain_error);
    CHECK_THROWS_AS(run_binet_suite(2, 5, 1), std::domain_error);
}

TEST_CASE("roots suite re-certifies enclosures") {
    SuiteReport r = run_roots_suite(64, 2);
    CHECK(r.pass);
    CHECK(r.checks == 63);
    CHECK_THROWS_AS(run_roots_suite(0), std::domain_error);
}

TEST_CASE("f-range suite pins the derived constants") {
    SuiteReport r = run_f_range_suite(64, 2);
    CHECK(r.pass);
    CHECK(r.checks == 63);
    CHECK_THROWS_AS(run_f_range_suite(1), std::domain_error);
}

TEST_CASE("proximity suite certifies the sampled regime") {
    SuiteReport r = run_proximity_suite();
    CHECK(r.pass);
    CHECK(r.checks == 25);
}

TEST_CASE("largest-prime-factor suite summarizes the sweep") {
    SuiteReport r = run_t11_suite(2, 6, 60, 2);
    CHECK(r.pass);
    CHECK(r.checks == 58 + 57 + 56 + 55 + 54);  // n runs from k+1 per order
    CHECK(r.detail.find("pairs pass") != std::string::npos);
    CHECK(r.detail.find("0 skipped") != std::string::npos);
}

TEST_CASE("analytic-inversion suite holds on the whole grid") {
    SuiteReport r = run_guz_suite();
    CHECK(r.pass);
    CHECK(r.checks == 9);
}
