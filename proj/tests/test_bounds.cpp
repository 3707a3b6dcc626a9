#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "isac/bounds.hpp"

using namespace isac::bounds;

namespace {

double awgn_capacity(double snr_db) { return std::log2(1.0 + std::pow(10.0, snr_db / 10.0)); }

void check_moments(const MaxEntParams& p, const MomentConstraints& c, double tol) {
    CHECK(std::abs(moment_oracle(p, 0) - c.c0) < tol);
    CHECK(std::abs(moment_oracle(p, 1) - c.c1) < tol);
    CHECK(std::abs(moment_oracle(p, 2) - c.c2) < tol);
}

}  // namespace

TEST_CASE("constraint table") {
    const auto lo = constraints_for(Side::lower, 1.0, 0.3, 1.5);
    CHECK(lo.c0 == 1.0);
    CHECK(lo.c1 == 1.0);
    CHECK(lo.c2 == 1.5);
    const auto up = constraints_for(Side::upper, 1.0, 0.1, 1.5);
    CHECK(up.c1 == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(up.c2 == doctest::Approx(1.92).epsilon(1e-15));
    const auto lim = constraints_for(Side::upper, 1.0, 1e-12, 1.3);
    CHECK(lim.c1 == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(lim.c2 == doctest::Approx(1.3).epsilon(1e-11));
    CHECK_THROWS_AS(constraints_for(Side::lower, 0.0, 0.1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(constraints_for(Side::upper, 1.0, -0.1, 1.5), std::invalid_argument);
}

TEST_CASE("gaussian limit") {
    const MomentConstraints g{1.0, 1.0, 2.0};
    const auto p = solve_max_entropy(g);
    CHECK(p.gamma2 == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(p.gamma4 == 0.0);
    CHECK(p.gamma0 == doctest::Approx(std::log(1.0 / std::numbers::pi)).epsilon(1e-14));
    CHECK(std::abs(gamma2_equation_rhs(-1.0, g) - 1.0) < 1e-10);

    const auto [g0, g4] = gamma0_gamma4(-1.0, g);
    CHECK(g0 == doctest::Approx(std::log(1.0 / std::numbers::pi)).epsilon(1e-14));
    CHECK(g4 == 0.0);

    CHECK(max_entropy_bits(p, g) == doctest::Approx(std::log2(std::numbers::pi * std::numbers::e)).epsilon(1e-14));

    CHECK(moment_oracle(p, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(moment_oracle(p, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(moment_oracle(p, 2) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("solutions reproduce the moments (quadrature oracle)") {
    for (double k : {1.0001, 1.001, 1.01, 1.05, 1.2, 1.5, 1.8, 1.95, 1.999, 1.9999}) {
        for (double c1 : {0.5, 1.0, 1.1, 3.0}) {
            const MomentConstraints c{1.0, c1, k * c1 * c1};
            const auto p = solve_max_entropy(c);
            CHECK(p.gamma4 <= 0.0);
            check_moments(p, c, 1e-8 * std::max(1.0, c.c2));
        }
    }
}

TEST_CASE("ring limit converges") {
    const MomentConstraints c{1.0, 1.0, 1.0001};
    const auto p = solve_max_entropy(c);
    check_moments(p, c, 1e-6);
}

TEST_CASE("scalar gamma2 equation holds at moderate kurtosis") {
    // The equation in gamma2 alone is ill conditioned near the ring limit;
    // check it where it is numerically meaningful.
    for (double k : {1.1, 1.2, 1.35, 1.5, 1.7, 1.9, 1.99}) {
        const MomentConstraints c{1.0, 1.0, k};
        const auto p = solve_max_entropy(c);
        CHECK(std::abs(gamma2_equation_rhs(p.gamma2, c) - 1.0) < 1e-10);
        const auto [g0, g4] = gamma0_gamma4(p.gamma2, c);
        CHECK(g0 == doctest::Approx(p.gamma0).epsilon(1e-9));
        CHECK(g4 == doctest::Approx(p.gamma4).epsilon(1e-9));
        CHECK(p.gamma4 == doctest::Approx(-(p.gamma2 * c.c1 + 1.0) / (2.0 * c.c2)).epsilon(1e-9));
    }
}

TEST_CASE("gamma2 falls monotonically towards -1 as kappa approaches 2") {
    double prev = 1e300;
    for (double k = 1.05; k < 1.9999; k += 0.05) {
        const double g2 = solve_gamma2({1.0, 1.0, k});
        CHECK(g2 < prev);
        prev = g2;
    }
    CHECK(solve_gamma2({1.0, 1.0, 1.9999}) > -1.0);
    CHECK(solve_gamma2({1.0, 1.0, 1.9999}) == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("infeasible constraint sets") {
    CHECK_THROWS_AS(solve_max_entropy({1.0, 1.0, 2.5}), InfeasibleError);
    CHECK_THROWS_AS(solve_max_entropy({1.0, 1.0, 0.9}), InfeasibleError);
    CHECK_THROWS_AS(solve_max_entropy({1.0, 1.0, 1.0}), InfeasibleError);
    CHECK_THROWS_AS(gamma0_gamma4(5.0, {1.0, 1.0, 1.5}), InfeasibleError);
}

TEST_CASE("closed-form moments match quadrature") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ur(1.001, 1.99), uc(0.2, 5.0);
    for (int t = 0; t < 30; ++t) {
        const double c1 = uc(rng);
        const MomentConstraints c{1.0, c1, ur(rng) * c1 * c1};
        const auto p = solve_max_entropy(c);
        const auto cf = closed_form_moments(p);
        for (int q = 0; q < 3; ++q)
            CHECK(std::abs(cf[q] - moment_oracle(p, q)) < 1e-8 * std::max(1.0, std::abs(cf[q])));
    }
    CHECK_THROWS_AS(moment_oracle({0.0, -1.0, 0.1}, 0), std::domain_error);
    CHECK_THROWS_AS(moment_oracle({0.0, 1.0, 0.0}, 1), std::domain_error);
}

TEST_CASE("entropy formula matches direct integration") {
    for (double k : {1.01, 1.2, 1.5, 1.9, 2.0}) {
        const MomentConstraints c{1.0, 1.0, k};
        const auto p = solve_max_entropy(c);
        CHECK(std::abs(max_entropy_bits(p, c) - entropy_oracle_bits(p)) < 1e-6);
    }
    double prev = 1e300;
    for (double k = 2.0; k > 1.01; k -= 0.05) {
        const MomentConstraints c{1.0, 1.0, k};
        const double h = max_entropy_bits(solve_max_entropy(c), c);
        CHECK(h < prev);
        prev = h;
    }
}

TEST_CASE("bounds at kappa 2 equal the AWGN capacity") {
    for (double snr : {0.0, 5.0, 10.0, 15.0, 20.0}) {
        const auto b = mi_bounds(1.0, std::pow(10.0, -snr / 10.0), 2.0);
        CHECK(std::abs(b.lower - awgn_capacity(snr)) < 1e-6);
        CHECK(std::abs(b.upper - awgn_capacity(snr)) < 1e-6);
    }
    CHECK(mi_bounds(1.0, 0.1, 2.0).upper == doctest::Approx(3.4594).epsilon(1e-4));
}

TEST_CASE("bound ordering, monotonicity and gap at 10 dB") {
    double prev_lo = -1, prev_up = -1;
    for (int i = 0; i <= 100; ++i) {
        const double k = 1.0 + 0.01 * i;
        const auto b = mi_bounds(1.0, 0.1, k);
        CHECK(b.lower <= b.upper + 1e-9);
        CHECK(b.lower >= 0.0);
        CHECK(b.lower >= prev_lo - 1e-12);
        CHECK(b.upper >= prev_up - 1e-12);
        if (k >= 1.35 - 1e-12) CHECK(b.upper - b.lower < 0.1);
        prev_lo = b.lower;
        prev_up = b.upper;
    }
}

TEST_CASE("reference values from an independent scipy computation") {
    // upper bound at kappa 1, 10 dB and the bound gap around kappa 1.35
    CHECK(mi_bounds(1.0, 0.1, 1.0).upper == doctest::Approx(2.7869).epsilon(2e-4));
    const auto b135 = mi_bounds(1.0, 0.1, 1.35);
    CHECK(b135.upper - b135.lower == doctest::Approx(0.0945).epsilon(2e-3));
}

TEST_CASE("transmit-side clamp at kappa 1 is reported") {
    const auto d = mi_bounds_detail(1.0, 0.1, 1.0);
    CHECK(d.lower_clamped);
    CHECK(d.kappa_used_lower == kKappaClamp);
    CHECK_FALSE(d.kappa_out_of_range);
    CHECK_FALSE(mi_bounds_detail(1.0, 0.1, 1.5).lower_clamped);
    CHECK(mi_bounds_detail(1.0, 0.1, 0.95).kappa_out_of_range);
    CHECK_THROWS_AS(mi_bounds(1.0, 0.1, 2.2), InfeasibleError);
}
