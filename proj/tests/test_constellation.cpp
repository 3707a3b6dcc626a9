#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "isac/constellation.hpp"
#include "isac/io.hpp"

using namespace isac;

namespace {

// Brute-force kurtosis of a uniform square QAM built from raw odd levels.
double qam_kurtosis_oracle(int levels_per_axis) {
    double m2 = 0.0, m4 = 0.0;
    int n = 0;
    for (int a = -levels_per_axis + 1; a < levels_per_axis; a += 2)
        for (int b = -levels_per_axis + 1; b < levels_per_axis; b += 2) {
            const double e = double(a) * a + double(b) * b;
            m2 += e;
            m4 += e * e;
            ++n;
        }
    m2 /= n;
    m4 /= n;
    return m4 / (m2 * m2);
}

int hamming(std::uint32_t a, std::uint32_t b) { return std::popcount(a ^ b); }

}  // namespace

TEST_CASE("qam reference kurtosis") {
    CHECK(moments(make_qam(2)).kurtosis == doctest::Approx(1.0).epsilon(1e-14));
    const double k16 = qam_kurtosis_oracle(4);
    const double k64 = qam_kurtosis_oracle(8);
    CHECK(k16 == doctest::Approx(1.32).epsilon(1e-14));
    CHECK(k64 == doctest::Approx(1.380952380952381).epsilon(1e-12));
    CHECK(moments(make_qam(4)).kurtosis == doctest::Approx(k16).epsilon(1e-13));
    CHECK(moments(make_qam(6)).kurtosis == doctest::Approx(k64).epsilon(1e-13));
    CHECK(moments(make_qam(8)).kurtosis == doctest::Approx(qam_kurtosis_oracle(16)).epsilon(1e-13));
}

TEST_CASE("qam rejects odd or out-of-range bit counts") {
    CHECK_THROWS_AS(make_qam(3), std::invalid_argument);
    CHECK_THROWS_AS(make_qam(0), std::invalid_argument);
    CHECK_THROWS_AS(make_qam(10), std::invalid_argument);
}

TEST_CASE("generated constellations are normalized and zero mean") {
    std::vector<Constellation> all;
    for (int m : {2, 4, 6, 8}) all.push_back(make_qam(m));
    for (int m = 1; m <= 8; ++m) all.push_back(make_psk(m));
    const double radii[4] = {1, 2, 3, 4};
    const double rp[4] = {0.4, 0.3, 0.2, 0.1};
    all.push_back(make_gpas_grid(2, 4, radii));
    all.push_back(make_gpas_grid(2, 4, radii, rp));
    for (const auto& c : all) {
        double s = 0.0;
        for (double p : c.probs()) s += p;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        const Moments m = moments(c);
        CHECK(m.power == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(m.mean) < 1e-12);
        std::vector<bool> seen(c.size(), false);
        for (auto l : c.labels()) {
            REQUIRE(l < c.size());
            CHECK_FALSE(seen[l]);
            seen[l] = true;
        }
    }
}

TEST_CASE("psk") {
    const auto bpsk = make_psk(1);
    CHECK(bpsk.points()[0] == cplx(1, 0));
    CHECK(bpsk.points()[1] == cplx(-1, 0));
    CHECK(std::abs(moments(bpsk).mean) == 0.0);

    const auto qpsk = make_psk(2);
    for (const auto& x : qpsk.points()) {
        CHECK(std::abs(x) == doctest::Approx(1.0));
        CHECK(std::abs(std::abs(x.real()) - std::sqrt(0.5)) < 1e-15);
    }
    CHECK(moments(make_psk(6)).kurtosis == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gray property of psk: ring neighbours differ in one bit") {
    for (int m = 2; m <= 7; ++m) {
        const auto c = make_psk(m);
        const std::size_t n = c.size();
        for (std::size_t k = 0; k < n; ++k) {
            // points are generated in angular order
            CHECK(hamming(c.labels()[k], c.labels()[(k + 1) % n]) == 1);
        }
    }
}

TEST_CASE("gray property of qam: grid neighbours differ in one bit") {
    for (int m : {2, 4, 6, 8}) {
        const auto c = make_qam(m);
        const double d = std::abs(c.points()[0] - c.points()[1]);
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = i + 1; j < c.size(); ++j)
                if (std::abs(std::abs(c.points()[i] - c.points()[j]) - d) < 1e-9)
                    CHECK(hamming(c.labels()[i], c.labels()[j]) == 1);
    }
}

TEST_CASE("qam first bit of each axis is the sign") {
    const auto c = make_qam(6);
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(c.bit(i, 1) == (c.points()[i].real() > 0 ? 1 : 0));
        CHECK(c.bit(i, 4) == (c.points()[i].imag() > 0 ? 1 : 0));
    }
}

TEST_CASE("gpas grid layout") {
    const double one[1] = {1.0};
    const auto g = make_gpas_grid(0, 2, one);
    const auto p = make_psk(2);
    for (const auto& x : g.points()) {
        bool found = false;
        for (const auto& y : p.points()) found = found || std::abs(x - y) < 1e-15;
        CHECK(found);
    }

    const double radii[4] = {1, 2, 3, 4};
    const auto c = make_gpas_grid(2, 4, radii);
    CHECK(c.size() == 64);
    CHECK(c.bits() == 6);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto x = c.points()[i];
        // bits 3 and 4 are the signs of the real and imaginary parts
        CHECK(c.bit(i, 3) == (x.real() > 0 ? 0 : 1));
        CHECK(c.bit(i, 4) == (x.imag() > 0 ? 1 : 0));
        CHECK(c.probs()[i] == doctest::Approx(1.0 / 64));
        // amplitude bits are the Gray label of the ring index
        const double r = std::abs(x) * std::sqrt(7.5);
        const auto ring = static_cast<std::uint32_t>(std::lround(r)) - 1;
        CHECK((c.labels()[i] >> 4) == gray(ring));
    }

    const double same[4] = {2, 2, 2, 2};
    CHECK(moments(make_gpas_grid(2, 4, same)).kurtosis == doctest::Approx(1.0).epsilon(1e-14));

    const double bad[4] = {0, 1, 2, 3};
    CHECK_THROWS_AS(make_gpas_grid(2, 4, bad), std::invalid_argument);
}

TEST_CASE("kurtosis is at least one, with equality on the unit circle") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.01, 1.0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 16;
        std::vector<cplx> pts(n);
        std::vector<double> pr(n);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            pts[i] = cplx(nd(rng), nd(rng));
            pr[i] = ud(rng);
            s += pr[i];
        }
        for (auto& p : pr) p /= s;
        CHECK(kurtosis(pts, pr) >= 1.0 - 1e-12);
        for (auto& x : pts) x = std::polar(1.7, std::arg(x));
        CHECK(kurtosis(pts, pr) == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("moments of a symmetric two-point set") {
    const Constellation c({cplx(1, 0), cplx(-1, 0)}, {0.5, 0.5}, {0, 1});
    const auto m = moments(c);
    CHECK(std::abs(m.mean) == 0.0);
    CHECK(m.kurtosis == doctest::Approx(1.0));
}

TEST_CASE("normalize") {
    const auto q = make_qam(4);
    const auto n1 = normalize(q);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(n1.points()[i] - q.points()[i]) < 1e-15);

    std::vector<cplx> scaled = q.points();
    for (auto& x : scaled) x *= 3.0;
    const Constellation big(scaled, q.probs(), q.labels());
    const auto n2 = normalize(big);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(n2.points()[i] - q.points()[i]) < 1e-14);
    CHECK(moments(n2).kurtosis == doctest::Approx(moments(big).kurtosis).epsilon(1e-14));
    CHECK(n2.probs() == q.probs());
    CHECK(n2.labels() == q.labels());

    const auto twice = normalize(normalize(big));
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(twice.points()[i] - n2.points()[i]) < 1e-15);

    const Constellation zero({cplx(0, 0), cplx(0, 0)}, {0.5, 0.5}, {0, 1});
    CHECK_THROWS_AS(normalize(zero), std::invalid_argument);
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(Constellation({cplx(1, 0), cplx(-1, 0)}, {0.5, 0.6}, {0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Constellation({cplx(1, 0), cplx(-1, 0)}, {0.5, 0.5}, {1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Constellation({cplx(1, 0), cplx(-1, 0)}, {1.5, -0.5}, {0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Constellation({cplx(1, 0), cplx(-1, 0), cplx(0, 1)}, {0.3, 0.3, 0.4}, {0, 1, 2}),
                    std::invalid_argument);
    // overlapping points are allowed
    CHECK_NOTHROW(Constellation({cplx(1, 0), cplx(1, 0)}, {0.5, 0.5}, {0, 1}));
}

TEST_CASE("json round trip is exact") {
    auto c = make_gpas_grid(2, 4, std::vector<double>{1, 2, 3, 4}, std::vector<double>{0.4, 0.3, 0.2, 0.1});
    c.meta().kappa_tilde = 1.3;
    c.meta().snr_db = 10.0;
    const auto back = constellation_from_json(to_json(c));
    CHECK(back.points() == c.points());
    CHECK(back.probs() == c.probs());
    CHECK(back.labels() == c.labels());
    CHECK(back.meta().family == "gpas");
    CHECK(*back.meta().kappa_tilde == 1.3);
    auto j = to_json(c);
    j["extra"] = 1;
    CHECK_THROWS_AS(constellation_from_json(j), std::invalid_argument);
}
