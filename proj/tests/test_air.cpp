#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isac/air.hpp"

using namespace isac;
using namespace isac::air;

namespace {

// Binary-input real AWGN MI with inputs +-1 and noise variance v, by 1-D adaptive quadrature.
double biawgn_oracle(double v) {
    auto f = [v](double y) {
        const double pdf = std::exp(-(y - 1.0) * (y - 1.0) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
        const double t = -2.0 * y / v;
        const double l = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
        return pdf * l / std::numbers::ln2;
    };
    const double s = std::sqrt(v);
    double loss = 0.0;
    for (int k = -40; k < 40; ++k)
        loss += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 1 + k * s, 1 + (k + 1) * s, 10, 1e-14);
    return 1.0 - loss;
}

Constellation relabel(const Constellation& c, std::vector<std::uint32_t> labels) {
    return Constellation(c.points(), c.probs(), std::move(labels), c.meta());
}

Constellation rotate(const Constellation& c, double phi) {
    auto pts = c.points();
    for (auto& x : pts) x *= std::polar(1.0, phi);
    return Constellation(pts, c.probs(), c.labels(), c.meta());
}

Constellation shaped16() {
    auto q = make_qam(4);
    std::vector<double> p(16);
    double s = 0;
    for (std::size_t i = 0; i < 16; ++i) {
        p[i] = std::exp(-0.8 * std::norm(q.points()[i]));
        s += p[i];
    }
    for (auto& x : p) x /= s;
    return normalize(Constellation(q.points(), p, q.labels()));
}

}  // namespace

TEST_CASE("gauss-hermite moments") {
    for (int n : {4, 16, 32, 64, 128}) {
        const auto r = gauss_hermite(n);
        double m0 = 0, m2 = 0, m4 = 0, m1 = 0;
        for (int k = 0; k < n; ++k) {
            const double t = r.nodes[k];
            m0 += r.weights[k];
            m1 += r.weights[k] * t;
            m2 += r.weights[k] * t * t;
            m4 += r.weights[k] * t * t * t * t;
        }
        const double sp = std::sqrt(std::numbers::pi);
        CHECK(m0 == doctest::Approx(sp).epsilon(1e-13));
        CHECK(std::abs(m1) < 1e-13);
        CHECK(m2 == doctest::Approx(std::tgamma(1.5)).epsilon(1e-12));
        CHECK(m4 == doctest::Approx(std::tgamma(2.5)).epsilon(1e-12));
    }
}

TEST_CASE("bpsk llr") {
    const auto c = make_psk(1);
    const AwgnChannel ch(0.37);
    for (double y : {-2.0, -0.3, 0.0, 0.4, 1.7}) {
        const auto l = exact_llrs(c, cplx(y, 0.25), ch);
        CHECK(l[0] == doctest::Approx(4.0 * y / 0.37).epsilon(1e-12));
    }
}

TEST_CASE("llr symmetry and priors") {
    const auto c = make_psk(3);
    for (double l : exact_llrs(c, cplx(0, 0), AwgnChannel(0.5))) CHECK(std::abs(l) < 1e-12);
    const auto q = make_qam(4);
    CHECK(std::abs(exact_llrs(q, cplx(0, 0), AwgnChannel(0.5))[0]) < 1e-12);

    const Constellation skew({cplx(1, 0), cplx(-1, 0)}, {0.8, 0.2}, {0, 1});
    CHECK(exact_llrs(skew, cplx(0.3, 0), AwgnChannel(1e8))[0] == doctest::Approx(std::log(4.0)).epsilon(1e-6));

    const Constellation empty({cplx(1, 0), cplx(-1, 0)}, {1.0, 0.0}, {0, 1});
    CHECK_THROWS_WITH_AS(exact_llrs(empty, cplx(0, 0), AwgnChannel(1.0)),
                         doctest::Contains("bit position 1"), std::invalid_argument);
}

TEST_CASE("noise limits") {
    const auto q = make_qam(4);
    CHECK(mi_estimate(q, AwgnChannel(1e-9)).bits == doctest::Approx(4.0).epsilon(1e-9));
    const auto s = shaped16();
    CHECK(mi_estimate(s, AwgnChannel(1e-9)).bits == doctest::Approx(s.entropy_bits()).epsilon(1e-9));
    CHECK(mi_estimate(q, AwgnChannel(1e6)).bits < 1e-3);
    CHECK(gmi_estimate(q, AwgnChannel(1e6)).bits < 1e-3);
}

TEST_CASE("gray qpsk equals two binary channels") {
    for (double snr : {-5.0, 0.0, 5.0, 10.0}) {
        const auto ch = AwgnChannel::from_snr_db(snr);
        const auto q = make_qam(2);
        const double mi = mi_estimate(q, ch).bits;
        const double gmi = gmi_estimate(q, ch).bits;
        // each real axis carries +-sqrt(1/2) with noise variance sigma^2/2: scale to +-1
        const double oracle = 2.0 * biawgn_oracle(ch.sigma_c2);
        CHECK(mi == doctest::Approx(oracle).epsilon(1e-7));
        CHECK(std::abs(mi - gmi) < 1e-4);
    }
}

TEST_CASE("ordering of gmi, mi and entropy") {
    std::vector<Constellation> cs{make_qam(2), make_qam(4), make_qam(6), make_psk(3), make_psk(6),
                                  shaped16(), make_gpas_grid(2, 4, std::vector<double>{1, 2, 3, 4})};
    for (const auto& c : cs)
        for (double snr : {0.0, 5.0, 10.0, 15.0, 20.0}) {
            const auto ch = AwgnChannel::from_snr_db(snr);
            const double mi = mi_estimate(c, ch).bits;
            const double gmi = gmi_estimate(c, ch).bits;
            CHECK(gmi <= mi + 1e-9);
            CHECK(mi <= std::min(c.entropy_bits(), double(c.bits())) + 1e-9);
        }
    const auto ch = AwgnChannel::from_snr_db(10);
    const auto q64 = make_qam(6);
    const double gmi = gmi_estimate(q64, ch).bits;
    const double mi = mi_estimate(q64, ch).bits;
    CHECK(gmi < mi);
    CHECK(mi < 6.0);
    CHECK(mi < std::log2(11.0));
}

TEST_CASE("monte carlo agrees with quadrature") {
    const auto c = shaped16();
    const auto ch = AwgnChannel::from_snr_db(8);
    const auto q = mi_estimate(c, ch);
    const auto m = mi_estimate(c, ch, MonteCarlo{200000, 5});
    CHECK(m.std_error > 0.0);
    CHECK(std::abs(q.bits - m.bits) < 3 * m.std_error);
    const auto gq = gmi_estimate(c, ch);
    const auto gm = gmi_estimate(c, ch, MonteCarlo{200000, 6});
    CHECK(std::abs(gq.bits - gm.bits) < 3 * gm.std_error);
    // deterministic per seed
    CHECK(mi_estimate(c, ch, MonteCarlo{10000, 9}).bits == mi_estimate(c, ch, MonteCarlo{10000, 9}).bits);
}

TEST_CASE("rotation and relabeling") {
    const auto c = make_qam(4);
    const auto ch = AwgnChannel::from_snr_db(9);
    const auto r = rotate(c, 0.7);
    CHECK(mi_estimate(r, ch).bits == doctest::Approx(mi_estimate(c, ch).bits).epsilon(1e-7));
    CHECK(gmi_estimate(r, ch).bits == doctest::Approx(gmi_estimate(c, ch).bits).epsilon(1e-7));

    std::vector<std::uint32_t> scrambled(16);
    for (std::uint32_t i = 0; i < 16; ++i) scrambled[i] = (i * 7 + 3) % 16;
    const auto s = relabel(c, scrambled);
    CHECK(mi_estimate(s, ch).bits == doctest::Approx(mi_estimate(c, ch).bits).epsilon(1e-12));
    CHECK(gmi_estimate(s, ch).bits < gmi_estimate(c, ch).bits - 0.05);
}

TEST_CASE("adaptive quadrature reports the order used") {
    const auto c = make_qam(6);
    const auto e = mi_estimate(c, AwgnChannel::from_snr_db(12), Quadrature{8, true});
    CHECK(e.order >= 16);
    const auto fixed = mi_estimate(c, AwgnChannel::from_snr_db(12), Quadrature{32, false});
    CHECK(fixed.order == 32);
    CHECK(std::abs(e.bits - fixed.bits) < 1e-4);
}

TEST_CASE("metric gradients match central differences") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    const auto base = make_qam(4);
    for (Metric metric : {Metric::mi, Metric::gmi}) {
        std::vector<cplx> pts = base.points();
        std::vector<double> pr(16);
        for (auto& x : pts) x += 0.1 * cplx(nd(rng), nd(rng));
        for (auto& p : pr) p = 1.0 / 16 + 0.01 * std::abs(nd(rng));
        const double s2 = 0.15;
        const int order = 12;
        auto val = [&](const std::vector<cplx>& x, const std::vector<double>& p) {
            return evaluate_metric(x, p, base.labels(), 4, s2, metric, order, false).bits;
        };
        const auto g = evaluate_metric(pts, pr, base.labels(), 4, s2, metric, order, true);
        CHECK(g.bits == doctest::Approx(val(pts, pr)).epsilon(1e-14));
        const double h = 1e-6;
        double err = 0, norm = 0;
        for (std::size_t i = 0; i < 16; ++i) {
            for (int part = 0; part < 2; ++part) {
                auto xp = pts, xm = pts;
                const cplx step = part ? cplx(0, h) : cplx(h, 0);
                xp[i] += step;
                xm[i] -= step;
                const double fd = (val(xp, pr) - val(xm, pr)) / (2 * h);
                const double an = part ? g.d_points[i].imag() : g.d_points[i].real();
                err += (fd - an) * (fd - an);
                norm += fd * fd;
            }
            auto pp = pr, pm = pr;
            pp[i] += h;
            pm[i] -= h;
            const double fd = (val(pts, pp) - val(pts, pm)) / (2 * h);
            err += (fd - g.d_probs[i]) * (fd - g.d_probs[i]);
            norm += fd * fd;
        }
        CHECK(std::sqrt(err / norm) < 1e-6);
    }
}

TEST_CASE("demapper gmi with exact llrs reproduces the bit-metric gmi") {
    const auto c = shaped16();
    const auto ch = AwgnChannel::from_snr_db(7);
    const auto r = gmi_with_demapper(c, ch, [&](cplx y, std::span<double> l) {
        const auto e = exact_llrs(c, y, ch);
        std::copy(e.begin(), e.end(), l.begin());
    }, 24);
    const double ref = gmi_estimate(c, ch, Quadrature{24, false}).bits;
    CHECK(r.bits_unscaled == doctest::Approx(ref).epsilon(1e-10));
    CHECK(r.bits == doctest::Approx(ref).epsilon(1e-8));
    CHECK(r.best_scale == doctest::Approx(1.0).epsilon(1e-3));
}
