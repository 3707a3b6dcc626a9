#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "isac/ofdm.hpp"

using namespace isac;
using namespace isac::ofdm;

namespace {

std::vector<cplx> random_symbols(const Constellation& c, std::size_t n, Rng& rng) {
    std::discrete_distribution<std::size_t> pick(c.probs().begin(), c.probs().end());
    std::vector<cplx> x(n);
    for (auto& v : x) v = c.points()[pick(rng)];
    return x;
}

Target fixed_target(std::size_t delay, cplx a, bool toi = false) {
    Target t;
    t.delay = delay;
    t.model = Fluctuation::fixed;
    t.amplitude = a;
    t.is_toi = toi;
    return t;
}

}  // namespace

TEST_CASE("orthonormal transforms") {
    const OfdmConfig cfg{64, 16, 1};
    const Fft fft(64);
    std::vector<cplx> ones(64, cplx(1, 0));
    const auto s = modulate(ones, cfg, fft);
    REQUIRE(s.size() == 80);
    CHECK(std::abs(s[16] - cplx(8, 0)) < 1e-12);
    for (std::size_t t = 17; t < 80; ++t) CHECK(std::abs(s[t]) < 1e-12);
    for (std::size_t t = 0; t < 16; ++t) CHECK(std::abs(s[t] - s[t + 64]) < 1e-15);

    Rng rng(2);
    const auto x = random_symbols(make_qam(4), 64, rng);
    const auto tx = modulate(x, cfg, fft);
    double e_time = 0, e_freq = 0;
    for (std::size_t t = 16; t < 80; ++t) e_time += std::norm(tx[t]);
    for (const auto& v : x) e_freq += std::norm(v);
    CHECK(e_time == doctest::Approx(e_freq).epsilon(1e-12));
    const auto back = demodulate(tx, cfg, fft);
    for (std::size_t n = 0; n < 64; ++n) CHECK(std::abs(back[n] - x[n]) < 1e-12);

    CHECK_THROWS_AS(modulate(std::vector<cplx>(63), cfg, fft), std::invalid_argument);
    CHECK_THROWS_AS((OfdmConfig{48, 8, 1}.validate()), std::invalid_argument);
}

TEST_CASE("communication link noise per subcarrier") {
    const OfdmConfig cfg{256, 32, 1};
    const Fft fft(256);
    Rng rng(5);
    const double s2 = 0.3;
    double acc = 0;
    std::size_t cnt = 0;
    for (int f = 0; f < 200; ++f) {
        const auto x = random_symbols(make_qam(4), 256, rng);
        const auto y = demodulate(awgn(modulate(x, cfg, fft), s2, rng), cfg, fft);
        for (std::size_t n = 0; n < 256; ++n) {
            const double e = std::norm(y[n] - x[n]);
            acc += e;
            ++cnt;
        }
    }
    const double mean = acc / cnt;
    // |w|^2 is exponential with mean s2 and std s2
    CHECK(std::abs(mean - s2) < 3 * s2 / std::sqrt(double(cnt)));
}

TEST_CASE("sensing channel reduction and delay peaks") {
    const OfdmConfig cfg{64, 16, 1};
    Rng rng(7);
    const auto x = random_symbols(make_qam(4), 64, rng);
    SensingScenario sc;
    sc.sigma_s2 = 0.0;
    sc.n_win = 20;
    sc.targets = {fixed_target(0, cplx(1, 0), true)};
    const auto y = sensing_receive(x, sc, cfg, 1);
    for (std::size_t n = 0; n < 64; ++n) CHECK(std::abs(y[n] - x[n]) < 1e-12);

    sc.targets = {fixed_target(3, cplx(0.5, 0.2), true), fixed_target(11, cplx(-0.7, 0.1))};
    const auto psk = make_psk(3);
    const auto xp = random_symbols(psk, 64, rng);
    const auto h = matched_filter(sensing_receive(xp, sc, cfg, 1), xp);
    // noise-free PSK: h_n recovered exactly
    for (std::size_t n = 0; n < 64; ++n) {
        cplx ref = 0;
        for (const auto& t : sc.targets)
            ref += t.amplitude * std::polar(1.0, -2 * std::numbers::pi * double(n * t.delay) / 64);
        CHECK(std::abs(h[n] - ref) < 1e-12);
    }
    const auto hk = delay_estimate(h);
    for (std::size_t k = 0; k < 64; ++k) {
        cplx ref = 0;
        if (k == 3) ref = 8.0 * cplx(0.5, 0.2);
        if (k == 11) ref = 8.0 * cplx(-0.7, 0.1);
        CHECK(std::abs(hk[k] - ref) < 1e-12);
    }

    sc.targets = {fixed_target(20, cplx(1, 0), true)};
    CHECK_THROWS_AS(sensing_receive(x, sc, cfg, 1), std::invalid_argument);
}

TEST_CASE("pure noise observation") {
    const OfdmConfig cfg{1024, 64, 1};
    SensingScenario sc;
    sc.sigma_s2 = 2.5;
    std::vector<cplx> x(1024, cplx(1, 0));
    const auto y = sensing_receive(x, sc, cfg, 3);
    double e = 0;
    for (const auto& v : y) e += std::norm(v);
    e /= 1024;
    CHECK(std::abs(e - 2.5) < 3 * 2.5 / std::sqrt(1024.0));
}

TEST_CASE("matched filter mean and variance") {
    const OfdmConfig cfg{64, 16, 1};
    const Fft fft(64);
    for (const auto& c : {make_qam(4), make_qam(6), make_psk(2)}) {
        const double kappa = moments(c).kurtosis;
        SensingScenario sc;
        sc.sigma_s2 = 0.2;
        sc.n_win = 20;
        sc.targets = {fixed_target(2, cplx(0.8, -0.3), true), fixed_target(9, cplx(0.4, 0.4))};
        Rng rng(11);
        const std::size_t n = 5;
        cplx href = 0;
        for (const auto& t : sc.targets)
            href += t.amplitude * std::polar(1.0, -2 * std::numbers::pi * double(n * t.delay) / 64);
        const int draws = 20000;
        cplx sum = 0;
        double sum2 = 0;
        std::vector<cplx> a{sc.targets[0].amplitude, sc.targets[1].amplitude};
        for (int d = 0; d < draws; ++d) {
            const auto x = random_symbols(c, 64, rng);
            const auto h = matched_filter(sensing_receive(x, sc, a, cfg, fft, rng), x);
            sum += h[n];
            sum2 += std::norm(h[n] - href);
        }
        const double var_ref = std::norm(href) * (kappa - 1) + sc.sigma_s2;
        const cplx mean = sum / double(draws);
        CHECK(std::abs(mean - href) < 3 * std::sqrt(var_ref / draws) * 1.5);
        CHECK(sum2 / draws == doctest::Approx(var_ref).epsilon(0.05));
    }
}

TEST_CASE("delay-domain noise is near gaussian for 64 subcarriers") {
    const OfdmConfig cfg{64, 16, 1};
    const Fft fft(64);
    SensingScenario sc;
    sc.sigma_s2 = 0.01;
    sc.n_win = 20;
    sc.targets = {fixed_target(0, cplx(1, 0), true)};
    std::vector<cplx> a{cplx(1, 0)};
    Rng rng(13);
    double m2 = 0, m4 = 0;
    std::size_t cnt = 0;
    double noise_var = 0;
    for (int d = 0; d < 4000; ++d) {
        const auto x = random_symbols(make_qam(4), 64, rng);
        const auto hk = delay_estimate(matched_filter(sensing_receive(x, sc, a, cfg, fft, rng), x), fft);
        for (std::size_t k = 1; k < 64; ++k) {
            const double r = hk[k].real();
            m2 += r * r;
            m4 += r * r * r * r;
            noise_var += std::norm(hk[k]);
            ++cnt;
        }
    }
    m2 /= cnt;
    m4 /= cnt;
    CHECK(std::abs(m4 / (m2 * m2) - 3.0) < 0.1);
    CHECK(noise_var / cnt == doctest::Approx(0.32 + 0.01).epsilon(0.03));
}

TEST_CASE("cfar threshold factor and masking") {
    CHECK(cfar_alpha(100, 1e-3) == doctest::Approx(100 * (std::pow(1e-3, -0.01) - 1)).epsilon(1e-12));
    // exponential noise: P(X > alpha * mean of N exponentials) = (1 + alpha/N)^-N = pfa
    CHECK(std::pow(1 + cfar_alpha(16, 0.01) / 16, -16.0) == doctest::Approx(0.01).epsilon(1e-12));

    std::vector<double> p(128, 1.0);
    p[40] = 1e4;
    const auto det = cfar_detect(p, {32, 2, 1e-3});
    CHECK(det[40]);
    for (std::size_t k = 0; k < 128; ++k)
        if (k != 40) CHECK_FALSE(det[k]);
    // a huge interferer inside the reference window masks the target
    p[50] = 1e7;
    CHECK_FALSE(cfar_detect_cell(p, 40, {32, 2, 1e-3}));
    // guard cells are excluded
    p[50] = 1.0;
    p[42] = 1e7;
    CHECK(cfar_detect_cell(p, 40, {32, 2, 1e-3}));
    CHECK_THROWS_AS(cfar_detect(p, {200, 2, 1e-3}), std::invalid_argument);
}

TEST_CASE("cfar false alarms on exponential noise") {
    Rng rng(17);
    std::exponential_distribution<double> ex(1.0);
    const CfarWindow w{100, 2, 1e-3};
    std::size_t fa = 0, cells = 0;
    std::vector<double> p(1024);
    for (int r = 0; r < 400; ++r) {
        for (auto& v : p) v = ex(rng);
        for (bool d : cfar_detect(p, w)) fa += d;
        cells += 1024;
    }
    const double rate = double(fa) / cells;
    CHECK(std::abs(rate - 1e-3) < 3 * std::sqrt(1e-3 * (1 - 1e-3) / cells));
}

TEST_CASE("analytic sinr and detection probability") {
    SensingScenario sc;
    sc.sigma_s2 = 1.0;
    sc.targets = {fixed_target(1, cplx(1, 0), true), fixed_target(5, cplx(10, 0))};
    CHECK(analytic_sinr(sc, 1.32, 1024) == doctest::Approx(1024.0 / (101 * 0.32 + 1)).epsilon(1e-12));
    SensingScenario one;
    one.sigma_s2 = 0.5;
    one.targets = {fixed_target(0, cplx(0, 2), true)};
    CHECK(analytic_sinr(one, 1.0, 64) == doctest::Approx(64 * 4 / 0.5));
    double prev = 1e300;
    for (double k = 1.0; k <= 2.0; k += 0.1) {
        const double g = analytic_sinr(sc, k, 1024);
        CHECK(g < prev);
        prev = g;
    }
    CHECK(analytic_pd(0.0, 1e-3) == doctest::Approx(1e-3));
    CHECK(analytic_pd(9.0, 1e-3) == doctest::Approx(std::pow(10.0, -0.3)).epsilon(1e-12));
    CHECK(analytic_pd(1e12, 1e-3) > 0.999999);

    SensingScenario none;
    none.targets = {fixed_target(0, cplx(1, 0))};
    CHECK_THROWS_AS(analytic_sinr(none, 1.0, 64), std::invalid_argument);
    none.targets = {fixed_target(0, cplx(1, 0), true), fixed_target(1, cplx(1, 0), true)};
    CHECK_THROWS_AS(analytic_sinr(none, 1.0, 64), std::invalid_argument);
}

TEST_CASE("clopper-pearson interval") {
    const auto e = binomial_estimate(50, 100);
    CHECK(e.pd == 0.5);
    CHECK(e.ci_lo == doctest::Approx(0.3983).epsilon(1e-3));
    CHECK(e.ci_hi == doctest::Approx(0.6017).epsilon(1e-3));
    CHECK(binomial_estimate(0, 10).ci_lo == 0.0);
    CHECK(binomial_estimate(10, 10).ci_hi == 1.0);
}

TEST_CASE("swerling draws") {
    SensingScenario sc;
    Target t0;
    t0.model = Fluctuation::swerling0;
    t0.power = 4.0;
    Target t1;
    t1.model = Fluctuation::swerling1;
    t1.power = 2.0;
    sc.targets = {t0, t1};
    Rng rng(23);
    double p1 = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        const auto a = draw_amplitudes(sc, rng);
        CHECK(std::abs(a[0]) == doctest::Approx(2.0).epsilon(1e-12));
        p1 += std::norm(a[1]);
    }
    CHECK(std::abs(p1 / n - 2.0) < 3 * 2.0 / std::sqrt(double(n)));
}

TEST_CASE("detection rate tracks kurtosis") {
    const OfdmConfig cfg{256, 64, 3};
    SensingScenario sc;
    sc.sigma_s2 = 1.0;
    sc.n_win = 40;
    Target toi;
    toi.delay = 5;
    toi.model = Fluctuation::swerling1;
    toi.power = 0.2;
    toi.is_toi = true;
    Target intf;
    intf.delay = 50;
    intf.model = Fluctuation::swerling0;
    intf.power = 30.0;
    sc.targets = {toi, intf};
    const auto low = simulate_pd(make_psk(4), sc, cfg, 3000);
    const auto high = simulate_pd(make_qam(6), sc, cfg, 3000);
    CHECK(low.pd > high.pd);
    CHECK(low.ci_hi >= low.pd);
    // strong target is always detected
    sc.targets[0].power = 1e4;
    CHECK(simulate_pd(make_psk(4), sc, cfg, 200).pd == 1.0);
}

TEST_CASE("radar equation helper") {
    RadarLink l;
    l.carrier_hz = 299792458.0;  // lambda = 1 m
    l.bandwidth_hz = 1.0 / (1.380649e-23 * 290.0);
    const double s = radar_snr(l, 1.0, 1.0);
    CHECK(s == doctest::Approx(1.0 / std::pow(4 * std::numbers::pi, 3)).epsilon(1e-12));
    CHECK(radar_snr(l, 1.0, 2.0) == doctest::Approx(s / 16).epsilon(1e-12));
    CHECK(range_to_delay(299792458.0 / 2, 10.0) == doctest::Approx(10.0));
}
