#include "isac/ofdm.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/beta.hpp>

namespace isac::ofdm {

namespace {
// the FFTW planner is not reentrant
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct Fft::Impl {
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
        if (buf) fftw_free(buf);
    }
};

Fft::Fft(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
    if (n == 0) throw std::invalid_argument("FFT length must be positive");
    impl_->buf = fftw_alloc_complex(n);
    if (!impl_->buf) throw std::bad_alloc();
    const int ni = static_cast<int>(n);
    std::lock_guard lock(planner_mutex());
    impl_->fwd = fftw_plan_dft_1d(ni, impl_->buf, impl_->buf, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->inv = fftw_plan_dft_1d(ni, impl_->buf, impl_->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

namespace {

std::vector<cplx> run(const Fft& f, fftw_plan plan, fftw_complex* buf, std::span<const cplx> x) {
    const std::size_t n = f.size();
    if (x.size() != n) throw std::invalid_argument("FFT input length " + std::to_string(x.size()) +
                                                   " differs from " + std::to_string(n));
    std::copy(x.begin(), x.end(), reinterpret_cast<cplx*>(buf));
    fftw_execute(plan);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    const cplx* b = reinterpret_cast<const cplx*>(buf);
    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = b[i] * s;
    return out;
}

}  // namespace

std::vector<cplx> Fft::forward(std::span<const cplx> x) const { return run(*this, impl_->fwd, impl_->buf, x); }
std::vector<cplx> Fft::inverse(std::span<const cplx> x) const { return run(*this, impl_->inv, impl_->buf, x); }

void OfdmConfig::validate() const {
    if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("subcarrier count must be a power of two");
    if (cp_len >= n) throw std::invalid_argument("cyclic prefix must be shorter than the symbol");
}

double Target::mean_power() const { return model == Fluctuation::fixed ? std::norm(amplitude) : power; }

void SensingScenario::validate(const OfdmConfig& cfg) const {
    cfg.validate();
    if (!(pfa > 0.0 && pfa < 1.0)) throw std::invalid_argument("pfa must lie in (0, 1)");
    if (n_win < 2) throw std::invalid_argument("CFAR window needs at least two cells");
    if (n_win + 2 * n_guard + 1 > cfg.n) throw std::invalid_argument("CFAR window larger than the profile");
    if (!(sigma_s2 >= 0.0)) throw std::invalid_argument("noise variance must be non-negative");
    for (const auto& t : targets) {
        if (t.delay >= cfg.cp_len && !(cfg.cp_len == 0 && t.delay == 0))
            throw std::invalid_argument("target delay " + std::to_string(t.delay) + " exceeds the cyclic prefix");
        if (t.model != Fluctuation::fixed && !(t.power > 0.0))
            throw std::invalid_argument("target power must be positive");
    }
}

const Target& SensingScenario::toi() const {
    const Target* found = nullptr;
    for (const auto& t : targets)
        if (t.is_toi) {
            if (found) throw std::invalid_argument("more than one target of interest");
            found = &t;
        }
    if (!found) throw std::invalid_argument("no target of interest");
    return *found;
}

std::vector<cplx> modulate(std::span<const cplx> symbols, const OfdmConfig& cfg, const Fft& fft) {
    if (symbols.size() != cfg.n) throw std::invalid_argument("expected " + std::to_string(cfg.n) + " symbols");
    const auto body = fft.inverse(symbols);
    std::vector<cplx> out;
    out.reserve(cfg.cp_len + cfg.n);
    out.insert(out.end(), body.end() - static_cast<std::ptrdiff_t>(cfg.cp_len), body.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

std::vector<cplx> demodulate(std::span<const cplx> samples, const OfdmConfig& cfg, const Fft& fft) {
    if (samples.size() != cfg.cp_len + cfg.n)
        throw std::invalid_argument("expected " + std::to_string(cfg.cp_len + cfg.n) + " samples");
    return fft.forward(samples.subspan(cfg.cp_len));
}

std::vector<cplx> awgn(std::span<const cplx> samples, double sigma_c2, Rng& rng) {
    std::vector<cplx> out(samples.begin(), samples.end());
    if (sigma_c2 > 0.0)
        for (auto& v : out) v += complex_normal(rng, sigma_c2);
    return out;
}

std::vector<cplx> draw_amplitudes(const SensingScenario& sc, Rng& rng) {
    std::vector<cplx> a;
    a.reserve(sc.targets.size());
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    for (const auto& t : sc.targets) {
        switch (t.model) {
            case Fluctuation::fixed: a.push_back(t.amplitude); break;
            case Fluctuation::swerling0: a.push_back(std::polar(std::sqrt(t.power), u(rng))); break;
            case Fluctuation::swerling1: a.push_back(complex_normal(rng, t.power)); break;
        }
    }
    return a;
}

std::vector<cplx> sensing_receive(std::span<const cplx> tx_symbols, const SensingScenario& sc,
                                  std::span<const cplx> amplitudes, const OfdmConfig& cfg, const Fft& fft,
                                  Rng& rng) {
    sc.validate(cfg);
    if (amplitudes.size() != sc.targets.size()) throw std::invalid_argument("one amplitude per target required");
    const auto tx = modulate(tx_symbols, cfg, fft);
    const std::size_t len = tx.size();
    std::vector<cplx> rx(len, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < sc.targets.size(); ++j) {
        const std::size_t d = sc.targets[j].delay;
        for (std::size_t t = d; t < len; ++t) rx[t] += amplitudes[j] * tx[t - d];
    }
    rx = awgn(rx, sc.sigma_s2, rng);
    return demodulate(rx, cfg, fft);
}

std::vector<cplx> sensing_receive(std::span<const cplx> tx_symbols, const SensingScenario& sc,
                                  const OfdmConfig& cfg, std::uint64_t seed) {
    const Fft fft(cfg.n);
    Rng rng(seed);
    const auto a = draw_amplitudes(sc, rng);
    return sensing_receive(tx_symbols, sc, a, cfg, fft, rng);
}

std::vector<cplx> matched_filter(std::span<const cplx> y, std::span<const cplx> x) {
    if (y.size() != x.size()) throw std::invalid_argument("matched filter length mismatch");
    std::vector<cplx> h(y.size());
    for (std::size_t n = 0; n < y.size(); ++n) h[n] = y[n] * std::conj(x[n]);
    return h;
}

std::vector<cplx> delay_estimate(std::span<const cplx> h, const Fft& fft) { return fft.inverse(h); }

std::vector<cplx> delay_estimate(std::span<const cplx> h) {
    const Fft fft(h.size());
    return fft.inverse(h);
}

double cfar_alpha(std::size_t n_win, double pfa) {
    if (n_win < 1) throw std::invalid_argument("CFAR window needs at least one cell");
    if (!(pfa > 0.0 && pfa < 1.0)) throw std::invalid_argument("pfa must lie in (0, 1)");
    const double n = static_cast<double>(n_win);
    return n * std::expm1(-std::log(pfa) / n);
}

namespace {

void check_window(std::size_t n, const CfarWindow& w) {
    if (w.n_win < 2) throw std::invalid_argument("CFAR window needs at least two cells");
    if (w.n_win + 2 * w.n_guard + 1 > n) throw std::invalid_argument("CFAR window larger than the profile");
}

double reference_mean(std::span<const double> p, std::size_t k, const CfarWindow& w) {
    const std::size_t n = p.size();
    const std::size_t lead = w.n_win / 2;
    const std::size_t trail = w.n_win - lead;
    double s = 0.0;
    for (std::size_t i = 1; i <= lead; ++i) s += p[(k + n - ((w.n_guard + i) % n)) % n];
    for (std::size_t i = 1; i <= trail; ++i) s += p[(k + w.n_guard + i) % n];
    return s / static_cast<double>(w.n_win);
}

}  // namespace

bool cfar_detect_cell(std::span<const double> power, std::size_t k, const CfarWindow& w) {
    check_window(power.size(), w);
    if (k >= power.size()) throw std::out_of_range("cell index outside the profile");
    return power[k] > cfar_alpha(w.n_win, w.pfa) * reference_mean(power, k, w);
}

std::vector<bool> cfar_detect(std::span<const double> power, const CfarWindow& w) {
    check_window(power.size(), w);
    const double alpha = cfar_alpha(w.n_win, w.pfa);
    std::vector<bool> det(power.size());
    for (std::size_t k = 0; k < power.size(); ++k) det[k] = power[k] > alpha * reference_mean(power, k, w);
    return det;
}

double analytic_sinr(const SensingScenario& sc, double kappa, std::size_t n) {
    const Target& toi = sc.toi();
    double total = 0.0;
    for (const auto& t : sc.targets) total += t.mean_power();
    return static_cast<double>(n) * toi.mean_power() / (total * (kappa - 1.0) + sc.sigma_s2);
}

double analytic_pd(double gamma, double pfa) {
    if (!(pfa > 0.0 && pfa < 1.0)) throw std::invalid_argument("pfa must lie in (0, 1)");
    if (!(gamma >= 0.0)) throw std::invalid_argument("SINR must be non-negative");
    return std::pow(pfa, 1.0 / (1.0 + gamma));
}

PdEstimate binomial_estimate(std::size_t k, std::size_t n, double confidence) {
    if (n == 0) throw std::invalid_argument("no trials");
    if (k > n) throw std::invalid_argument("more successes than trials");
    const double a = 0.5 * (1.0 - confidence);
    PdEstimate e;
    e.detections = k;
    e.trials = n;
    e.pd = static_cast<double>(k) / static_cast<double>(n);
    const double kd = static_cast<double>(k), nd = static_cast<double>(n);
    e.ci_lo = k == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<double>(kd, nd - kd + 1.0), a);
    e.ci_hi = k == n ? 1.0 : boost::math::quantile(boost::math::beta_distribution<double>(kd + 1.0, nd - kd), 1.0 - a);
    return e;
}

PdEstimate simulate_pd(const Constellation& c, const SensingScenario& sc, const OfdmConfig& cfg,
                       std::size_t trials) {
    sc.validate(cfg);
    const std::size_t cut = sc.toi().delay;
    if (trials == 0) throw std::invalid_argument("no trials");
    const Fft fft(cfg.n);
    const CfarWindow w{sc.n_win, sc.n_guard, sc.pfa};
    std::discrete_distribution<std::size_t> pick(c.probs().begin(), c.probs().end());
    std::vector<cplx> x(cfg.n);
    std::vector<double> p(cfg.n);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(cfg.seed, t));
        for (auto& v : x) v = c.points()[pick(rng)];
        const auto a = draw_amplitudes(sc, rng);
        const auto y = sensing_receive(x, sc, a, cfg, fft, rng);
        const auto hk = delay_estimate(matched_filter(y, x), fft);
        for (std::size_t k = 0; k < cfg.n; ++k) p[k] = std::norm(hk[k]);
        hits += cfar_detect_cell(p, cut, w) ? 1 : 0;
    }
    return binomial_estimate(hits, trials);
}

double radar_snr(const RadarLink& l, double rcs_m2, double range_m) {
    if (!(range_m > 0.0) || !(rcs_m2 > 0.0)) throw std::invalid_argument("range and RCS must be positive");
    constexpr double c0 = 299792458.0;
    constexpr double k_b = 1.380649e-23;
    const double lambda = c0 / l.carrier_hz;
    const double pr = l.tx_power_w * l.gain_tx * l.gain_rx * lambda * lambda * rcs_m2 /
                      (std::pow(4.0 * std::numbers::pi, 3) * std::pow(range_m, 4) * std::pow(10.0, l.losses_db / 10.0));
    const double pn = k_b * l.temperature_k * l.bandwidth_hz * std::pow(10.0, l.noise_figure_db / 10.0);
    return pr / pn;
}

double range_to_delay(double range_m, double sample_rate_hz) {
    constexpr double c0 = 299792458.0;
    return 2.0 * range_m * sample_rate_hz / c0;
}

}  // namespace isac::ofdm
