#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "isac/constellation.hpp"
#include "isac/random.hpp"

namespace isac::ofdm {

/// Orthonormal FFT of fixed length (FFTW plans owned by the object). One object per thread.
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&&) noexcept;
    Fft& operator=(Fft&&) noexcept;

    std::size_t size() const { return n_; }
    std::vector<cplx> forward(std::span<const cplx> x) const;  ///< (1/sqrt N) sum x_t e^{-j2pi nt/N}
    std::vector<cplx> inverse(std::span<const cplx> x) const;  ///< (1/sqrt N) sum x_n e^{+j2pi nt/N}

private:
    struct Impl;
    std::size_t n_;
    std::unique_ptr<Impl> impl_;
};

struct OfdmConfig {
    std::size_t n = 1024;
    std::size_t cp_len = 256;
    std::uint64_t seed = 1;
    void validate() const;
};

enum class Fluctuation { fixed, swerling0, swerling1 };

struct Target {
    std::size_t delay = 0;
    Fluctuation model = Fluctuation::fixed;
    cplx amplitude{1.0, 0.0};  ///< used by the fixed model
    double power = 1.0;        ///< |a|^2 (swerling0) or E|a|^2 (swerling1)
    bool is_toi = false;
    double mean_power() const;
};

struct SensingScenario {
    std::vector<Target> targets;
    double sigma_s2 = 1.0;
    double pfa = 1e-3;
    std::size_t n_win = 100;  ///< total reference cells, split between both sides
    std::size_t n_guard = 2;  ///< guard cells per side
    void validate(const OfdmConfig& cfg) const;
    const Target& toi() const;
};

/// Orthonormal IFFT followed by the cyclic prefix.
std::vector<cplx> modulate(std::span<const cplx> symbols, const OfdmConfig& cfg, const Fft& fft);
/// CP removal and orthonormal FFT.
std::vector<cplx> demodulate(std::span<const cplx> samples, const OfdmConfig& cfg, const Fft& fft);

/// Time-domain AWGN link with per-sample variance sigma_c2.
std::vector<cplx> awgn(std::span<const cplx> samples, double sigma_c2, Rng& rng);

/// Complex amplitudes of one realization (Swerling models redrawn).
std::vector<cplx> draw_amplitudes(const SensingScenario& sc, Rng& rng);

/**
 * Frequency-domain sensing observation y_n = x_n h_n + w_n.
 *
 * The echo is the delayed sum of the transmitted CP-OFDM signal, so
 * h_n = sum_j a_j e^{-j2pi n tau_j/N}.
 */
std::vector<cplx> sensing_receive(std::span<const cplx> tx_symbols, const SensingScenario& sc,
                                  std::span<const cplx> amplitudes, const OfdmConfig& cfg, const Fft& fft,
                                  Rng& rng);
std::vector<cplx> sensing_receive(std::span<const cplx> tx_symbols, const SensingScenario& sc,
                                  const OfdmConfig& cfg, std::uint64_t seed);

std::vector<cplx> matched_filter(std::span<const cplx> y, std::span<const cplx> x);
std::vector<cplx> delay_estimate(std::span<const cplx> h, const Fft& fft);
std::vector<cplx> delay_estimate(std::span<const cplx> h);

struct CfarWindow {
    std::size_t n_win = 100;
    std::size_t n_guard = 2;
    double pfa = 1e-3;
};

/// Threshold factor applied to the mean of the reference cells.
double cfar_alpha(std::size_t n_win, double pfa);

/// Circular CA-CFAR over the whole profile.
std::vector<bool> cfar_detect(std::span<const double> power, const CfarWindow& w);
/// Decision for a single cell under test.
bool cfar_detect_cell(std::span<const double> power, std::size_t k, const CfarWindow& w);

double analytic_sinr(const SensingScenario& sc, double kappa, std::size_t n);
double analytic_pd(double gamma, double pfa);

struct PdEstimate {
    double pd = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    std::size_t detections = 0;
    std::size_t trials = 0;
};

/// Two-sided Clopper-Pearson interval.
PdEstimate binomial_estimate(std::size_t successes, std::size_t trials, double confidence = 0.95);

/// Monte Carlo detection rate of the TOI cell.
PdEstimate simulate_pd(const Constellation& c, const SensingScenario& sc, const OfdmConfig& cfg,
                       std::size_t trials);

/// Radar-equation link budget with explicit constants.
struct RadarLink {
    double tx_power_w = 1.0;
    double gain_tx = 1.0;
    double gain_rx = 1.0;
    double carrier_hz = 28e9;
    double bandwidth_hz = 100e6;
    double noise_figure_db = 0.0;
    double temperature_k = 290.0;
    double losses_db = 0.0;
};

/// Received echo power over thermal noise power, P_t G_t G_r lambda^2 rcs / ((4pi)^3 R^4 L k T B F).
double radar_snr(const RadarLink& link, double rcs_m2, double range_m);

/// Samples of delay corresponding to a range at the given sample rate.
double range_to_delay(double range_m, double sample_rate_hz);

}  // namespace isac::ofdm
