#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isac/air.hpp"
#include "isac/constellation.hpp"

namespace isac::shaping {

enum class Family { geometric, probabilistic, joint, cpas, gpas };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

/**
 * Unconstrained trainable parameters of one shaping family.
 *
 * x_raw holds the trainable points (geometric, joint) or the fixed base grid
 * (probabilistic, cpas). gpas radii are exp(radii_raw).
 */
struct ShapingParams {
    Family family = Family::joint;
    int bits = 6;
    std::vector<cplx> x_raw;
    std::vector<double> p_raw;
    std::vector<double> pa_raw;
    std::vector<double> radii_raw;
    int amp_bits = 0;
    int phase_bits = 0;
    bool train_radii = false;
    std::vector<std::uint32_t> labels;
};

struct InitOptions {
    int bits = 6;
    int amp_bits = 2;        ///< gpas only
    bool train_radii = false;  ///< gpas only
    double jitter = 0.01;    ///< std of the seeded perturbation of the initial parameters
    std::uint64_t seed = 0;
};

/// QAM-initialized parameters (gpas: rings 1..2^M_A with uniform amplitudes).
ShapingParams initial_params(Family family, const InitOptions& opt = {});

Constellation project(const ShapingParams& p);

/// Number of trainable scalars and their flat layout.
std::size_t parameter_count(const ShapingParams& p);
std::vector<double> flatten(const ShapingParams& p);
void unflatten(ShapingParams& p, const std::vector<double>& theta);

double sensing_loss(double kappa, double kappa_tilde, double d);

struct OptConfig {
    double kappa_tilde = 2.0;
    double snr_db = 10.0;
    air::Metric metric = air::Metric::gmi;
    // penalty factor d: d_start doubled every d_every epochs, capped at d_max
    double d_start = 1.0;
    double d_max = 64.0;
    int d_every = 50;
    int epochs = 400;
    std::optional<double> lr;  ///< defaults per family
    double lr_final_ratio = 0.01;
    double joint_logit_lr_scale = 5.0;  ///< joint family: logits step this multiple of the point rate
    double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    int train_order = 24;  ///< Gauss-Hermite order during training
    int eval_order = 32;   ///< order for the reported final metric (adaptive)
    std::uint64_t seed = 0;
    // stochastic path: batch grows from batch_start to batch_end, temperature decays
    std::size_t batch_start = 500, batch_end = 10000;
    double tau_start = 1.0, tau_end = 0.1;

    double penalty_at(int epoch) const;
    double lr_at(int epoch, Family f) const;
};

double default_lr(Family f);

/// (M - metric)/M + sensing_loss(kappa, kappa_tilde, d) with d = cfg.d_max unless given.
double total_loss(const Constellation& c, const OptConfig& cfg, std::optional<double> d = {});

struct LossGradient {
    double loss = 0.0;
    double metric_bits = 0.0;
    double kurtosis = 0.0;
    std::vector<double> grad;  ///< w.r.t. flatten(p)
};

LossGradient loss_and_gradient(const ShapingParams& p, const OptConfig& cfg, double d, int order);

/// Soft one-hot rows softmax((log p + g)/tau), g standard Gumbel; row-major n x probs.size().
struct GumbelSample {
    std::size_t rows = 0, cols = 0;
    std::vector<double> weights;
    std::vector<std::size_t> hard;  ///< argmax of each row
};
GumbelSample gumbel_sample(const std::vector<double>& probs, double tau, std::size_t n, std::uint64_t seed);

/// Loss estimated from Gumbel-sampled symbols and Gaussian noise (validation path).
struct SampledLoss {
    double loss = 0.0;
    double metric_bits = 0.0;
    double std_error = 0.0;
};
SampledLoss sampled_loss(const Constellation& c, const OptConfig& cfg, std::size_t n, double tau,
                         std::uint64_t seed, std::optional<double> d = {});

struct TraceEntry {
    int epoch = 0;
    double loss = 0.0;
    double metric_bits = 0.0;
    double kurtosis = 0.0;
    bool violated = false;
    double best_loss = 0.0;  ///< running minimum of the selection loss (penalty d_max)
    double d = 0.0;
    double lr = 0.0;
};
using OptTrace = std::vector<TraceEntry>;

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, OptTrace trace)
        : std::runtime_error(what), trace_(std::move(trace)) {}
    const OptTrace& trace() const { return trace_; }

private:
    OptTrace trace_;
};

struct OptResult {
    Constellation constellation;
    ShapingParams params;
    OptTrace trace;
    double metric_bits = 0.0;  ///< metric of the returned constellation at eval_order
    double kurtosis = 0.0;
};

OptResult optimize(const ShapingParams& init, const OptConfig& cfg);

}  // namespace isac::shaping
