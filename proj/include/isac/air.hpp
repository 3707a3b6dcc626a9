#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "isac/constellation.hpp"

namespace isac::air {

/// Complex AWGN with total variance sigma_c2 (sigma_c2/2 per component).
struct AwgnChannel {
    double sigma_c2;
    explicit AwgnChannel(double s2);
    static AwgnChannel from_snr_db(double snr_db, double es = 1.0);
};

using LlrVector = std::vector<double>;

/// Tensor-product Gauss-Hermite rule for weight exp(-t^2).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussHermiteRule gauss_hermite(int order);

constexpr int kMaxQuadratureOrder = 128;

struct Quadrature {
    int order = 32;
    bool adaptive = true;  ///< double the order until successive values agree within 1e-5 bits
};
struct MonteCarlo {
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
};
using Method = std::variant<Quadrature, MonteCarlo>;

struct Estimate {
    double bits = 0.0;
    double std_error = 0.0;  ///< zero for quadrature
    int order = 0;           ///< quadrature order used, zero for Monte Carlo
};

/// Bitwise LLRs log P(b=0|y)/P(b=1|y) with priors, full log-sum-exp.
LlrVector exact_llrs(const Constellation& c, cplx y, const AwgnChannel& ch);

Estimate mi_estimate(const Constellation& c, const AwgnChannel& ch, const Method& method = Quadrature{});
Estimate gmi_estimate(const Constellation& c, const AwgnChannel& ch, const Method& method = Quadrature{});

/// Soft demapper producing M LLRs for a received sample.
using Demapper = std::function<void(cplx y, std::span<double> llrs)>;

struct MismatchedGmi {
    double bits_unscaled = 0.0;  ///< LLRs used as they are
    double bits = 0.0;           ///< supremum over a common LLR scaling s
    double best_scale = 1.0;
};

/// GMI achieved by bit-metric decoding with an arbitrary demapper (quadrature over the noise).
MismatchedGmi gmi_with_demapper(const Constellation& c, const AwgnChannel& ch, const Demapper& demap,
                                int order = 32);

enum class Metric { mi, gmi };

/// Value and gradients of MI or (unclipped) GMI w.r.t. points and probabilities.
struct MetricValue {
    double bits = 0.0;
    std::vector<cplx> d_points;  ///< dV/dRe + j dV/dIm per point
    std::vector<double> d_probs;
};

/// Single-sample estimator of MI or GMI for y = x_i + w (its mean over i ~ p, w ~ CN is the metric).
double sample_metric_bits(const Constellation& c, std::size_t i, cplx w, double sigma_c2, Metric metric);

/**
 * Deterministic quadrature evaluation of the metric for raw arrays.
 *
 * Probabilities are treated as free variables (no simplex projection).
 * Gradients are filled only when requested.
 */
MetricValue evaluate_metric(std::span<const cplx> points, std::span<const double> probs,
                            std::span<const std::uint32_t> labels, int bits, double sigma_c2,
                            Metric metric, int order, bool gradient);

}  // namespace isac::air
