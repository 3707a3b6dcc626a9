#include "isac/air.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "isac/random.hpp"

namespace isac::air {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double log_sum_exp(std::span<const double> v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

void require_bit_classes(const Constellation& c) {
    for (int m = 1; m <= c.bits(); ++m) {
        bool has[2] = {false, false};
        for (std::size_t j = 0; j < c.size(); ++j)
            if (c.probs()[j] > 0.0) has[c.bit(j, m)] = true;
        if (!has[0] || !has[1])
            throw std::invalid_argument("bit position " + std::to_string(m) +
                                        " has an empty class among points with non-zero probability");
    }
}

// Per-sample symbol and bit-metric terms in nats for one received value y = x_i + w.
struct SampleTerms {
    double mi;   // log f(y|x_i) - log f(y)
    double gmi;  // sum_m log P(b_m(i)|y)
};

SampleTerms sample_terms(const Constellation& c, std::size_t i, cplx w, double s2,
                         std::vector<double>& metric, std::vector<double>& cls) {
    const std::size_t n = c.size();
    const cplx y = c.points()[i] + w;
    for (std::size_t j = 0; j < n; ++j) {
        const double p = c.probs()[j];
        metric[j] = p > 0.0 ? std::log(p) - std::norm(y - c.points()[j]) / s2
                            : -std::numeric_limits<double>::infinity();
    }
    const double lse = log_sum_exp(metric);
    SampleTerms t{-std::norm(w) / s2 - lse, 0.0};
    for (int m = 1; m <= c.bits(); ++m) {
        cls.clear();
        const int b = c.bit(i, m);
        for (std::size_t j = 0; j < n; ++j)
            if (c.bit(j, m) == b) cls.push_back(metric[j]);
        t.gmi += log_sum_exp(cls) - lse;
    }
    return t;
}

double entropy(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

Estimate monte_carlo(const Constellation& c, const AwgnChannel& ch, const MonteCarlo& mc, bool gmi) {
    if (mc.samples < 2) throw std::invalid_argument("Monte Carlo needs at least two samples");
    constexpr std::size_t kChunk = 8192;
    std::vector<double> metric(c.size()), cls;
    cls.reserve(c.size());
    const double hx = entropy(c.probs());
    double sum = 0.0, sum2 = 0.0;
    std::size_t done = 0;
    for (std::uint64_t chunk = 0; done < mc.samples; ++chunk) {
        Rng rng(derive_seed(mc.seed, chunk));
        std::discrete_distribution<std::size_t> pick(c.probs().begin(), c.probs().end());
        const std::size_t count = std::min(kChunk, mc.samples - done);
        for (std::size_t s = 0; s < count; ++s) {
            const std::size_t i = pick(rng);
            const cplx w = complex_normal(rng, ch.sigma_c2);
            const SampleTerms t = sample_terms(c, i, w, ch.sigma_c2, metric, cls);
            const double v = gmi ? hx + t.gmi / kLn2 : t.mi / kLn2;
            sum += v;
            sum2 += v * v;
        }
        done += count;
    }
    const double n = static_cast<double>(mc.samples);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
    return {gmi ? std::max(0.0, mean) : mean, std::sqrt(var / n), 0};
}

Estimate quadrature(const Constellation& c, const AwgnChannel& ch, const Quadrature& q, Metric metric) {
    if (q.order < 2 || q.order > kMaxQuadratureOrder)
        throw std::invalid_argument("quadrature order must be in [2, 128]");
    auto eval = [&](int order) {
        return evaluate_metric(c.points(), c.probs(), c.labels(), c.bits(), ch.sigma_c2, metric,
                               order, false)
            .bits;
    };
    int order = q.order;
    double v = eval(order);
    if (q.adaptive) {
        while (2 * order <= kMaxQuadratureOrder) {
            const double next = eval(2 * order);
            order *= 2;
            const bool converged = std::abs(next - v) <= 1e-5;
            v = next;
            if (converged) break;
        }
    }
    if (metric == Metric::gmi) v = std::max(0.0, v);
    return {v, 0.0, order};
}

}  // namespace

AwgnChannel::AwgnChannel(double s2) : sigma_c2(s2) {
    if (!(s2 > 0.0) || !std::isfinite(s2))
        throw std::invalid_argument("noise variance must be positive and finite");
}

AwgnChannel AwgnChannel::from_snr_db(double snr_db, double es) {
    return AwgnChannel(es * std::pow(10.0, -snr_db / 10.0));
}

GaussHermiteRule gauss_hermite(int order) {
    if (order < 1 || order > 512) throw std::invalid_argument("Gauss-Hermite order out of range");
    // Golub-Welsch: eigen-decomposition of the Jacobi matrix of the Hermite recurrence.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd sub(std::max(order - 1, 0));
    for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    GaussHermiteRule r;
    r.nodes.resize(order);
    r.weights.resize(order);
    const double mu0 = std::sqrt(std::numbers::pi);
    for (int k = 0; k < order; ++k) {
        r.nodes[k] = es.eigenvalues()[k];
        const double v = es.eigenvectors()(0, k);
        r.weights[k] = mu0 * v * v;
    }
    // exact symmetry
    for (int k = 0; k < order / 2; ++k) {
        const int l = order - 1 - k;
        const double x = 0.5 * (r.nodes[l] - r.nodes[k]);
        const double w = 0.5 * (r.weights[l] + r.weights[k]);
        r.nodes[k] = -x;
        r.nodes[l] = x;
        r.weights[k] = r.weights[l] = w;
    }
    if (order % 2 == 1) r.nodes[order / 2] = 0.0;
    return r;
}

LlrVector exact_llrs(const Constellation& c, cplx y, const AwgnChannel& ch) {
    require_bit_classes(c);
    const std::size_t n = c.size();
    std::vector<double> metric(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double p = c.probs()[j];
        metric[j] = p > 0.0 ? std::log(p) - std::norm(y - c.points()[j]) / ch.sigma_c2
                            : -std::numeric_limits<double>::infinity();
    }
    LlrVector out(c.bits());
    std::vector<double> zero, one;
    zero.reserve(n);
    one.reserve(n);
    for (int m = 1; m <= c.bits(); ++m) {
        zero.clear();
        one.clear();
        for (std::size_t j = 0; j < n; ++j) (c.bit(j, m) ? one : zero).push_back(metric[j]);
        out[m - 1] = log_sum_exp(zero) - log_sum_exp(one);
    }
    return out;
}

Estimate mi_estimate(const Constellation& c, const AwgnChannel& ch, const Method& method) {
    if (const auto* mc = std::get_if<MonteCarlo>(&method)) return monte_carlo(c, ch, *mc, false);
    return quadrature(c, ch, std::get<Quadrature>(method), Metric::mi);
}

Estimate gmi_estimate(const Constellation& c, const AwgnChannel& ch, const Method& method) {
    require_bit_classes(c);
    if (const auto* mc = std::get_if<MonteCarlo>(&method)) return monte_carlo(c, ch, *mc, true);
    return quadrature(c, ch, std::get<Quadrature>(method), Metric::gmi);
}

MismatchedGmi gmi_with_demapper(const Constellation& c, const AwgnChannel& ch, const Demapper& demap,
                                int order) {
    const auto rule = gauss_hermite(order);
    const double sigma = std::sqrt(ch.sigma_c2);
    const int mb = c.bits();
    // signed LLRs: positive when the demapper favours the transmitted bit
    std::vector<double> z, weight;
    std::vector<double> llr(mb);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double p = c.probs()[i];
        if (p <= 0.0) continue;
        for (int a = 0; a < order; ++a) {
            for (int b = 0; b < order; ++b) {
                const double w = p * rule.weights[a] * rule.weights[b] / std::numbers::pi;
                const cplx y = c.points()[i] + sigma * cplx(rule.nodes[a], rule.nodes[b]);
                demap(y, llr);
                for (int m = 1; m <= mb; ++m) {
                    z.push_back(c.bit(i, m) ? -llr[m - 1] : llr[m - 1]);
                    weight.push_back(w);
                }
            }
        }
    }
    const double hx = entropy(c.probs());
    auto rate = [&](double s) {
        double loss = 0.0;
        for (std::size_t k = 0; k < z.size(); ++k) {
            const double t = -s * z[k];
            // log2(1 + e^t) without overflow
            loss += weight[k] * (t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)));
        }
        return hx - loss / kLn2;
    };
    MismatchedGmi out;
    out.bits_unscaled = std::max(0.0, rate(1.0));
    // the rate is concave in s; golden-section search
    double lo = 0.0, hi = 4.0;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = rate(x1), f2 = rate(x2);
    while (hi - lo > 1e-6) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = rate(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = rate(x1);
        }
    }
    out.best_scale = 0.5 * (lo + hi);
    out.bits = std::max({0.0, rate(out.best_scale), out.bits_unscaled});
    return out;
}

double sample_metric_bits(const Constellation& c, std::size_t i, cplx w, double sigma_c2, Metric metric) {
    std::vector<double> m(c.size()), cls;
    cls.reserve(c.size());
    const SampleTerms t = sample_terms(c, i, w, sigma_c2, m, cls);
    return metric == Metric::gmi ? entropy(c.probs()) + t.gmi / kLn2 : t.mi / kLn2;
}

MetricValue evaluate_metric(std::span<const cplx> points, std::span<const double> probs,
                            std::span<const std::uint32_t> labels, int bits, double sigma_c2,
                            Metric metric, int order, bool gradient) {
    const std::size_t n = points.size();
    if (probs.size() != n || labels.size() != n) throw std::invalid_argument("size mismatch");
    if (!(sigma_c2 > 0.0)) throw std::invalid_argument("noise variance must be positive");
    const auto rule = gauss_hermite(order);
    const std::size_t K = static_cast<std::size_t>(order);
    const double sigma = std::sqrt(sigma_c2);
    const double inv_s2 = 1.0 / sigma_c2;
    const bool gmi = metric == Metric::gmi;

    // noise sample w = sigma (t_a + j t_b); per-axis weights normalized to one
    std::vector<double> wt(K), ts(K);
    for (std::size_t a = 0; a < K; ++a) {
        wt[a] = rule.weights[a] / std::sqrt(std::numbers::pi);
        ts[a] = sigma * rule.nodes[a];
    }

    // exp(-(|x_i - x_j + w|^2 - |w|^2)/s2) factorizes into a real-axis and an imaginary-axis term
    std::vector<double> P(n * n * K), Q(n * n * K);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const cplx d = points[i] - points[j];
            double* pr = &P[(i * n + j) * K];
            double* qr = &Q[(i * n + j) * K];
            for (std::size_t a = 0; a < K; ++a) {
                pr[a] = std::exp(-(d.real() * d.real() + 2.0 * d.real() * ts[a]) * inv_s2);
                qr[a] = std::exp(-(d.imag() * d.imag() + 2.0 * d.imag() * ts[a]) * inv_s2);
            }
        }

    MetricValue out;
    if (gradient) {
        out.d_points.assign(n, cplx(0.0, 0.0));
        out.d_probs.assign(n, 0.0);
    }
    std::vector<cplx> acc_w(gradient ? n * n : 0);
    std::vector<double> acc0(gradient ? n * n : 0);
    std::vector<double> E(n), cls(2 * static_cast<std::size_t>(bits));
    std::vector<double> inv_n(static_cast<std::size_t>(bits));

    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pi_ = probs[i];
        if (pi_ <= 0.0) continue;
        const std::uint32_t li = labels[i];
        for (std::size_t a = 0; a < K; ++a) {
            for (std::size_t b = 0; b < K; ++b) {
                const double w = wt[a] * wt[b];
                double S = 0.0;
                if (gmi) std::fill(cls.begin(), cls.end(), 0.0);
                for (std::size_t j = 0; j < n; ++j) {
                    const double e = P[(i * n + j) * K + a] * Q[(i * n + j) * K + b];
                    E[j] = e;
                    const double q = probs[j] * e;
                    S += q;
                    if (gmi) {
                        const std::uint32_t lj = labels[j];
                        for (int m = 0; m < bits; ++m) cls[2 * m + ((lj >> m) & 1u)] += q;
                    }
                }
                double f;  // contribution to the metric per unit weight p_i * w
                if (gmi) {
                    f = -bits * std::log2(S);
                    for (int m = 0; m < bits; ++m) {
                        const double nm = cls[2 * m + ((li >> m) & 1u)];
                        f += std::log2(nm);
                        inv_n[m] = 1.0 / nm;
                    }
                } else {
                    f = -std::log2(S);
                }
                value += pi_ * w * f;
                if (!gradient) continue;

                out.d_probs[i] += w * f;
                const double scale = -pi_ * w / kLn2;
                const cplx wn(ts[a], ts[b]);
                for (std::size_t j = 0; j < n; ++j) {
                    double c;  // dV/dq_j
                    if (gmi) {
                        double agree = 0.0;
                        const std::uint32_t same = ~(labels[j] ^ li);
                        for (int m = 0; m < bits; ++m)
                            if ((same >> m) & 1u) agree += inv_n[m];
                        c = scale * (bits / S - agree);
                    } else {
                        c = scale / S;
                    }
                    out.d_probs[j] += c * E[j];
                    const double g = c * probs[j] * E[j];
                    acc0[i * n + j] += g;
                    acc_w[i * n + j] += g * wn;
                }
            }
        }
    }

    if (gmi) {
        for (std::size_t i = 0; i < n; ++i) {
            if (probs[i] <= 0.0) continue;
            value -= probs[i] * std::log2(probs[i]);
            if (gradient) out.d_probs[i] += -std::log2(probs[i]) - 1.0 / kLn2;
        }
    }
    out.bits = value;

    if (gradient) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const cplx d = points[i] - points[j];
                const cplx G = -2.0 * inv_s2 * (d * acc0[i * n + j] + acc_w[i * n + j]);
                out.d_points[i] += G;
                out.d_points[j] -= G;
            }
    }
    return out;
}

}  // namespace isac::air
