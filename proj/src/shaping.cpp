#include "isac/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "isac/random.hpp"

namespace isac::shaping {

namespace {

std::vector<double> softmax(const std::vector<double>& z) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : z) mx = std::max(mx, v);
    std::vector<double> p(z.size());
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        p[i] = std::exp(z[i] - mx);
        s += p[i];
    }
    for (double& v : p) v /= s;
    return p;
}

// dL/dz for p = softmax(z)
std::vector<double> softmax_backward(const std::vector<double>& p, const std::vector<double>& gp) {
    double dot = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) dot += p[i] * gp[i];
    std::vector<double> gz(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) gz[i] = p[i] * (gp[i] - dot);
    return gz;
}

// Unnormalized points and probabilities of a parameter set.
struct Raw {
    std::vector<cplx> xt;
    std::vector<double> p;
    std::vector<double> s;  // cpas 1-D probabilities or gpas ring probabilities
};

std::size_t cpas_levels(const ShapingParams& sp) { return std::size_t{1} << (sp.bits / 2); }

std::vector<double> cpas_logits(const ShapingParams& sp) {
    const std::size_t L = cpas_levels(sp);
    std::vector<double> v(L);
    for (std::size_t k = 0; k < L / 2; ++k) {
        v[L / 2 + k] = sp.pa_raw[k];
        v[L / 2 - 1 - k] = sp.pa_raw[k];
    }
    return v;
}

double gpas_phase(std::size_t k, std::size_t n_ph) {
    return std::numbers::pi * (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(n_ph);
}

Raw raw_of(const ShapingParams& sp) {
    Raw r;
    const std::size_t n = std::size_t{1} << sp.bits;
    switch (sp.family) {
        case Family::geometric:
            r.xt = sp.x_raw;
            r.p.assign(n, 1.0 / static_cast<double>(n));
            break;
        case Family::probabilistic:
        case Family::joint:
            r.xt = sp.x_raw;
            r.p = softmax(sp.p_raw);
            break;
        case Family::cpas: {
            const std::size_t L = cpas_levels(sp);
            r.xt = sp.x_raw;
            r.s = softmax(cpas_logits(sp));
            r.p.resize(n);
            for (std::size_t ir = 0; ir < L; ++ir)
                for (std::size_t ii = 0; ii < L; ++ii) r.p[ir * L + ii] = r.s[ir] * r.s[ii];
            break;
        }
        case Family::gpas: {
            const std::size_t n_ph = std::size_t{1} << sp.phase_bits;
            const std::size_t n_r = std::size_t{1} << sp.amp_bits;
            r.s = softmax(sp.pa_raw);
            r.xt.resize(n);
            r.p.resize(n);
            for (std::size_t a = 0; a < n_r; ++a) {
                const double rad = std::exp(sp.radii_raw[a]);
                for (std::size_t k = 0; k < n_ph; ++k) {
                    r.xt[a * n_ph + k] = std::polar(rad, gpas_phase(k, n_ph));
                    r.p[a * n_ph + k] = r.s[a] / static_cast<double>(n_ph);
                }
            }
            break;
        }
    }
    return r;
}

std::vector<double> backprop(const ShapingParams& sp, const Raw& r, const std::vector<cplx>& gx,
                             const std::vector<double>& gp) {
    std::vector<double> g;
    g.reserve(parameter_count(sp));
    auto push_points = [&] {
        for (const auto& v : gx) {
            g.push_back(v.real());
            g.push_back(v.imag());
        }
    };
    switch (sp.family) {
        case Family::geometric:
            push_points();
            break;
        case Family::probabilistic:
            for (double v : softmax_backward(r.p, gp)) g.push_back(v);
            break;
        case Family::joint:
            push_points();
            for (double v : softmax_backward(r.p, gp)) g.push_back(v);
            break;
        case Family::cpas: {
            const std::size_t L = cpas_levels(sp);
            std::vector<double> gs(L, 0.0);
            for (std::size_t ir = 0; ir < L; ++ir)
                for (std::size_t ii = 0; ii < L; ++ii) {
                    gs[ir] += gp[ir * L + ii] * r.s[ii];
                    gs[ii] += gp[ir * L + ii] * r.s[ir];
                }
            const auto gv = softmax_backward(r.s, gs);
            for (std::size_t k = 0; k < L / 2; ++k) g.push_back(gv[L / 2 + k] + gv[L / 2 - 1 - k]);
            break;
        }
        case Family::gpas: {
            const std::size_t n_ph = std::size_t{1} << sp.phase_bits;
            const std::size_t n_r = std::size_t{1} << sp.amp_bits;
            std::vector<double> gq(n_r, 0.0);
            for (std::size_t a = 0; a < n_r; ++a)
                for (std::size_t k = 0; k < n_ph; ++k) gq[a] += gp[a * n_ph + k] / static_cast<double>(n_ph);
            for (double v : softmax_backward(r.s, gq)) g.push_back(v);
            if (sp.train_radii) {
                for (std::size_t a = 0; a < n_r; ++a) {
                    double acc = 0.0;
                    for (std::size_t k = 0; k < n_ph; ++k) {
                        const cplx u = std::polar(1.0, gpas_phase(k, n_ph));
                        acc += gx[a * n_ph + k].real() * u.real() + gx[a * n_ph + k].imag() * u.imag();
                    }
                    g.push_back(acc * std::exp(sp.radii_raw[a]));
                }
            }
            break;
        }
    }
    return g;
}

int metric_bits_cap(const ShapingParams& sp) { return sp.bits; }

}  // namespace

std::string to_string(Family f) {
    switch (f) {
        case Family::geometric: return "geometric";
        case Family::probabilistic: return "probabilistic";
        case Family::joint: return "joint";
        case Family::cpas: return "cpas";
        case Family::gpas: return "gpas";
    }
    return "?";
}

Family family_from_string(const std::string& s) {
    for (Family f : {Family::geometric, Family::probabilistic, Family::joint, Family::cpas, Family::gpas})
        if (to_string(f) == s) return f;
    throw std::invalid_argument("unknown shaping family: " + s);
}

ShapingParams initial_params(Family family, const InitOptions& opt) {
    ShapingParams sp;
    sp.family = family;
    sp.bits = opt.bits;
    Rng rng(derive_seed(opt.seed, 0x5eed));
    std::normal_distribution<double> nd(0.0, opt.jitter);
    if (family == Family::gpas) {
        if (opt.amp_bits < 0 || opt.amp_bits >= opt.bits)
            throw std::invalid_argument("gpas needs 0 <= M_A < M");
        sp.amp_bits = opt.amp_bits;
        sp.phase_bits = opt.bits - opt.amp_bits;
        sp.train_radii = opt.train_radii;
        const std::size_t n_r = std::size_t{1} << sp.amp_bits;
        std::vector<double> radii(n_r);
        for (std::size_t a = 0; a < n_r; ++a) {
            radii[a] = static_cast<double>(a + 1);
            sp.radii_raw.push_back(std::log(radii[a]));
            sp.pa_raw.push_back(nd(rng));
        }
        sp.labels = make_gpas_grid(sp.amp_bits, sp.phase_bits, radii).labels();
        return sp;
    }
    const Constellation q = make_qam(opt.bits);
    sp.labels = q.labels();
    sp.x_raw = q.points();
    const std::size_t n = q.size();
    switch (family) {
        case Family::geometric:
            for (auto& x : sp.x_raw) x += cplx(nd(rng), nd(rng));
            break;
        case Family::probabilistic:
            for (std::size_t i = 0; i < n; ++i) sp.p_raw.push_back(nd(rng));
            break;
        case Family::joint:
            for (auto& x : sp.x_raw) x += cplx(nd(rng), nd(rng));
            for (std::size_t i = 0; i < n; ++i) sp.p_raw.push_back(nd(rng));
            break;
        case Family::cpas:
            for (std::size_t k = 0; k < (std::size_t{1} << (opt.bits / 2)) / 2; ++k) sp.pa_raw.push_back(nd(rng));
            break;
        case Family::gpas:
            break;
    }
    return sp;
}

Constellation project(const ShapingParams& sp) {
    const Raw r = raw_of(sp);
    double P = 0.0;
    for (std::size_t i = 0; i < r.xt.size(); ++i) P += r.p[i] * std::norm(r.xt[i]);
    if (!(P > 0.0)) throw std::invalid_argument("zero-power parameter set");
    std::vector<cplx> x(r.xt.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = r.xt[i] / std::sqrt(P);
    return Constellation(std::move(x), r.p, sp.labels, {to_string(sp.family), {}, {}});
}

std::size_t parameter_count(const ShapingParams& sp) {
    switch (sp.family) {
        case Family::geometric: return 2 * sp.x_raw.size();
        case Family::probabilistic: return sp.p_raw.size();
        case Family::joint: return 2 * sp.x_raw.size() + sp.p_raw.size();
        case Family::cpas: return sp.pa_raw.size();
        case Family::gpas: return sp.pa_raw.size() + (sp.train_radii ? sp.radii_raw.size() : 0);
    }
    return 0;
}

std::vector<double> flatten(const ShapingParams& sp) {
    std::vector<double> t;
    auto points = [&] {
        for (const auto& x : sp.x_raw) {
            t.push_back(x.real());
            t.push_back(x.imag());
        }
    };
    switch (sp.family) {
        case Family::geometric: points(); break;
        case Family::probabilistic: t = sp.p_raw; break;
        case Family::joint:
            points();
            t.insert(t.end(), sp.p_raw.begin(), sp.p_raw.end());
            break;
        case Family::cpas: t = sp.pa_raw; break;
        case Family::gpas:
            t = sp.pa_raw;
            if (sp.train_radii) t.insert(t.end(), sp.radii_raw.begin(), sp.radii_raw.end());
            break;
    }
    return t;
}

void unflatten(ShapingParams& sp, const std::vector<double>& t) {
    if (t.size() != parameter_count(sp)) throw std::invalid_argument("parameter vector size mismatch");
    std::size_t k = 0;
    auto points = [&] {
        for (auto& x : sp.x_raw) {
            x = cplx(t[k], t[k + 1]);
            k += 2;
        }
    };
    auto fill = [&](std::vector<double>& v) {
        for (auto& e : v) e = t[k++];
    };
    switch (sp.family) {
        case Family::geometric: points(); break;
        case Family::probabilistic: fill(sp.p_raw); break;
        case Family::joint:
            points();
            fill(sp.p_raw);
            break;
        case Family::cpas: fill(sp.pa_raw); break;
        case Family::gpas:
            fill(sp.pa_raw);
            if (sp.train_radii) fill(sp.radii_raw);
            break;
    }
}

double sensing_loss(double kappa, double kappa_tilde, double d) {
    if (!(d > 0.0)) throw std::invalid_argument("penalty factor must be positive");
    return kappa <= kappa_tilde ? 0.0 : d * (kappa - kappa_tilde);
}

double OptConfig::penalty_at(int epoch) const {
    const int steps = d_every > 0 ? epoch / d_every : 0;
    return std::min(d_max, d_start * std::pow(2.0, steps));
}

double default_lr(Family f) { return f == Family::probabilistic || f == Family::cpas || f == Family::gpas ? 5e-2 : 1e-2; }

double OptConfig::lr_at(int epoch, Family f) const {
    const double lr0 = lr.value_or(default_lr(f));
    const double lr1 = lr0 * lr_final_ratio;
    const double t = epochs > 1 ? static_cast<double>(epoch) / (epochs - 1) : 1.0;
    return lr1 + 0.5 * (lr0 - lr1) * (1.0 + std::cos(std::numbers::pi * t));
}

double total_loss(const Constellation& c, const OptConfig& cfg, std::optional<double> d) {
    const auto ch = air::AwgnChannel::from_snr_db(cfg.snr_db);
    const air::Quadrature q{cfg.eval_order, true};
    const double v = cfg.metric == air::Metric::mi ? air::mi_estimate(c, ch, q).bits
                                                   : air::gmi_estimate(c, ch, q).bits;
    const double M = c.bits();
    return (M - v) / M + sensing_loss(moments(c).kurtosis, cfg.kappa_tilde, d.value_or(cfg.d_max));
}

LossGradient loss_and_gradient(const ShapingParams& sp, const OptConfig& cfg, double d, int order) {
    const Raw r = raw_of(sp);
    const std::size_t n = r.xt.size();
    double P = 0.0, A = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::norm(r.xt[i]);
        P += r.p[i] * e;
        A += r.p[i] * e * e;
    }
    const double sqP = std::sqrt(P);
    std::vector<cplx> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = r.xt[i] / sqP;

    const double s2 = air::AwgnChannel::from_snr_db(cfg.snr_db).sigma_c2;
    const auto mv = air::evaluate_metric(x, r.p, sp.labels, sp.bits, s2, cfg.metric, order, true);
    const double M = metric_bits_cap(sp);
    const double kappa = A / (P * P);

    LossGradient out;
    out.metric_bits = mv.bits;
    out.kurtosis = kappa;
    out.loss = (M - mv.bits) / M + (kappa > cfg.kappa_tilde ? d * (kappa - cfg.kappa_tilde) : 0.0);

    std::vector<cplx> gx(n);
    std::vector<double> gp(n);
    double dot = 0.0;  // sum_j Re(conj(g_j) x_j)
    for (std::size_t i = 0; i < n; ++i) {
        gx[i] = -mv.d_points[i] / M;
        gp[i] = -mv.d_probs[i] / M;
        dot += gx[i].real() * x[i].real() + gx[i].imag() * x[i].imag();
    }
    // through x = xt / sqrt(P), P = sum p |xt|^2
    const double D = -dot / (2.0 * P);
    std::vector<cplx> gxt(n);
    for (std::size_t i = 0; i < n; ++i) {
        gxt[i] = gx[i] / sqP + 2.0 * r.p[i] * D * r.xt[i];
        gp[i] += D * std::norm(r.xt[i]);
    }
    if (kappa > cfg.kappa_tilde) {
        const double P2 = P * P, P3 = P2 * P;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = std::norm(r.xt[i]);
            gxt[i] += d * 4.0 * r.p[i] * (e / P2 - A / P3) * r.xt[i];
            gp[i] += d * (e * e / P2 - 2.0 * A * e / P3);
        }
    }
    out.grad = backprop(sp, r, gxt, gp);
    return out;
}

GumbelSample gumbel_sample(const std::vector<double>& probs, double tau, std::size_t n, std::uint64_t seed) {
    if (!(tau > 0.0)) throw std::invalid_argument("Gumbel temperature must be positive");
    const std::size_t m = probs.size();
    GumbelSample g;
    g.rows = n;
    g.cols = m;
    g.weights.resize(n * m);
    g.hard.resize(n);
    std::vector<double> logp(m);
    for (std::size_t j = 0; j < m; ++j)
        logp[j] = probs[j] > 0.0 ? std::log(probs[j]) : -std::numeric_limits<double>::infinity();
    Rng rng(derive_seed(seed, 0x6b));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> z(m);
    for (std::size_t r = 0; r < n; ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t j = 0; j < m; ++j) {
            double v = u(rng);
            while (v <= 0.0) v = u(rng);
            z[j] = (logp[j] - std::log(-std::log(v))) / tau;
            if (z[j] > mx) {
                mx = z[j];
                arg = j;
            }
        }
        double s = 0.0;
        double* row = &g.weights[r * m];
        for (std::size_t j = 0; j < m; ++j) {
            row[j] = std::exp(z[j] - mx);
            s += row[j];
        }
        for (std::size_t j = 0; j < m; ++j) row[j] /= s;
        g.hard[r] = arg;
    }
    return g;
}

SampledLoss sampled_loss(const Constellation& c, const OptConfig& cfg, std::size_t n, double tau,
                         std::uint64_t seed, std::optional<double> d) {
    if (n < 2) throw std::invalid_argument("need at least two samples");
    const double s2 = air::AwgnChannel::from_snr_db(cfg.snr_db).sigma_c2;
    const auto g = gumbel_sample(c.probs(), tau, n, seed);
    Rng rng(derive_seed(seed, 0x401));
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const cplx w = complex_normal(rng, s2);
        const double v = air::sample_metric_bits(c, g.hard[r], w, s2, cfg.metric);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
    SampledLoss out;
    out.metric_bits = mean;
    out.std_error = std::sqrt(var / static_cast<double>(n));
    const double M = c.bits();
    out.loss = (M - mean) / M + sensing_loss(moments(c).kurtosis, cfg.kappa_tilde, d.value_or(cfg.d_max));
    return out;
}

OptResult optimize(const ShapingParams& init, const OptConfig& cfg) {
    if (!(cfg.kappa_tilde >= 1.0 && cfg.kappa_tilde <= 2.0))
        throw std::invalid_argument("kappa_tilde must lie in [1, 2]");
    if (cfg.epochs < 1) throw std::invalid_argument("need at least one epoch");
    ShapingParams sp = init;
    std::vector<double> theta = flatten(sp);
    std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0);
    std::vector<double> best = theta;
    std::vector<double> scale(theta.size(), 1.0);
    if (sp.family == Family::joint)
        std::fill(scale.begin() + static_cast<std::ptrdiff_t>(2 * sp.x_raw.size()), scale.end(), cfg.joint_logit_lr_scale);
    double best_sel = std::numeric_limits<double>::infinity();
    OptTrace trace;
    trace.reserve(cfg.epochs + 1);
    const double M = sp.bits;

    auto consider = [&](int epoch, double d, double lr) -> LossGradient {
        unflatten(sp, theta);
        LossGradient lg = loss_and_gradient(sp, cfg, d, cfg.train_order);
        bool finite = std::isfinite(lg.loss) && std::isfinite(lg.metric_bits);
        for (double gi : lg.grad) finite = finite && std::isfinite(gi);
        if (!finite)
            throw DivergenceError("optimization diverged at epoch " + std::to_string(epoch), trace);
        const double sel = (M - lg.metric_bits) / M +
                           (lg.kurtosis > cfg.kappa_tilde ? cfg.d_max * (lg.kurtosis - cfg.kappa_tilde) : 0.0);
        if (sel < best_sel) {
            best_sel = sel;
            best = theta;
        }
        trace.push_back({epoch, lg.loss, lg.metric_bits, lg.kurtosis, lg.kurtosis > cfg.kappa_tilde, best_sel, d, lr});
        return lg;
    };

    for (int e = 0; e < cfg.epochs; ++e) {
        const double d = cfg.penalty_at(e);
        const double lr = cfg.lr_at(e, sp.family);
        const LossGradient lg = consider(e, d, lr);
        const double b1t = 1.0 - std::pow(cfg.beta1, e + 1);
        const double b2t = 1.0 - std::pow(cfg.beta2, e + 1);
        for (std::size_t k = 0; k < theta.size(); ++k) {
            m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * lg.grad[k];
            v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * lg.grad[k] * lg.grad[k];
            theta[k] -= lr * scale[k] * (m[k] / b1t) / (std::sqrt(v[k] / b2t) + cfg.adam_eps);
        }
    }
    consider(cfg.epochs, cfg.penalty_at(cfg.epochs), 0.0);

    unflatten(sp, best);
    OptResult res;
    res.params = sp;
    res.constellation = project(sp);
    res.constellation.meta().kappa_tilde = cfg.kappa_tilde;
    res.constellation.meta().snr_db = cfg.snr_db;
    res.trace = std::move(trace);
    const auto ch = air::AwgnChannel::from_snr_db(cfg.snr_db);
    const air::Quadrature q{cfg.eval_order, true};
    res.metric_bits = cfg.metric == air::Metric::mi ? air::mi_estimate(res.constellation, ch, q).bits
                                                    : air::gmi_estimate(res.constellation, ch, q).bits;
    res.kurtosis = moments(res.constellation).kurtosis;
    return res;
}

}  // namespace isac::shaping
