#include "isac/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isac/special.hpp"

namespace isac::bounds {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
// Above this truncation point the closed form cancels; switch to the series.
constexpr double kSeriesSwitch = 10.0;

// Inverse Mills ratio of the standard normal at alpha.
double mills(double alpha) {
    const double w = alpha / kSqrt2;
    const double c = std::sqrt(2.0 / kPi);
    if (w < -5.0) {
        const double e = std::exp(-w * w);
        return c * e / (2.0 - e * special::erfcx(-w));
    }
    return c / special::erfcx(w);
}

// M_q = sum_k (-eps)^k (q+2k)!/k!, the normalized moments of exp(-v - eps v^2).
std::array<double, 3> tail_series(double alpha) {
    const double eps = 1.0 / (2.0 * alpha * alpha);
    std::array<double, 3> m{};
    for (int q = 0; q < 3; ++q) {
        double term = std::tgamma(q + 1.0);
        double sum = term;
        double prev = std::abs(term);
        for (int k = 0; k < 400; ++k) {
            const double next = term * -eps * (q + 2.0 * k + 2.0) * (q + 2.0 * k + 1.0) / (k + 1.0);
            if (std::abs(next) > prev) break;
            sum += next;
            term = next;
            prev = std::abs(next);
            if (prev < 1e-18 * std::abs(sum)) break;
        }
        m[q] = sum;
    }
    return m;
}

// E[u^2] / E[u]^2 for u >= 0 with density proportional to exp(-(u/s + alpha)^2 / 2).
// alpha -> -inf is the ring limit (ratio 1), alpha -> +inf the Gaussian limit (ratio 2).
double shape_ratio(double alpha) {
    if (alpha > kSeriesSwitch) {
        const auto m = tail_series(alpha);
        return m[2] * m[0] / (m[1] * m[1]);
    }
    const double d = mills(alpha) - alpha;
    return (1.0 - alpha * d) / (d * d);
}

MaxEntParams params_from_shape(double alpha, double c1) {
    MaxEntParams p;
    if (alpha > kSeriesSwitch) {
        const auto m = tail_series(alpha);
        const double eps = 1.0 / (2.0 * alpha * alpha);
        const double b = m[1] / (m[0] * c1);
        p.gamma2 = -b;
        p.gamma4 = -eps * b * b;
        p.gamma0 = std::log(b / (kPi * m[0]));
        return p;
    }
    const double d = mills(alpha) - alpha;
    const double s = c1 / d;
    p.gamma4 = -1.0 / (2.0 * s * s);
    p.gamma2 = -alpha / s;
    p.gamma0 = -(std::log(kPi * s * std::sqrt(kPi / 2.0)) + special::log_erfcx(alpha / kSqrt2));
    return p;
}

void check_constraints(const MomentConstraints& c) {
    if (!(c.c1 > 0.0) || !std::isfinite(c.c1) || !std::isfinite(c.c2) || c.c0 != 1.0)
        throw InfeasibleError("invalid constraint set " + c.describe());
}

// Piecewise Gauss-Kronrod integration of g(u) * exp(phi(u)) over u >= 0.
template <class G>
double integrate_radial(const MaxEntParams& p, G g) {
    if (p.gamma4 > 0.0 || (p.gamma4 == 0.0 && p.gamma2 >= 0.0))
        throw std::domain_error("moment integral diverges for these parameters");
    double mode = 0.0, width;
    if (p.gamma4 < 0.0) {
        width = 1.0 / std::sqrt(-2.0 * p.gamma4);
        if (p.gamma2 > 0.0) {
            mode = p.gamma2 / (-2.0 * p.gamma4);
        } else if (p.gamma2 < 0.0) {
            width = std::min(width, 1.0 / -p.gamma2);
        }
    } else {
        width = 1.0 / -p.gamma2;
    }
    std::vector<double> cuts{0.0};
    for (int k = -12; k <= 40; ++k) {
        const double u = mode + k * width;
        if (u > cuts.back()) cuts.push_back(u);
    }
    auto f = [&](double u) {
        return g(u) * std::exp(p.gamma0 + p.gamma2 * u + p.gamma4 * u * u);
    };
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 8, 1e-13);
    const double start = cuts.back();
    boost::math::quadrature::exp_sinh<double> tail;
    total += tail.integrate([&](double t) { return f(start + t); }, 1e-13);
    return total;
}

}  // namespace

std::string MomentConstraints::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "(C0=" << c0 << ", C1=" << c1 << ", C2=" << c2 << ")";
    return os.str();
}

MomentConstraints constraints_for(Side side, double es, double sigma_c2, double kappa_tilde) {
    if (!(es > 0.0)) throw std::invalid_argument("Es must be positive");
    if (!(sigma_c2 > 0.0)) throw std::invalid_argument("noise variance must be positive");
    if (!std::isfinite(kappa_tilde)) throw std::invalid_argument("kappa_tilde must be finite");
    MomentConstraints c;
    if (side == Side::lower) {
        c.c1 = es;
        c.c2 = kappa_tilde * es * es;
    } else {
        c.c1 = es + sigma_c2;
        c.c2 = kappa_tilde * es * es + 4.0 * es * sigma_c2 + 2.0 * sigma_c2 * sigma_c2;
    }
    return c;
}

MaxEntParams solve_max_entropy(const MomentConstraints& c) {
    check_constraints(c);
    const double r = c.c2 / (c.c1 * c.c1);
    if (r > 2.0 + 1e-12 || !(r > 1.0))
        throw InfeasibleError("no max-entropy density for " + c.describe() +
                              ": need 1 < C2/C1^2 <= 2");
    if (r >= 2.0 - 1e-15) return {-std::log(kPi * c.c1), -1.0 / c.c1, 0.0};

    auto f = [r](double a) { return shape_ratio(a) - r; };
    double lo = -50.0, hi = 50.0;
    while (f(lo) > 0.0) {
        lo *= 2.0;
        if (lo < -1e12) throw InfeasibleError("no sign change below bracket for " + c.describe());
    }
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw InfeasibleError("no sign change above bracket for " + c.describe());
    }
    for (int it = 0; it < 300 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo + hi) / 2); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? hi : lo) = mid;
    }
    double a = 0.5 * (lo + hi);
    for (int k = 0; k < 2; ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(a));
        const double d = (f(a + h) - f(a - h)) / (2.0 * h);
        if (!(d > 0.0)) break;
        const double next = a - f(a) / d;
        if (next < lo || next > hi || !(std::abs(f(next)) < std::abs(f(a)))) break;
        a = next;
    }
    return params_from_shape(a, c.c1);
}

double solve_gamma2(const MomentConstraints& c) { return solve_max_entropy(c).gamma2; }

std::pair<double, double> gamma0_gamma4(double gamma2, const MomentConstraints& c) {
    check_constraints(c);
    const double t = gamma2 * c.c1 + 1.0;
    const double arg = (c.c1 * t / c.c2 - gamma2) / kPi;
    if (!(arg > 0.0))
        throw InfeasibleError("non-positive logarithm argument for gamma0 at " + c.describe());
    return {std::log(arg), -t / (2.0 * c.c2)};
}

double gamma2_equation_rhs(double gamma2, const MomentConstraints& c) {
    const double t = gamma2 * c.c1 + 1.0;
    const double a = c.c1 * t / c.c2 - gamma2;
    // Gaussian point t = 0: limit of the product as erfcx decays like 1/(w sqrt(pi))
    if (t == 0.0 && gamma2 < 0.0) return a / -gamma2;
    if (!(t > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double w = -gamma2 * std::sqrt(c.c2 / (2.0 * t));
    return a * std::sqrt(kPi * c.c2 / (2.0 * t)) * special::erfcx(w);
}

double max_entropy_bits(const MaxEntParams& p, const MomentConstraints& c) {
    return (-p.gamma0 - c.c1 * p.gamma2 - c.c2 * p.gamma4) / std::numbers::ln2;
}

BoundDetail mi_bounds_detail(double es, double sigma_c2, double kappa_tilde) {
    BoundDetail d;
    d.kappa_out_of_range = kappa_tilde < 1.0 || kappa_tilde > 2.0;
    d.kappa_used_lower = kappa_tilde;
    if (kappa_tilde < kKappaClamp) {
        d.kappa_used_lower = kKappaClamp;
        d.lower_clamped = true;
    }
    d.lower_constraints = constraints_for(Side::lower, es, sigma_c2, d.kappa_used_lower);
    d.upper_constraints = constraints_for(Side::upper, es, sigma_c2, kappa_tilde);
    d.lower_params = solve_max_entropy(d.lower_constraints);
    d.upper_params = solve_max_entropy(d.upper_constraints);

    const double hw = std::log2(kPi * std::numbers::e * sigma_c2);
    const double hx = max_entropy_bits(d.lower_params, d.lower_constraints);
    const double hy = max_entropy_bits(d.upper_params, d.upper_constraints);
    d.bits.upper = hy - hw;
    d.bits.lower = std::log2(1.0 + std::exp2(hx - hw));
    return d;
}

BoundPair mi_bounds(double es, double sigma_c2, double kappa_tilde) {
    return mi_bounds_detail(es, sigma_c2, kappa_tilde).bits;
}

std::array<double, 3> closed_form_moments(const MaxEntParams& p) {
    if (p.gamma4 > 0.0 || (p.gamma4 == 0.0 && p.gamma2 >= 0.0))
        throw std::domain_error("moment integral diverges for these parameters");
    const double scale = kPi * std::exp(p.gamma0);
    if (p.gamma4 == 0.0) {
        const double b = -p.gamma2;
        return {scale / b, scale / (b * b), 2.0 * scale / (b * b * b)};
    }
    const double a = -p.gamma4;
    const double g2 = p.gamma2;
    // pi e^g0 erfc(-g2 / (2 sqrt a)) e^{g2^2 / (4a)}
    const double e = std::exp(p.gamma0 + std::log(kPi) + special::log_erfcx(-g2 / (2.0 * std::sqrt(a))));
    const double c0 = 0.5 * std::sqrt(kPi / a) * e;
    const double c1 = scale / (2.0 * a) + g2 * std::sqrt(kPi) / (4.0 * std::pow(a, 1.5)) * e;
    const double c2 = scale * g2 / (4.0 * a * a) +
                      (1.0 / (4.0 * a) + g2 * g2 / (8.0 * a * a)) * std::sqrt(kPi / a) * e;
    return {c0, c1, c2};
}

double moment_oracle(const MaxEntParams& p, int q) {
    if (q < 0 || q > 2) throw std::invalid_argument("moment order q must be 0, 1 or 2");
    return integrate_radial(p, [q](double u) { return kPi * std::pow(u, q); });
}

double entropy_oracle_bits(const MaxEntParams& p) {
    const double nats = integrate_radial(p, [&p](double u) {
        return -kPi * (p.gamma0 + p.gamma2 * u + p.gamma4 * u * u);
    });
    return nats / std::numbers::ln2;
}

}  // namespace isac::bounds
