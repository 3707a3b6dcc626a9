#include "isac/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace isac {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
    int b = 0;
    while ((std::size_t{1} << b) < n) ++b;
    return b;
}

}  // namespace

Constellation::Constellation(std::vector<cplx> points, std::vector<double> probs,
                             std::vector<std::uint32_t> labels, ConstellationMeta meta)
    : points_(std::move(points)), probs_(std::move(probs)), labels_(std::move(labels)),
      meta_(std::move(meta)) {
    const std::size_t n = points_.size();
    if (n < 2 || !is_power_of_two(n))
        throw std::invalid_argument("constellation size must be a power of two >= 2, got " +
                                    std::to_string(n));
    if (probs_.size() != n || labels_.size() != n)
        throw std::invalid_argument("points, probs and labels must have equal length");
    bits_ = log2_exact(n);

    std::vector<bool> seen(n, false);
    for (auto l : labels_) {
        if (l >= n) throw std::invalid_argument("label out of range: " + std::to_string(l));
        if (seen[l]) throw std::invalid_argument("duplicate label: " + std::to_string(l));
        seen[l] = true;
    }

    double sum = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p))
            throw std::invalid_argument("probabilities must be finite and non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("probabilities sum to " + std::to_string(sum));
    if (std::abs(sum - 1.0) > 1e-12)
        for (double& p : probs_) p /= sum;

    for (const auto& x : points_)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
            throw std::invalid_argument("non-finite constellation point");
}

std::size_t Constellation::index_of_label(std::uint32_t label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw std::out_of_range("no point with label " + std::to_string(label));
    return static_cast<std::size_t>(it - labels_.begin());
}

double Constellation::entropy_bits() const {
    double h = 0.0;
    for (double p : probs_)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

std::uint32_t gray_inverse(std::uint32_t g) {
    std::uint32_t b = g;
    for (std::uint32_t s = g >> 1; s != 0; s >>= 1) b ^= s;
    return b;
}

Constellation make_qam(int bits) {
    if (bits < 2 || bits > 8 || bits % 2 != 0)
        throw std::invalid_argument("QAM bit count must be even in [2, 8], got " +
                                    std::to_string(bits));
    const int half = bits / 2;
    const std::uint32_t L = 1u << half;
    const std::size_t n = std::size_t{L} * L;
    std::vector<cplx> pts(n);
    std::vector<std::uint32_t> labels(n);
    std::vector<double> probs(n, 1.0 / static_cast<double>(n));
    // mean square of levels 2i-L+1 over both axes
    const double es = 2.0 * (static_cast<double>(L) * L - 1.0) / 3.0;
    const double scale = 1.0 / std::sqrt(es);
    for (std::uint32_t ir = 0; ir < L; ++ir) {
        for (std::uint32_t ii = 0; ii < L; ++ii) {
            const std::size_t k = std::size_t{ir} * L + ii;
            pts[k] = cplx(2.0 * ir - (L - 1.0), 2.0 * ii - (L - 1.0)) * scale;
            labels[k] = (gray(ir) << half) | gray(ii);
        }
    }
    return Constellation(std::move(pts), std::move(probs), std::move(labels), {"qam", {}, {}});
}

std::uint32_t gpas_phase_label(std::uint32_t k, std::uint32_t n_phases) {
    if (n_phases <= 2) return k;
    return gray((k + n_phases / 4) % n_phases);
}

Constellation make_psk(int bits) {
    if (bits < 1 || bits > 12)
        throw std::invalid_argument("PSK bit count must be in [1, 12], got " + std::to_string(bits));
    if (bits == 1)
        return Constellation({cplx(1.0, 0.0), cplx(-1.0, 0.0)}, {0.5, 0.5}, {0u, 1u},
                             {"psk", {}, {}});
    const double r[1] = {1.0};
    Constellation c = make_gpas_grid(0, bits, r);
    c.meta().family = "psk";
    return c;
}

Constellation make_gpas_grid(int amp_bits, int phase_bits, std::span<const double> radii,
                             std::span<const double> ring_probs) {
    if (amp_bits < 0 || phase_bits < 1 || amp_bits + phase_bits > 12)
        throw std::invalid_argument("invalid GPAS bit split");
    const std::uint32_t n_rings = 1u << amp_bits;
    const std::uint32_t n_ph = 1u << phase_bits;
    if (radii.size() != n_rings)
        throw std::invalid_argument("expected " + std::to_string(n_rings) + " radii");
    for (std::size_t a = 0; a < radii.size(); ++a) {
        if (!(radii[a] > 0.0)) throw std::invalid_argument("radii must be positive");
        if (a > 0 && !(radii[a] >= radii[a - 1]))
            throw std::invalid_argument("radii must be non-decreasing");
    }
    std::vector<double> rp(n_rings, 1.0 / n_rings);
    if (!ring_probs.empty()) {
        if (ring_probs.size() != n_rings)
            throw std::invalid_argument("ring probability count mismatch");
        rp.assign(ring_probs.begin(), ring_probs.end());
    }

    const std::size_t n = std::size_t{n_rings} * n_ph;
    std::vector<cplx> pts(n);
    std::vector<double> probs(n);
    std::vector<std::uint32_t> labels(n);
    double power = 0.0;
    for (std::uint32_t a = 0; a < n_rings; ++a) power += rp[a] * radii[a] * radii[a];
    if (!(power > 0.0)) throw std::invalid_argument("zero-power ring distribution");
    const double scale = 1.0 / std::sqrt(power);
    for (std::uint32_t a = 0; a < n_rings; ++a) {
        for (std::uint32_t k = 0; k < n_ph; ++k) {
            const std::size_t i = std::size_t{a} * n_ph + k;
            const double phi = std::numbers::pi * (2.0 * k + 1.0) / n_ph;
            pts[i] = std::polar(radii[a] * scale, phi);
            probs[i] = rp[a] / n_ph;
            labels[i] = (gray(a) << phase_bits) | gpas_phase_label(k, n_ph);
        }
    }
    return Constellation(std::move(pts), std::move(probs), std::move(labels), {"gpas", {}, {}});
}

double kurtosis(std::span<const cplx> points, std::span<const double> probs) {
    double m2 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double e = std::norm(points[i]);
        m2 += probs[i] * e;
        m4 += probs[i] * e * e;
    }
    if (!(m2 > 0.0)) throw std::invalid_argument("zero-power constellation");
    return m4 / (m2 * m2);
}

Moments moments(const Constellation& c) {
    Moments m;
    double m4 = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double p = c.probs()[i];
        const double e = std::norm(c.points()[i]);
        m.mean += p * c.points()[i];
        m.power += p * e;
        m4 += p * e * e;
    }
    m.kurtosis = m.power > 0.0 ? m4 / (m.power * m.power) : 0.0;
    return m;
}

Constellation normalize(const Constellation& c) {
    const Moments m = moments(c);
    if (!(m.power > 0.0)) throw std::invalid_argument("cannot normalize a zero-power constellation");
    const double s = 1.0 / std::sqrt(m.power);
    std::vector<cplx> pts = c.points();
    for (auto& x : pts) x *= s;
    return Constellation(std::move(pts), c.probs(), c.labels(), c.meta());
}

}  // namespace isac
