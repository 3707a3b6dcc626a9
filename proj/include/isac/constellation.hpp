#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace isac {

using cplx = std::complex<double>;

/// Optional descriptive fields carried alongside a constellation.
struct ConstellationMeta {
    std::string family;
    std::optional<double> kappa_tilde;
    std::optional<double> snr_db;
};

/**
 * Finite complex constellation with prior probabilities and bit labels.
 *
 * Labels are integers read MSB-first: bit position m (1..M) is bit M-m of
 * the integer. Construction validates sizes, the label bijection and the
 * probability simplex; probabilities are renormalized to sum exactly to one.
 */
class Constellation {
public:
    Constellation() = default;
    Constellation(std::vector<cplx> points, std::vector<double> probs,
                  std::vector<std::uint32_t> labels, ConstellationMeta meta = {});

    std::size_t size() const { return points_.size(); }
    int bits() const { return bits_; }

    const std::vector<cplx>& points() const { return points_; }
    const std::vector<double>& probs() const { return probs_; }
    const std::vector<std::uint32_t>& labels() const { return labels_; }
    const ConstellationMeta& meta() const { return meta_; }
    ConstellationMeta& meta() { return meta_; }

    /// Bit m (1-based, MSB first) of the label of point i.
    int bit(std::size_t i, int m) const {
        return static_cast<int>((labels_[i] >> (bits_ - m)) & 1u);
    }

    /// Index of the point carrying a given label.
    std::size_t index_of_label(std::uint32_t label) const;

    /// Entropy of the symbol distribution in bits.
    double entropy_bits() const;

private:
    std::vector<cplx> points_;
    std::vector<double> probs_;
    std::vector<std::uint32_t> labels_;
    ConstellationMeta meta_;
    int bits_ = 0;
};

struct Moments {
    cplx mean;
    double power = 0.0;
    double kurtosis = 0.0;
};

/// Binary reflected Gray code.
inline std::uint32_t gray(std::uint32_t i) { return i ^ (i >> 1); }
std::uint32_t gray_inverse(std::uint32_t g);

/// Square Gray-labelled QAM with 2^M points, unit power.
Constellation make_qam(int bits);

/// 2^M unit-circle points. M=1 gives {+1,-1}; otherwise phases pi(2k+1)/2^M.
Constellation make_psk(int bits);

/**
 * APSK grid of 2^M_A rings times 2^M_phi phases pi(2k+1)/2^M_phi.
 *
 * Label layout is amplitude bits first. For 2^M_phi >= 4 the first phase bit
 * is the sign of the real part and the second the sign of the imaginary part.
 * Ring probabilities default to uniform; the result is power normalized.
 */
Constellation make_gpas_grid(int amp_bits, int phase_bits, std::span<const double> radii,
                             std::span<const double> ring_probs = {});

/// Phase label of sector k (0..n-1) on an n-phase GPAS ring.
std::uint32_t gpas_phase_label(std::uint32_t k, std::uint32_t n_phases);

Moments moments(const Constellation& c);

/// Kurtosis sum p|x|^4 / (sum p|x|^2)^2 for raw points.
double kurtosis(std::span<const cplx> points, std::span<const double> probs);

Constellation normalize(const Constellation& c);

}  // namespace isac
