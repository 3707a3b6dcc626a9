#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace isac::bounds {

/// Raised when a moment constraint set admits no max-entropy solution.
class InfeasibleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class Side { lower, upper };

/// Zeroth, second and fourth moment targets E|z|^0, E|z|^2, E|z|^4.
struct MomentConstraints {
    double c0 = 1.0;
    double c1 = 1.0;
    double c2 = 2.0;
    std::string describe() const;
};

/// Parameters of f(z) = exp(g0 + g2 |z|^2 + g4 |z|^4).
struct MaxEntParams {
    double gamma0 = 0.0;
    double gamma2 = 0.0;
    double gamma4 = 0.0;
};

struct BoundPair {
    double lower = 0.0;
    double upper = 0.0;
};

struct BoundDetail {
    BoundPair bits;
    MomentConstraints lower_constraints, upper_constraints;
    MaxEntParams lower_params, upper_params;
    double kappa_used_lower = 0.0;
    bool lower_clamped = false;     ///< kappa_tilde raised to 1 + 1e-6 for the transmit side
    bool kappa_out_of_range = false;  ///< kappa_tilde outside [1, 2]
};

constexpr double kKappaClamp = 1.0 + 1e-6;

MomentConstraints constraints_for(Side side, double es, double sigma_c2, double kappa_tilde);

/**
 * Full max-entropy solution for a constraint set.
 *
 * The density is a truncated Gaussian in u = |z|^2; the root search runs over
 * its standardized truncation point, which stays well conditioned from the
 * ring limit C2 -> C1^2 up to the Gaussian limit C2 = 2 C1^2.
 */
MaxEntParams solve_max_entropy(const MomentConstraints& c);

/// gamma2 of solve_max_entropy.
double solve_gamma2(const MomentConstraints& c);

/// Closed forms for gamma0 and gamma4 given gamma2.
std::pair<double, double> gamma0_gamma4(double gamma2, const MomentConstraints& c);

/// Right-hand side of the scalar gamma2 equation (equals c0 at the solution).
double gamma2_equation_rhs(double gamma2, const MomentConstraints& c);

/// Differential entropy in bits.
double max_entropy_bits(const MaxEntParams& p, const MomentConstraints& c);

BoundPair mi_bounds(double es, double sigma_c2, double kappa_tilde);
BoundDetail mi_bounds_detail(double es, double sigma_c2, double kappa_tilde);

/// Closed-form moments C0, C1, C2 of the density given its parameters.
std::array<double, 3> closed_form_moments(const MaxEntParams& p);

/// Moment of order 2q by adaptive numerical quadrature over u = r^2.
double moment_oracle(const MaxEntParams& p, int q);

/// Differential entropy in bits by numerical quadrature of -f log2 f.
double entropy_oracle_bits(const MaxEntParams& p);

}  // namespace isac::bounds
