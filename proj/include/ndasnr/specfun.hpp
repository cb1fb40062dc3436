#pragma once

#include "ndasnr/quadrature.hpp"

namespace ndasnr {

/// Ceiling applied to every SNR estimate whose closed form would diverge.
inline constexpr double kGammaCap = 1e6;

/// Tolerances and truncation rules for the infinite-domain integrals.
struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    /// f(gamma) is integrated over |beta| <= f_radius.
    double f_radius = 12.0;
    /// J(alpha) is integrated over alpha^2/2 +- j_sigmas * alpha.
    double j_sigmas = 10.0;
    int max_intervals = 4000;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Parameters of the closed-form approximation
/// h(gamma) ~ 1 - (1 - 2/pi) (h1 gamma^h2 + 1)^h3.
struct HConstants {
    double h1;
    double h2;
    double h3;

    /// h1 > 0, h2 > 0 and h3 < 0 keep the approximation monotone on [0, inf).
    bool admissible() const noexcept { return h1 > 0.0 && h2 > 0.0 && h3 < 0.0; }
};

/// The published fit: H1 = 0.6153, H2 = 1.5296, H3 = -0.6575.
inline constexpr HConstants kPublishedHConstants{0.6153, 1.5296, -0.6575};

/// Gaussian tail probability Q(x) = P(W > x), W ~ N(0, 1).
double q_function(double x) noexcept;

/// f(gamma) = e^-gamma / sqrt(2 pi) * integral of beta^2 e^(-beta^2/2) / cosh(beta sqrt(2 gamma)).
/// Deflates the Fisher information when the symbols are unknown.
double f_gamma(double gamma, const QuadratureSpec& quad = {});

/// Mutual information of a consistent Gaussian LLR with standard deviation alpha.
double j_function(double alpha, const QuadratureSpec& quad = {});

enum class HForm { exact, approx };

/// h(gamma) = A^2 / M2 as a function of SNR, exact or via the closed-form fit.
/// Both forms rise from 2/pi at gamma = 0 towards 1.
double h_forward(double gamma, HForm form = HForm::exact, const HConstants& h = kPublishedHConstants);

enum class HInverseMethod {
    numeric_exact,  ///< bisection on the exact h
    am_approx,      ///< closed-form inverse of the fit
    p2,             ///< second-order polynomial in 1/ratio (valid near -3..3 dB)
};

struct HInverse {
    double gamma;
    bool clamped;  ///< the zero floor (ratio <= 2/pi) or kGammaCap fired
};

/// Maps a ratio A^2/M2 back to an SNR estimate.
///
/// numeric_exact and am_approx return 0 for ratio <= 2/pi and kGammaCap for
/// ratio >= 1, both flagged. p2 applies no clamping; it throws
/// std::domain_error for ratio == 0.
HInverse h_inverse(double ratio, HInverseMethod method, const HConstants& h = kPublishedHConstants);

}  // namespace ndasnr
