#pragma once

#include "ndasnr/specfun.hpp"

#include <cstddef>
#include <string_view>

namespace ndasnr {

/// Non-data-aided (symbols unknown) or data-aided (symbols known) observation.
enum class BoundMode { nda, da };

std::string_view to_string(BoundMode mode) noexcept;

/// Inverse Fisher information for (mu, sigma) from N observables.
struct FisherInverse {
    double mu_mu;
    double mu_sigma;
    double sigma_sigma;
    BoundMode mode;
};

/// Closed-form inverse Fisher matrix. DA mode is the NDA expression with f(gamma) = 0.
/// Throws std::invalid_argument unless gamma > 0, sigma > 0 and n >= 1.
FisherInverse fisher_inverse(double gamma, double sigma, std::size_t n, BoundMode mode,
                             const QuadratureSpec& quad = {});

/// Variant taking a precomputed f(gamma) (ignored in DA mode).
FisherInverse fisher_inverse_with_f(double gamma, double sigma, std::size_t n, BoundMode mode, double f);

/// Normalized Cramer-Rao bounds, all scaling as 1/n and independent of the absolute scale.
struct CrlbBundle {
    double gamma;
    std::size_t n;
    BoundMode mode;
    double ncrlb_mu;
    double ncrlb_sigma;
    double ncrlb_gamma;
    double ncrlb_lambda;
    double ncrlb_ber;
    double ncrlb_mi;
};

/// Evaluates every normalized bound at (gamma, n). The BER bound uses its
/// closed form; the mutual-information bound differentiates J(sqrt(8 gamma))
/// numerically with a central difference at tightened quadrature tolerance.
CrlbBundle ncrlb_bundle(double gamma, std::size_t n, BoundMode mode, const QuadratureSpec& quad = {});

/// Normalized bound on delta = g(mu, sigma) for a gradient of g.
/// Throws std::invalid_argument for delta == 0.
double ncrlb_of_function(double delta, double grad_mu, double grad_sigma, const FisherInverse& fisher_inv);

/// d J(sqrt(8 gamma)) / d gamma by central difference with relative step 1e-5 * max(gamma, 1e-3).
double mi_slope(double gamma, const QuadratureSpec& quad = {});

}  // namespace ndasnr
