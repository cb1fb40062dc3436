#include "ndasnr/crlb.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ndasnr {

namespace {

void require_domain(double gamma, std::size_t n) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("bounds require a finite gamma > 0");
    }
    if (n < 1) {
        throw std::invalid_argument("bounds require n >= 1");
    }
}

// 2 - 2f - 8 gamma f; positive for every gamma > 0.
double deflation(double gamma, double f) {
    const double d = 2.0 - 2.0 * f - 8.0 * gamma * f;
    assert(d > 0.0);
    if (!(d > 0.0)) {
        throw std::domain_error("Fisher information is singular");
    }
    return d;
}

QuadratureSpec tightened(QuadratureSpec quad) {
    quad.abs_tol = std::min(quad.abs_tol, 1e-12);
    quad.rel_tol = std::min(quad.rel_tol, 1e-12);
    return quad;
}

}  // namespace

std::string_view to_string(BoundMode mode) noexcept { return mode == BoundMode::nda ? "nda" : "da"; }

FisherInverse fisher_inverse_with_f(double gamma, double sigma, std::size_t n, BoundMode mode, double f) {
    require_domain(gamma, n);
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("fisher_inverse: sigma must be positive");
    }
    if (mode == BoundMode::da) {
        f = 0.0;
    }
    const double d = deflation(gamma, f);
    const double scale = sigma * sigma / (static_cast<double>(n) * d);
    // The cross term is negative: mu and sigma trade off against each other for
    // a fixed second moment. This sign is the one that reproduces the closed-form
    // gamma and lambda bounds below.
    return {scale * (2.0 - 8.0 * gamma * f), -scale * std::sqrt(8.0 * gamma) * f, scale * (1.0 - f), mode};
}

FisherInverse fisher_inverse(double gamma, double sigma, std::size_t n, BoundMode mode, const QuadratureSpec& quad) {
    require_domain(gamma, n);
    const double f = mode == BoundMode::nda ? f_gamma(gamma, quad) : 0.0;
    return fisher_inverse_with_f(gamma, sigma, n, mode, f);
}

double ncrlb_of_function(double delta, double grad_mu, double grad_sigma, const FisherInverse& fi) {
    if (delta == 0.0 || !std::isfinite(delta)) {
        throw std::invalid_argument("ncrlb_of_function: delta must be finite and non-zero");
    }
    const double quad_form = grad_mu * grad_mu * fi.mu_mu + 2.0 * grad_mu * grad_sigma * fi.mu_sigma +
                             grad_sigma * grad_sigma * fi.sigma_sigma;
    return quad_form / (delta * delta);
}

double mi_slope(double gamma, const QuadratureSpec& quad) {
    const auto q = tightened(quad);
    const double h = 1e-5 * std::max(gamma, 1e-3);
    const double lo = std::max(gamma - h, 0.0);
    const double hi = gamma + h;
    return (j_function(std::sqrt(8.0 * hi), q) - j_function(std::sqrt(8.0 * lo), q)) / (hi - lo);
}

CrlbBundle ncrlb_bundle(double gamma, std::size_t n, BoundMode mode, const QuadratureSpec& quad) {
    require_domain(gamma, n);
    const double f = mode == BoundMode::nda ? f_gamma(gamma, quad) : 0.0;
    const double d = deflation(gamma, f);
    const double nn = static_cast<double>(n);

    CrlbBundle b{};
    b.gamma = gamma;
    b.n = n;
    b.mode = mode;
    b.ncrlb_mu = (1.0 - 4.0 * gamma * f) / (gamma * nn * d);
    b.ncrlb_sigma = (1.0 - f) / (nn * d);
    b.ncrlb_gamma = (4.0 + 4.0 * gamma - 4.0 * gamma * f) / (gamma * nn * d);
    b.ncrlb_lambda = (1.0 + 4.0 * gamma) / (gamma * nn * d);

    const double ber = q_function(std::sqrt(2.0 * gamma));
    b.ncrlb_ber = std::exp(-2.0 * gamma) / (std::numbers::pi * nn * ber * ber) * (1.0 + gamma - gamma * f) / d;

    const double mi = j_function(std::sqrt(8.0 * gamma), tightened(quad));
    const double slope = mi_slope(gamma, quad);
    b.ncrlb_mi = slope * slope * gamma * gamma * b.ncrlb_gamma / (mi * mi);
    return b;
}

}  // namespace ndasnr
