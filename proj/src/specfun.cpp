#include "ndasnr/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ndasnr {

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;
constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;  // 1/sqrt(2 pi)

// P2 polynomial coefficients, applied to 1/ratio^2, 1/ratio and 1.
constexpr double kP2a = -34.0516;
constexpr double kP2b = 65.9548;
constexpr double kP2c = -23.6184;

// log2(1 + e^-x) without overflow for either sign of x.
double log2_1p_exp_neg(double x) noexcept {
    if (x >= 0.0) {
        return std::log1p(std::exp(-x)) / std::numbers::ln2;
    }
    return (-x + std::log1p(std::exp(x))) / std::numbers::ln2;
}

HInverse invert_exact(double ratio) {
    const double cap_ratio = h_forward(kGammaCap, HForm::exact);
    if (ratio >= cap_ratio) {
        return {kGammaCap, true};
    }
    double lo = 0.0;
    double hi = kGammaCap;
    for (int iter = 0; iter < 2000; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (h_forward(mid, HForm::exact) < ratio) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {0.5 * (lo + hi), false};
}

HInverse invert_approx(double ratio, const HConstants& h) {
    if (!h.admissible()) {
        throw std::invalid_argument("h constants must satisfy h1 > 0, h2 > 0, h3 < 0");
    }
    const double base = std::pow((1.0 - ratio) / (1.0 - kTwoOverPi), 1.0 / h.h3);
    const double gamma = std::pow((base - 1.0) / h.h1, 1.0 / h.h2);
    if (!(gamma < kGammaCap)) {
        return {kGammaCap, true};
    }
    return {gamma, false};
}

HInverse invert_p2(double ratio) {
    if (ratio == 0.0) {
        throw std::domain_error("P2 inverse is undefined for A^2/M2 = 0");
    }
    const double inv = 1.0 / ratio;
    const double exponent_db = kP2a * inv * inv + kP2b * inv + kP2c;
    return {0.5 * std::pow(10.0, exponent_db / 10.0), false};
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw std::invalid_argument("quadrature tolerances must be positive");
    }
    if (!(f_radius > 0.0) || !std::isfinite(f_radius) || !(j_sigmas > 0.0) || !std::isfinite(j_sigmas)) {
        throw std::invalid_argument("quadrature truncation radius must be finite and positive");
    }
    if (max_intervals < 1) {
        throw std::invalid_argument("quadrature needs at least one interval");
    }
}

double q_function(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double f_gamma(double gamma, const QuadratureSpec& quad) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("f_gamma: gamma must be finite and non-negative");
    }
    quad.validate();
    // The integrand is even in beta. With s = sqrt(2 gamma) and e^-gamma pulled
    // out, e^(-beta^2/2) / cosh(beta s) = 2 e^(-beta^2/2 - beta s) / (1 + e^(-2 beta s)).
    const double s = std::sqrt(2.0 * gamma);
    const auto integrand = [s](double beta) {
        const double e = std::exp(-0.5 * beta * beta - beta * s);
        return 4.0 * kInvSqrt2Pi * beta * beta * e / (1.0 + std::exp(-2.0 * beta * s));
    };
    const double integral =
        detail::integrate_gk15(integrand, 0.0, quad.f_radius, quad.abs_tol, quad.rel_tol, quad.max_intervals);
    return std::exp(-gamma) * integral;
}

double j_function(double alpha, const QuadratureSpec& quad) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("j_function: alpha must be finite and non-negative");
    }
    quad.validate();
    if (alpha == 0.0) {
        return 0.0;
    }
    // beta = alpha^2/2 + alpha t maps the LLR density onto a standard normal in t.
    const double mean = 0.5 * alpha * alpha;
    const auto integrand = [mean, alpha](double t) {
        return kInvSqrt2Pi * std::exp(-0.5 * t * t) * log2_1p_exp_neg(mean + alpha * t);
    };
    const double loss = detail::integrate_gk15(integrand, -quad.j_sigmas, quad.j_sigmas, quad.abs_tol,
                                               quad.rel_tol, quad.max_intervals);
    return 1.0 - loss;
}

double h_forward(double gamma, HForm form, const HConstants& h) {
    if (!(gamma >= 0.0)) {
        throw std::invalid_argument("h_forward: gamma must be non-negative");
    }
    if (std::isinf(gamma)) {
        return 1.0;
    }
    if (form == HForm::approx) {
        return 1.0 - (1.0 - kTwoOverPi) * std::pow(h.h1 * std::pow(gamma, h.h2) + 1.0, h.h3);
    }
    // With sigma = 1 and mu = s = sqrt(2 gamma): A = s (1 - 2 Q(s)) + sqrt(2/pi) e^-gamma
    // and M2 = 1 + 2 gamma. 1 - 2 Q(s) = erf(s / sqrt 2) avoids cancellation near 0.
    const double s = std::sqrt(2.0 * gamma);
    const double a = s * std::erf(s / std::numbers::sqrt2) + std::sqrt(kTwoOverPi) * std::exp(-gamma);
    return a * a / (1.0 + 2.0 * gamma);
}

HInverse h_inverse(double ratio, HInverseMethod method, const HConstants& h) {
    if (!std::isfinite(ratio)) {
        throw std::invalid_argument("h_inverse: ratio must be finite");
    }
    if (method == HInverseMethod::p2) {
        return invert_p2(ratio);
    }
    if (ratio <= kTwoOverPi) {
        return {0.0, true};
    }
    if (ratio >= 1.0) {
        return {kGammaCap, true};
    }
    return method == HInverseMethod::numeric_exact ? invert_exact(ratio) : invert_approx(ratio, h);
}

}  // namespace ndasnr
