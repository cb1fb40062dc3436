#include "ndasnr/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ndasnr {

namespace {

constexpr double kMlGuard = 1.0 - 1e-9;
constexpr double kCmRatioLimit = 1.0 - 1e-12;

// log cosh(x) = |x| + log1p(e^{-2|x|}) - ln 2, finite for any finite x.
double log_cosh(double x) noexcept {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

SnrEstimate cm_estimate(const MomentSummary& m) {
    if (m.m2 <= 0.0) {
        return {Method::cm, 0.0, true, 0};
    }
    const double a2 = m.abs_moment * m.abs_moment;
    if (a2 >= m.m2 * kCmRatioLimit) {
        return {Method::cm, kGammaCap, true, 0};
    }
    const double g = a2 / (2.0 * (m.m2 - a2));
    if (!(g < kGammaCap)) {
        return {Method::cm, kGammaCap, true, 0};
    }
    return {Method::cm, g, false, 0};
}

SnrEstimate mm_estimate(const MomentSummary& m) {
    const double radicand = 6.0 * m.m2 * m.m2 - 2.0 * m.m4;
    if (m.m2 <= 0.0 || radicand < 0.0) {
        return {Method::mm, 0.0, true, 0};
    }
    const double root = std::sqrt(radicand);
    const double denom = 4.0 * m.m2 - 2.0 * root;
    // denom >= 0 in exact arithmetic with equality only for constant |y|.
    if (denom <= 0.0) {
        return {Method::mm, kGammaCap, true, 0};
    }
    const double g = root / denom;
    if (!(g < kGammaCap)) {
        return {Method::mm, kGammaCap, true, 0};
    }
    return {Method::mm, g, false, 0};
}

SnrEstimate ratio_estimate(const MomentSummary& m, Method method, const EstimatorOptions& opts) {
    const double ratio = m.abs_ratio();
    try {
        const auto inv = h_inverse(ratio, method == Method::p2 ? HInverseMethod::p2 : HInverseMethod::am_approx,
                                   opts.h);
        return {method, inv.gamma, inv.clamped, 0};
    } catch (const std::domain_error& e) {
        throw EstimatorError(method, e.what());
    } catch (const std::invalid_argument& e) {
        throw EstimatorError(method, e.what());
    }
}

}  // namespace

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::cm: return "cm";
        case Method::ml: return "ml";
        case Method::mm: return "mm";
        case Method::p2: return "p2";
        case Method::am: return "am";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
    for (Method m : kAllMethods) {
        if (to_string(m) == name) {
            return m;
        }
    }
    return std::nullopt;
}

MlTrajectory ml_trajectory(std::span<const double> y, const MomentSummary& moments, const EstimatorOptions& opts) {
    MlTrajectory traj;
    const double m2 = moments.m2;
    if (m2 <= 0.0) {
        traj.mu_hats.push_back(0.0);
        traj.converged = true;
        return traj;
    }
    const double root_m2 = std::sqrt(m2);
    const double ceiling = kMlGuard * root_m2;
    const double inv_n = 1.0 / static_cast<double>(y.size());

    double mu = std::min(moments.abs_moment, ceiling);
    traj.mu_hats.reserve(static_cast<std::size_t>(std::max(opts.max_iter, 0)) + 1);
    traj.mu_hats.push_back(mu);
    for (int k = 0; k < opts.max_iter; ++k) {
        const double scale = mu / (m2 - mu * mu);
        CompensatedSum acc;
        for (double v : y) {
            acc.add(v * std::tanh(scale * v));
        }
        const double next = std::min(acc.value() * inv_n, ceiling);
        traj.final_delta = std::abs(next - mu);
        mu = next;
        traj.mu_hats.push_back(mu);
        if (traj.final_delta < opts.ml_tol * root_m2) {
            traj.converged = true;
            break;
        }
    }
    return traj;
}

SnrEstimate snr_from_amplitude(Method method, double mu_hat, double m2) {
    if (m2 <= 0.0) {
        return {method, 0.0, true, 0};
    }
    const double mu2 = mu_hat * mu_hat;
    const double noise = m2 - mu2;
    if (noise <= 0.0) {
        return {method, kGammaCap, true, 0};
    }
    const double g = mu2 / (2.0 * noise);
    if (!(g < kGammaCap)) {
        return {method, kGammaCap, true, 0};
    }
    return {method, g, false, 0};
}

SnrEstimate estimate_from_moments(const MomentSummary& moments, Method method, const EstimatorOptions& opts) {
    switch (method) {
        case Method::cm: return cm_estimate(moments);
        case Method::mm: return mm_estimate(moments);
        case Method::p2:
        case Method::am: return ratio_estimate(moments, method, opts);
        case Method::ml: break;
    }
    throw std::invalid_argument("the ML estimator needs the samples, not only moments");
}

SnrEstimate estimate_snr(std::span<const double> y, const MomentSummary& moments, Method method,
                         const EstimatorOptions& opts) {
    if (y.empty()) {
        throw std::invalid_argument("estimate_snr: empty block");
    }
    if (method != Method::ml) {
        return estimate_from_moments(moments, method, opts);
    }
    const auto traj = ml_trajectory(y, moments, opts);
    auto est = snr_from_amplitude(Method::ml, traj.mu_hats.back(), moments.m2);
    est.iterations_used = static_cast<int>(traj.mu_hats.size()) - 1;
    return est;
}

SnrEstimate estimate_snr(const SampleBlock& block, Method method, const EstimatorOptions& opts) {
    return estimate_snr(block.samples(), sample_moments(block), method, opts);
}

LogLikelihood log_likelihood(std::span<const double> y, double mu, double sigma) {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("log_likelihood: sigma must be positive");
    }
    const double n = static_cast<double>(y.size());
    const double s2 = sigma * sigma;
    const double scale = mu / s2;
    CompensatedSum sum_y2, sum_logcosh, sum_ytanh;
    for (double v : y) {
        sum_y2.add(v * v);
        sum_logcosh.add(log_cosh(scale * v));
        sum_ytanh.add(v * std::tanh(scale * v));
    }
    const double y2 = sum_y2.value();
    const double yt = sum_ytanh.value();

    LogLikelihood ll;
    ll.value = -0.5 * n * std::log(2.0 * std::numbers::pi * s2) - n * mu * mu / (2.0 * s2) - y2 / (2.0 * s2) +
               sum_logcosh.value();
    ll.grad_mu = (yt - n * mu) / s2;
    ll.grad_sigma = (n * (mu * mu - s2) + y2 - 2.0 * mu * yt) / (s2 * sigma);
    return ll;
}

DerivedParams derive_params(double gamma_hat, double m1, double m2) {
    if (!(m2 > 0.0)) {
        throw std::invalid_argument("derive_params: m2 must be positive");
    }
    if (!(gamma_hat >= 0.0) || !std::isfinite(gamma_hat)) {
        throw std::invalid_argument("derive_params: gamma_hat must be finite and non-negative");
    }
    DerivedParams d{};
    const double denom = 1.0 + 2.0 * gamma_hat;
    d.mu_hat = std::sqrt(2.0 * gamma_hat * m2 / denom);
    d.sigma_hat = std::sqrt(m2 / denom);
    d.lambda_hat = std::sqrt((8.0 * gamma_hat + 16.0 * gamma_hat * gamma_hat) / m2);
    if (gamma_hat == 0.0) {
        d.q_hat = 0.5;
        d.q_undefined = true;
        return d;
    }
    const double q = 0.5 * m1 * std::sqrt(denom / (2.0 * gamma_hat * m2)) + 0.5;
    d.q_hat = std::clamp(q, 0.0, 1.0);
    d.q_clamped = d.q_hat != q;
    return d;
}

SymbolMetrics symbol_metrics(double lambda_hat, double y) noexcept {
    SymbolMetrics s;
    s.llr = lambda_hat * y;
    const double x = s.llr;
    const double e_abs = std::exp(-std::abs(x));
    s.inst_ber = e_abs / (1.0 + e_abs);
    // 2 log2(1 + e^-x) / (1 + e^-x), rewritten per sign so no exponential overflows.
    double loss;
    if (x >= 0.0) {
        const double e = std::exp(-x);
        loss = 2.0 * std::log1p(e) / std::numbers::ln2 / (1.0 + e);
    } else {
        const double e = std::exp(x);
        // (-x) e^x -> 0; skip the product once e underflows so -inf * 0 never happens
        loss = e == 0.0 ? 0.0 : 2.0 * (-x + std::log1p(e)) / std::numbers::ln2 * (e / (1.0 + e));
    }
    s.inst_mi = 1.0 - loss;
    return s;
}

ChannelMetrics channel_metrics(double gamma, const QuadratureSpec& quad) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("channel_metrics: gamma must be finite and non-negative");
    }
    return {q_function(std::sqrt(2.0 * gamma)), j_function(std::sqrt(8.0 * gamma), quad)};
}

}  // namespace ndasnr
