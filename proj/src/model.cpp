#include "ndasnr/model.hpp"

#include "ndasnr/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ndasnr {

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw std::invalid_argument(what);
    }
}

void require_probability(double q) {
    require(q >= 0.0 && q <= 1.0, "prior_q must lie in [0, 1]");
}

ChannelParams from_gamma(double gamma, double m2_scale, double prior_q) {
    require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be finite and non-negative");
    require(std::isfinite(m2_scale) && m2_scale > 0.0, "m2_scale must be positive");
    // mu^2 = 2 gamma sigma^2 and mu^2 + sigma^2 = m2_scale.
    const double sigma = std::sqrt(m2_scale / (1.0 + 2.0 * gamma));
    const double mu = std::sqrt(2.0 * gamma) * sigma;
    return ChannelParams(mu, sigma, prior_q);
}

}  // namespace

ChannelParams::ChannelParams(double mu, double sigma, double prior_q)
    : mu_(mu), sigma_(sigma), prior_q_(prior_q) {
    require(std::isfinite(mu) && mu >= 0.0, "mu must be finite and non-negative");
    require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be finite and non-negative");
    require_probability(prior_q);
}

double ChannelParams::gamma() const {
    if (sigma_ == 0.0) {
        throw std::domain_error("gamma is undefined for a noiseless channel");
    }
    return mu_ * mu_ / (2.0 * sigma_ * sigma_);
}

double ChannelParams::gamma_db() const { return linear_to_db(gamma()); }

double ChannelParams::lambda() const {
    if (sigma_ == 0.0) {
        throw std::domain_error("lambda is undefined for a noiseless channel");
    }
    return 2.0 * mu_ / (sigma_ * sigma_);
}

ChannelParams params_from(const ParamSpec& spec, double prior_q) {
    require_probability(prior_q);
    return std::visit(
        [prior_q](const auto& s) -> ChannelParams {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, AmplitudeNoise>) {
                require(std::isfinite(s.sigma) && s.sigma > 0.0, "sigma must be positive");
                require(std::isfinite(s.mu) && s.mu >= 0.0, "mu must be non-negative");
                return ChannelParams(s.mu, s.sigma, prior_q);
            } else if constexpr (std::is_same_v<T, LinearSnr>) {
                return from_gamma(s.gamma, s.m2_scale, prior_q);
            } else {
                require(std::isfinite(s.gamma_db), "gamma_db must be finite");
                return from_gamma(db_to_linear(s.gamma_db), s.m2_scale, prior_q);
            }
        },
        spec);
}

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) noexcept { return 10.0 * std::log10(linear); }

SampleBlock::SampleBlock(std::vector<double> samples, std::uint64_t seed,
                         std::optional<ChannelParams> truth)
    : samples_(std::move(samples)), seed_(seed), truth_(std::move(truth)) {
    require(!samples_.empty(), "sample block must hold at least one observable");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!std::isfinite(samples_[i])) {
            throw std::invalid_argument("non-finite observable at index " + std::to_string(i));
        }
    }
}

void generate_samples(const ChannelParams& params, std::uint64_t seed, std::span<double> out) {
    const auto key = philox_key(seed);
    const double mu = params.mu();
    const double sigma = params.sigma();
    const double q = params.prior_q();
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto k64 = static_cast<std::uint64_t>(k);
        const auto r = Philox4x32::block(
            {static_cast<std::uint32_t>(k64), static_cast<std::uint32_t>(k64 >> 32), 0u, 0u}, key);
        const double x = uniform_open01(r[0]) < q ? 1.0 : -1.0;
        const std::uint64_t noise_bits = (static_cast<std::uint64_t>(r[1]) << 32) | r[2];
        const double w = standard_normal_quantile(uniform_open01(noise_bits));
        out[k] = mu * x + sigma * w;
    }
}

SampleBlock generate_block(const ChannelParams& params, std::size_t n, std::uint64_t seed) {
    require(n >= 1, "n must be at least 1");
    std::vector<double> y(n);
    generate_samples(params, seed, y);
    return SampleBlock(std::move(y), seed, params);
}

}  // namespace ndasnr
