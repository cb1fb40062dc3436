#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace ndasnr {

/// True state of a BPSK/AWGN channel, y = mu * x + sigma * w.
///
/// Only (mu, sigma, prior_q) are stored. SNR and the channel reliability
/// constant are derived on every read, so the three can never disagree.
/// A noiseless channel (sigma == 0) is representable for test fixtures; the
/// derived quantities that divide by sigma^2 throw std::domain_error for it.
class ChannelParams {
public:
    /// Throws std::invalid_argument unless mu >= 0, sigma >= 0 and prior_q in [0, 1].
    ChannelParams(double mu, double sigma, double prior_q = 0.5);

    double mu() const noexcept { return mu_; }
    double sigma() const noexcept { return sigma_; }
    double prior_q() const noexcept { return prior_q_; }

    /// gamma = mu^2 / (2 sigma^2), i.e. Es/N0.
    double gamma() const;
    double gamma_db() const;
    /// lambda = 2 mu / sigma^2.
    double lambda() const;

    /// Es = mu^2 and N0 = 2 sigma^2.
    double es() const noexcept { return mu_ * mu_; }
    double n0() const noexcept { return 2.0 * sigma_ * sigma_; }

    /// Second moment mu^2 + sigma^2 of the observable.
    double m2() const noexcept { return mu_ * mu_ + sigma_ * sigma_; }

    friend bool operator==(const ChannelParams&, const ChannelParams&) = default;

private:
    double mu_;
    double sigma_;
    double prior_q_;
};

struct AmplitudeNoise {
    double mu;
    double sigma;
};

struct LinearSnr {
    double gamma;
    double m2_scale = 1.0;
};

struct DecibelSnr {
    double gamma_db;
    double m2_scale = 1.0;
};

using ParamSpec = std::variant<AmplitudeNoise, LinearSnr, DecibelSnr>;

/// Builds channel parameters from any of the supported parameterizations.
/// An SNR spec fixes the absolute scale through m2_scale = mu^2 + sigma^2.
/// Throws std::invalid_argument for sigma <= 0, mu < 0, gamma < 0,
/// m2_scale <= 0 or prior_q outside [0, 1].
ChannelParams params_from(const ParamSpec& spec, double prior_q = 0.5);

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;

/// N observables plus how they were produced.
class SampleBlock {
public:
    /// Throws std::invalid_argument if samples is empty or holds a non-finite value.
    explicit SampleBlock(std::vector<double> samples, std::uint64_t seed = 0,
                         std::optional<ChannelParams> truth = std::nullopt);

    std::span<const double> samples() const noexcept { return samples_; }
    std::size_t n() const noexcept { return samples_.size(); }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::optional<ChannelParams>& truth() const noexcept { return truth_; }

private:
    std::vector<double> samples_;
    std::uint64_t seed_;
    std::optional<ChannelParams> truth_;
};

/// Draws y_k = mu x_k + sigma w_k with P(x_k = +1) = prior_q and w_k ~ N(0, 1).
///
/// Sample k is a function of (seed, k) alone: one Philox block keyed by the
/// seed with counter k supplies the symbol uniform and 64 bits for the noise,
/// which is produced by inverse-CDF transform. Output is therefore identical
/// across runs and thread schedules. Throws std::invalid_argument for n == 0.
SampleBlock generate_block(const ChannelParams& params, std::size_t n, std::uint64_t seed);

/// Same draw as generate_block, written into an existing buffer.
void generate_samples(const ChannelParams& params, std::uint64_t seed, std::span<double> out);

}  // namespace ndasnr
