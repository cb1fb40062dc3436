#pragma once

#include "ndasnr/model.hpp"
#include "ndasnr/moments.hpp"
#include "ndasnr/specfun.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ndasnr {

/// The five non-data-aided SNR estimators.
enum class Method {
    cm,  ///< conventional method, A^2 / (2 (M2 - A^2))
    ml,  ///< iterative maximum likelihood (EM) started from A
    mm,  ///< method of moments on M2 and M4
    p2,  ///< second-order polynomial inverse of A^2 / M2
    am,  ///< closed-form inverse of the fitted h
};

inline constexpr Method kAllMethods[] = {Method::cm, Method::ml, Method::mm, Method::p2, Method::am};

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

/// Raised when an estimator cannot produce a value; carries the method tag.
class EstimatorError : public std::runtime_error {
public:
    EstimatorError(Method method, const std::string& what)
        : std::runtime_error(std::string(to_string(method)) + ": " + what), method_(method) {}
    Method method() const noexcept { return method_; }

private:
    Method method_;
};

struct EstimatorOptions {
    int max_iter = 10;      ///< ML iteration budget K
    double ml_tol = 1e-9;   ///< early exit when |mu_{k+1} - mu_k| < ml_tol * sqrt(M2)
    HConstants h = kPublishedHConstants;
};

struct SnrEstimate {
    Method method;
    double gamma_hat;        ///< linear SNR, finite and >= 0 except for P2 on odd input
    bool clamped = false;    ///< a zero floor or kGammaCap was applied
    int iterations_used = 0; ///< ML only
};

/// Amplitude estimates visited by the ML/EM iteration, starting at A.
struct MlTrajectory {
    std::vector<double> mu_hats;
    bool converged = false;
    double final_delta = 0.0;
};

/// Runs mu_{k+1} = mean(y tanh(mu_k y / (M2 - mu_k^2))) from mu_0 = A.
/// Every iterate is held at or below (1 - 1e-9) sqrt(M2) so the denominator stays positive.
MlTrajectory ml_trajectory(std::span<const double> y, const MomentSummary& moments,
                           const EstimatorOptions& opts = {});

/// gamma = mu^2 / (2 (M2 - mu^2)) with the shared cap; used by CM and ML.
SnrEstimate snr_from_amplitude(Method method, double mu_hat, double m2);

/// Estimates gamma from precomputed moments (ML also needs the samples).
SnrEstimate estimate_snr(std::span<const double> y, const MomentSummary& moments, Method method,
                         const EstimatorOptions& opts = {});
SnrEstimate estimate_snr(const SampleBlock& block, Method method, const EstimatorOptions& opts = {});

/// Estimates that need only moments. Throws std::invalid_argument for Method::ml.
SnrEstimate estimate_from_moments(const MomentSummary& moments, Method method,
                                  const EstimatorOptions& opts = {});

struct LogLikelihood {
    double value;
    double grad_mu;
    double grad_sigma;
};

/// Joint log-density of the block under (mu, sigma) and its two partial derivatives.
/// Throws std::invalid_argument for sigma <= 0.
LogLikelihood log_likelihood(std::span<const double> y, double mu, double sigma);

struct DerivedParams {
    double mu_hat;
    double sigma_hat;
    double lambda_hat;
    double q_hat;
    bool q_clamped = false;    ///< raw q estimate fell outside [0, 1]
    bool q_undefined = false;  ///< gamma_hat == 0; q_hat reported as 0.5
};

/// Splits M2 into signal and noise power for a given SNR estimate and
/// recovers lambda and the symbol prior from M1.
/// Throws std::invalid_argument for m2 <= 0 or gamma_hat < 0.
DerivedParams derive_params(double gamma_hat, double m1, double m2);

struct SymbolMetrics {
    double llr;
    double inst_ber;
    double inst_mi;
};

/// Per-symbol LLR, error probability and mutual information for reliability lambda_hat.
SymbolMetrics symbol_metrics(double lambda_hat, double y) noexcept;

struct ChannelMetrics {
    double avg_ber;
    double avg_mi;
};

/// Average BER Q(sqrt(2 gamma)) and mutual information J(sqrt(8 gamma)).
ChannelMetrics channel_metrics(double gamma, const QuadratureSpec& quad = {});

}  // namespace ndasnr
