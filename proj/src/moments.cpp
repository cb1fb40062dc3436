#include "ndasnr/moments.hpp"

#include "ndasnr/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ndasnr {

MomentSummary sample_moments(std::span<const double> y) {
    if (y.empty()) {
        throw std::invalid_argument("sample_moments: empty block");
    }
    CompensatedSum s1, s2, s4, sa;
    for (double v : y) {
        const double v2 = v * v;
        s1.add(v);
        s2.add(v2);
        s4.add(v2 * v2);
        sa.add(std::abs(v));
    }
    const double inv_n = 1.0 / static_cast<double>(y.size());
    return {s1.value() * inv_n, s2.value() * inv_n, s4.value() * inv_n, sa.value() * inv_n, y.size()};
}

MomentSummary sample_moments(const SampleBlock& block) { return sample_moments(block.samples()); }

MomentSummary exact_moments(const ChannelParams& params) {
    const double mu = params.mu();
    const double sigma = params.sigma();
    const double mu2 = mu * mu;
    const double s2 = sigma * sigma;

    MomentSummary m;
    m.m1 = mu * (2.0 * params.prior_q() - 1.0);
    m.m2 = mu2 + s2;
    m.m4 = mu2 * mu2 + 6.0 * mu2 * s2 + 3.0 * s2 * s2;
    if (sigma == 0.0) {
        m.abs_moment = mu;
    } else {
        // mu - 2 mu Q(mu/sigma) = mu erf(mu / (sigma sqrt 2)).
        const double r = mu / sigma;
        m.abs_moment = mu * std::erf(r / std::numbers::sqrt2) +
                       sigma * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * r * r);
    }
    m.n = 0;
    return m;
}

}  // namespace ndasnr
