#pragma once

#include "ndasnr/model.hpp"

#include <cmath>
#include <cstddef>
#include <span>

namespace ndasnr {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// First, second and fourth moments plus the absolute moment A = E|Y|.
/// n == 0 marks values computed analytically from channel parameters.
struct MomentSummary {
    double m1 = 0.0;
    double m2 = 0.0;
    double m4 = 0.0;
    double abs_moment = 0.0;
    std::size_t n = 0;

    /// A^2 / M2, taken as 0 for an all-zero block.
    double abs_ratio() const noexcept { return m2 > 0.0 ? abs_moment * abs_moment / m2 : 0.0; }
};

/// Sample averages of y, y^2, y^4 and |y| in one compensated pass.
/// Throws std::invalid_argument for an empty span.
MomentSummary sample_moments(std::span<const double> y);
MomentSummary sample_moments(const SampleBlock& block);

/// Closed-form moments of Y = mu X + sigma W.
MomentSummary exact_moments(const ChannelParams& params);

}  // namespace ndasnr
