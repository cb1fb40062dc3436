#pragma once

#include "ndasnr/specfun.hpp"

#include <functional>
#include <span>
#include <vector>

namespace ndasnr {

struct SimplexOptions {
    int max_evals = 10000;
    double x_tol = 1e-9;  ///< stop once every vertex lies within x_tol of the best (max-norm)
    double f_tol = 1e-9;  ///< ... or once f_worst - f_best <= f_tol * (|f_best| + tiny)
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;

    /// Throws std::invalid_argument for coefficients outside the usual ranges
    /// or a budget smaller than dimension + 1.
    void validate(std::size_t dimension) const;
};

struct SimplexResult {
    std::vector<double> x;
    double f;
    int evals;
    bool converged;  ///< false when the evaluation budget ran out first
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead downhill simplex. The initial simplex steps 5% along each
/// axis (0.00025 for zero coordinates). Deterministic for a given objective,
/// start point and options. Throws std::invalid_argument when the objective
/// is not finite at x0.
SimplexResult nelder_mead(const Objective& objective, std::vector<double> x0, const SimplexOptions& opts = {});

/// Abscissae of the h fit.
struct FitGrid {
    std::vector<double> gamma_points;

    /// count points log-spaced over [lo, hi] (linear SNR).
    static FitGrid log_spaced(double lo, double hi, std::size_t count);
    /// 200 points over [1e-2, 1e2].
    static FitGrid standard();

    /// Throws std::invalid_argument unless nonempty, positive and strictly increasing.
    void validate() const;
};

struct HFit {
    HConstants constants;
    double mse;            ///< fitted mean squared error on the grid
    double reference_mse;  ///< same objective at the published constants
    int evals;
    bool converged;
    bool underdetermined;  ///< fewer grid points than unknowns; constants are not unique
};

/// Mean over the grid of (h_exact - h_approx)^2.
double h_fit_mse(const FitGrid& grid, const HConstants& h);

/// Refits (h1, h2, h3) by Nelder-Mead starting from the published constants.
/// Inadmissible constants are penalized by +1e6.
HFit fit_h_constants(const FitGrid& grid, const SimplexOptions& opts = {});

}  // namespace ndasnr
