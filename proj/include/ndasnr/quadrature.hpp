#pragma once

#include <functional>
#include <stdexcept>

namespace ndasnr {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Globally adaptive 7/15-point Gauss-Kronrod integration of f over [a, b].
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below max(abs_tol, rel_tol * |I|). Throws QuadratureError
/// when max_intervals is reached first.
double integrate_gk15(const std::function<double(double)>& f, double a, double b, double abs_tol,
                      double rel_tol, int max_intervals);

}  // namespace detail
}  // namespace ndasnr
