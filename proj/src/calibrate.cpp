#include "ndasnr/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ndasnr {

namespace {

constexpr double kPenalty = 1e6;

using Point = std::vector<double>;

double safe_eval(const Objective& f, const Point& x) {
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

// a + t (b - a)
Point lerp(const Point& a, const Point& b, double t) {
    Point out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + t * (b[i] - a[i]);
    }
    return out;
}

}  // namespace

void SimplexOptions::validate(std::size_t dimension) const {
    if (dimension == 0) {
        throw std::invalid_argument("nelder_mead: empty start point");
    }
    if (max_evals < static_cast<int>(dimension) + 1) {
        throw std::invalid_argument("nelder_mead: budget must cover the initial simplex");
    }
    if (!(reflection > 0.0) || !(expansion > 1.0) || !(expansion > reflection) || !(contraction > 0.0) ||
        !(contraction < 1.0) || !(shrink > 0.0) || !(shrink < 1.0)) {
        throw std::invalid_argument("nelder_mead: inadmissible simplex coefficients");
    }
    if (!(x_tol >= 0.0) || !(f_tol >= 0.0)) {
        throw std::invalid_argument("nelder_mead: tolerances must be non-negative");
    }
}

namespace {

// One simplex descent from x0 (already evaluated as f0). Spends at most
// `budget` new evaluations, which must cover the d initial vertices.
SimplexResult descend(const Objective& objective, const Point& x0, double f0, const SimplexOptions& opts,
                      int budget) {
    const std::size_t d = x0.size();
    std::vector<Point> verts;
    std::vector<double> vals;
    verts.reserve(d + 1);
    vals.reserve(d + 1);
    verts.push_back(x0);
    vals.push_back(f0);
    for (std::size_t i = 0; i < d; ++i) {
        Point v = x0;
        v[i] = v[i] != 0.0 ? 1.05 * v[i] : 0.00025;
        vals.push_back(safe_eval(objective, v));
        verts.push_back(std::move(v));
    }
    int evals = static_cast<int>(d);
    bool converged = false;

    std::vector<std::size_t> order(d + 1);
    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        {
            std::vector<Point> v2;
            std::vector<double> f2;
            v2.reserve(d + 1);
            f2.reserve(d + 1);
            for (std::size_t i : order) {
                v2.push_back(std::move(verts[i]));
                f2.push_back(vals[i]);
            }
            verts = std::move(v2);
            vals = std::move(f2);
        }

        double diameter = 0.0;
        for (std::size_t i = 1; i <= d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                diameter = std::max(diameter, std::abs(verts[i][j] - verts[0][j]));
            }
        }
        const double spread = vals[d] - vals[0];
        if (diameter <= opts.x_tol ||
            spread <= opts.f_tol * std::abs(vals[0]) + std::numeric_limits<double>::min()) {
            converged = true;
            break;
        }
        if (evals >= budget) {
            break;
        }

        Point centroid(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                centroid[j] += verts[i][j];
            }
        }
        for (double& c : centroid) {
            c /= static_cast<double>(d);
        }

        const Point& worst = verts[d];
        Point xr = lerp(centroid, worst, -opts.reflection);
        const double fr = safe_eval(objective, xr);
        ++evals;

        if (fr < vals[0]) {
            if (evals < budget) {
                Point xe = lerp(centroid, xr, opts.expansion);
                const double fe = safe_eval(objective, xe);
                ++evals;
                if (fe < fr) {
                    verts[d] = std::move(xe);
                    vals[d] = fe;
                    continue;
                }
            }
            verts[d] = std::move(xr);
            vals[d] = fr;
            continue;
        }
        if (fr < vals[d - 1]) {
            verts[d] = std::move(xr);
            vals[d] = fr;
            continue;
        }
        if (evals >= budget) {
            break;
        }

        bool accepted = false;
        if (fr < vals[d]) {
            Point xc = lerp(centroid, xr, opts.contraction);
            const double fc = safe_eval(objective, xc);
            ++evals;
            if (fc <= fr) {
                verts[d] = std::move(xc);
                vals[d] = fc;
                accepted = true;
            }
        } else {
            Point xc = lerp(centroid, worst, opts.contraction);
            const double fc = safe_eval(objective, xc);
            ++evals;
            if (fc < vals[d]) {
                verts[d] = std::move(xc);
                vals[d] = fc;
                accepted = true;
            }
        }
        if (accepted) {
            continue;
        }

        // Shrink towards the best vertex.
        for (std::size_t i = 1; i <= d; ++i) {
            if (evals >= budget) {
                break;
            }
            verts[i] = lerp(verts[0], verts[i], opts.shrink);
            vals[i] = safe_eval(objective, verts[i]);
            ++evals;
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    return {verts[best], vals[best], evals, converged};
}

}  // namespace

SimplexResult nelder_mead(const Objective& objective, std::vector<double> x0, const SimplexOptions& opts) {
    const std::size_t d = x0.size();
    opts.validate(d);
    const double f0 = safe_eval(objective, x0);
    if (!std::isfinite(f0)) {
        throw std::invalid_argument("nelder_mead: objective is not finite at the start point");
    }
    int evals = 1;
    SimplexResult result{x0, f0, evals, false};
    // A simplex can collapse onto tied vertices that straddle the minimum, so
    // restart from each reported minimum until a restart no longer improves it.
    while (opts.max_evals - evals >= static_cast<int>(d)) {
        const auto run = descend(objective, result.x, result.f, opts, opts.max_evals - evals);
        evals += run.evals;
        const bool improved = run.f < result.f;
        if (improved) {
            result.x = run.x;
            result.f = run.f;
        }
        result.converged = run.converged;
        if (!improved || !run.converged) {
            break;
        }
    }
    result.evals = evals;
    return result;
}

FitGrid FitGrid::log_spaced(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi >= lo) || count == 0) {
        throw std::invalid_argument("FitGrid::log_spaced: need 0 < lo <= hi and count >= 1");
    }
    FitGrid g;
    g.gamma_points.reserve(count);
    if (count == 1) {
        g.gamma_points.push_back(lo);
        return g;
    }
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        g.gamma_points.push_back(std::pow(10.0, a + t * (b - a)));
    }
    return g;
}

FitGrid FitGrid::standard() { return log_spaced(1e-2, 1e2, 200); }

void FitGrid::validate() const {
    if (gamma_points.empty()) {
        throw std::invalid_argument("fit grid is empty");
    }
    for (std::size_t i = 0; i < gamma_points.size(); ++i) {
        if (!(gamma_points[i] > 0.0) || !std::isfinite(gamma_points[i])) {
            throw std::invalid_argument("fit grid points must be finite and positive");
        }
        if (i > 0 && !(gamma_points[i] > gamma_points[i - 1])) {
            throw std::invalid_argument("fit grid must be strictly increasing");
        }
    }
}

double h_fit_mse(const FitGrid& grid, const HConstants& h) {
    double sum = 0.0;
    for (double g : grid.gamma_points) {
        const double r = h_forward(g, HForm::exact) - h_forward(g, HForm::approx, h);
        sum += r * r;
    }
    return sum / static_cast<double>(grid.gamma_points.size());
}

HFit fit_h_constants(const FitGrid& grid, const SimplexOptions& opts) {
    grid.validate();
    // The exact curve does not depend on the constants; tabulate it once.
    std::vector<double> target;
    target.reserve(grid.gamma_points.size());
    for (double g : grid.gamma_points) {
        target.push_back(h_forward(g, HForm::exact));
    }
    const auto objective = [&](std::span<const double> x) {
        const HConstants h{x[0], x[1], x[2]};
        if (!h.admissible()) {
            return kPenalty;
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < target.size(); ++i) {
            const double r = target[i] - h_forward(grid.gamma_points[i], HForm::approx, h);
            sum += r * r;
        }
        return sum / static_cast<double>(target.size());
    };

    const auto& p = kPublishedHConstants;
    const auto res = nelder_mead(objective, {p.h1, p.h2, p.h3}, opts);

    HFit fit{};
    fit.constants = {res.x[0], res.x[1], res.x[2]};
    fit.mse = res.f;
    fit.reference_mse = objective(std::vector<double>{p.h1, p.h2, p.h3});
    fit.evals = res.evals;
    fit.converged = res.converged;
    fit.underdetermined = grid.gamma_points.size() < 3;
    return fit;
}

}  // namespace ndasnr
