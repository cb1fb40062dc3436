#include "ndasnr/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

namespace ndasnr::detail {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for nodes 1, 3, 5 and the centre.
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Panel& other) const noexcept { return error < other.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = kKronrod[7] * fc;
    double gauss = kGauss[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kNodes[i];
        const double pair = f(centre - dx) + f(centre + dx);
        kronrod += kKronrod[i] * pair;
        if (i % 2 == 1) {
            gauss += kGauss[i / 2] * pair;
        }
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

double integrate_gk15(const std::function<double(double)>& f, double a, double b, double abs_tol,
                      double rel_tol, int max_intervals) {
    std::priority_queue<Panel> panels;
    panels.push(gk15(f, a, b));
    double total = panels.top().value;
    double error = panels.top().error;
    int count = 1;
    while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (!std::isfinite(total) || !std::isfinite(error)) {
            throw QuadratureError("integrand produced a non-finite value");
        }
        if (count >= max_intervals) {
            throw QuadratureError("quadrature did not converge within " + std::to_string(max_intervals) +
                                  " subintervals (error estimate " + std::to_string(error) + ")");
        }
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = gk15(f, worst.a, mid);
        const Panel right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
    }
    // Re-sum in a fixed order to shed the drift of the running updates.
    std::vector<Panel> all;
    all.reserve(panels.size());
    while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
    double sum = 0.0;
    for (const auto& p : all) {
        sum += p.value;
    }
    return sum;
}

}  // namespace ndasnr::detail
