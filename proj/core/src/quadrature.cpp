#include "minent/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace minent {

namespace {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1] (positive half).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0,
};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
};

struct Panel {
    double gk = 0.0;
    double err = 0.0;
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double gk = 0.0;
    double g = 0.0;
    for (int i = 0; i < 8; ++i) {
        double fsum;
        if (i == 7) {
            fsum = f(c);
        } else {
            fsum = f(c - h * kXgk[i]) + f(c + h * kXgk[i]);
        }
        gk += kWgk[i] * fsum;
        if (i % 2 == 1) g += kWg[i / 2] * fsum;
        else if (i == 7) g += kWg[3] * fsum;
    }
    Panel p;
    p.gk = gk * h;
    p.err = std::abs((gk - g) * h);
    return p;
}

QuadratureResult adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol, int depth) {
    Panel p = evaluate_panel(f, a, b);
    QuadratureResult r;
    r.evaluations = 15;
    const double scale = std::max(std::abs(p.gk), 1e-300);
    if (p.err <= std::max(abs_tol, rel_tol * scale) || depth <= 0 ||
        b - a < 1e-15 * (std::abs(a) + std::abs(b) + 1.0)) {
        r.value = p.gk;
        r.error_estimate = p.err;
        r.converged = depth > 0 || p.err <= std::max(abs_tol, rel_tol * scale);
        return r;
    }
    const double mid = 0.5 * (a + b);
    QuadratureResult left = adaptive(f, a, mid, rel_tol, abs_tol * 0.5, depth - 1);
    QuadratureResult right = adaptive(f, mid, b, rel_tol, abs_tol * 0.5, depth - 1);
    left += right;
    left.evaluations += r.evaluations;
    return left;
}

} // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, double abs_tol, int max_depth) {
    if (a == b) return {};
    if (a > b) {
        QuadratureResult r = integrate(f, b, a, rel_tol, abs_tol, max_depth);
        r.value = -r.value;
        return r;
    }
    return adaptive(f, a, b, rel_tol, abs_tol, max_depth);
}

QuadratureResult integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                     const std::vector<double>& breakpoints,
                                     double rel_tol, double abs_tol, int max_depth) {
    if (a == b) return {};
    if (a > b) {
        QuadratureResult r = integrate_piecewise(f, b, a, breakpoints, rel_tol, abs_tol, max_depth);
        r.value = -r.value;
        return r;
    }
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double t : breakpoints) {
        if (t > a && t < b) cuts.push_back(t);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    QuadratureResult total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] <= 0.0) continue;
        total += adaptive(f, cuts[i], cuts[i + 1], rel_tol, abs_tol / double(cuts.size()), max_depth);
    }
    return total;
}

} // namespace minent
