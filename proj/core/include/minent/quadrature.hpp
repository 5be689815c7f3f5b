#pragma once

#include <functional>
#include <vector>

namespace minent {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    bool converged = true;

    QuadratureResult& operator+=(const QuadratureResult& o) {
        value += o.value;
        error_estimate += o.error_estimate;
        evaluations += o.evaluations;
        converged = converged && o.converged;
        return *this;
    }
};

/// Adaptive Gauss-Kronrod (G7/K15) bisection on [a, b].
/// Accepts a panel when the embedded error estimate is below
/// max(abs_tol, rel_tol * |panel value|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-11, double abs_tol = 0.0, int max_depth = 52);

/// Same, but the interval is pre-split at the given breakpoints. Integrands
/// built from piecewise profiles are only piecewise smooth; splitting at the
/// junctions keeps the panel error estimates honest.
QuadratureResult integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                     const std::vector<double>& breakpoints,
                                     double rel_tol = 1e-11, double abs_tol = 0.0,
                                     int max_depth = 52);

} // namespace minent
