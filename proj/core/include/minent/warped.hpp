#pragma once

#include "minent/profile.hpp"
#include "minent/quadrature.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <string>

namespace minent {

/// Surface of revolution type metric phi(t)^2 dx^2 + dt^2 on S^1 x I.
/// `circumference` is the coordinate length of the circle factor, so the
/// physical circumference at time t is phi(t) * circumference.
struct WarpedMetric2D {
    Profile phi;
    double circumference = 1.0;
};

/// Double-warped metric eta_a(t)^2 dx^2 + eta_b(t)^2 dy^2 + dt^2 on T^2 x I.
/// `base_area` is the coordinate area of the torus cross-section.
struct DoubleWarpedMetric3D {
    Profile eta_a;
    Profile eta_b;
    double base_area = 1.0;

    Interval common_domain() const;
};

DoubleWarpedMetric3D make_double_warped(Profile eta_a, Profile eta_b, double base_area);

struct SectionalCurvatures {
    double sigma_xy = 0.0;
    double sigma_xt = 0.0;
    double sigma_yt = 0.0;
};

/// sigma_xy = -eta_a' eta_b' / (eta_a eta_b), sigma_xt = -eta_a''/eta_a,
/// sigma_yt = -eta_b''/eta_b. One-sided limits at breakpoints.
SectionalCurvatures sectional_curvatures_3d(const DoubleWarpedMetric3D& m, double t,
                                            Side side = Side::Right);

/// sigma = -phi''/phi for phi^2 dx^2 + dt^2.
double sectional_curvature_2d(const WarpedMetric2D& m, double t, Side side = Side::Right);

struct PlaneExtrema {
    double min = 0.0;
    double max = 0.0;
};

/// Exhaustive grid curvature report with one-sided limits at breakpoints.
struct CurvatureReport {
    PlaneExtrema xy, xt, yt;
    bool verdict = false;
    double bound_lo = 0.0;
    double bound_hi = 0.0;
    double worst_t = 0.0;    ///< sample where the worst violation (or margin) occurs
    double worst_value = 0.0;
    long samples = 0;

    /// CSV rows `t,sigma_xy,sigma_xt,sigma_yt` plus a footer verdict line.
    void write_csv(std::ostream& os, const DoubleWarpedMetric3D& m, Interval window,
                   int n_rows) const;
};

CurvatureReport curvature_scan(const DoubleWarpedMetric3D& m, Interval window, long n_samples,
                               double bound_lo, double bound_hi, double tol = 1e-9);

/// 2D scan: equivalent to scanning (phi, const 1) as a double warping, so the
/// single curvature lands in the xt plane and the other planes are flat.
CurvatureReport curvature_scan(const WarpedMetric2D& m, Interval window, long n_samples,
                               double bound_lo, double bound_hi, double tol = 1e-9);

struct VolumeResult {
    double volume = 0.0;
    double truncation_bound = 0.0; ///< bound on the discarded tail, 0 when exact
    bool exact_tail = true;        ///< tail handled in closed form (or no tail)
    QuadratureResult quadrature;
};

/// Volume of the 3D metric over [t0, t1]: base_area * Int eta_a eta_b dt.
/// t1 may be +infinity when the profile tails are tagged exponential or
/// constant past t0 (closed form); otherwise the integral is truncated at the
/// profile domain and the discarded part is estimated.
VolumeResult cusp_volume(const DoubleWarpedMetric3D& m, double t0, double t1);

/// Volume of the 2D metric over [t0, t1]: circumference * Int phi dt.
VolumeResult cusp_volume(const WarpedMetric2D& m, double t0, double t1);

} // namespace minent
