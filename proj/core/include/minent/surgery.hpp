#pragma once

#include "minent/profile.hpp"
#include "minent/warped.hpp"

#include <utility>
#include <vector>

namespace minent {

// ---------------------------------------------------------------------------
// Boundary compatibility arithmetic

/// Scalar products of the fiber class f and a section class d_i on one
/// boundary torus: (sigma_i(f,f), sigma_i(d_i,f)).
struct BoundaryProducts {
    double fiber_fiber = 0.0;
    double section_fiber = 0.0;
};

struct SeifertFibrationData {
    int genus = 0;
    int boundary_count = 0;
    std::vector<std::pair<int, int>> exceptional; ///< coprime (p_i, q_i), p_i >= 2
    std::vector<BoundaryProducts> boundary_products;
};

/// Boundary metrics extend to a nonpositively curved metric on the fibration
/// iff all fiber norms agree and sum_i sigma_i(d_i, f) = -(sum_j q_j/p_j) |f|^2.
/// Both identities are checked to 1e-12 relative.
bool leeb_compatibility(const SeifertFibrationData& data);

/// Euler number sum q_i / p_i of the exceptional fibers.
double seifert_euler_number(const SeifertFibrationData& data);

/// chi(|O|) - sum_i (1 - 1/p_i) for an orbifold with cone points of the given
/// orders. Nonnegative genus means an orientable underlying surface
/// (chi = 2 - 2g - b); negative genus means |g| crosscaps (chi = 2 + g - b).
double orbifold_euler(int genus, int boundary_count, const std::vector<int>& cone_orders);

// ---------------------------------------------------------------------------
// Seifert cusp capping

struct SeifertCapResult {
    WarpedMetric2D metric;     ///< m_r e^{-t} down the cusp, capped to a flat collar
    CapParameters cap;         ///< constants of the cap actually attached
    double T_delta = 0.0;      ///< 1 / delta for the requested delta
    double T_attach = 0.0;     ///< attachment time 1 / cap.delta (>= T_delta)
    double zeta_achieved = 0.0;///< terminal circumference / m_r
    double zeta_bar = 0.0;     ///< admissible ceiling at the requested delta
    double cap_region_volume = 0.0;
    double cap_region_bound = 0.0; ///< m_r e^{-(1/d - 1)} (t_d + 1) at the attached d
};

/// Half the terminal-ratio ceiling: the largest zeta accepted at this delta.
double seifert_zeta_bar(double m_r, double delta);

/// Cap the 2D cusp m_r^2 e^{-2t} dx^2 + dt^2 so the terminal circumference
/// equals zeta * m_r (root-finding tolerance 1e-8 absolute) while the
/// curvature stays in [-(1+2 delta)^2, 0]. The cusp is left hyperbolic on
/// [0, 1/delta - eps]. Unreachable zeta raises NoSolution with the range.
SeifertCapResult seifert_cusp_cap(double m_r, double delta, double zeta);

// ---------------------------------------------------------------------------
// Conformal-type change on a 3D cusp

struct TorusCuspSpec {
    double a = 1.0;          ///< h-metric diagonal coefficient on dx^2
    double b = 1.0;          ///< h-metric diagonal coefficient on dy^2
    double zeta2 = 0.5;      ///< rescale, must give zeta2*a < 1 and zeta2*b < 1
    double base_area = 1.0;  ///< coordinate area of the torus section
};

struct ConformalMetric {
    DoubleWarpedMetric3D metric;
    double delta = 0.0;
    double T_delta = 0.0; ///< C / delta
    double C = 0.0;
    double zeta2 = 0.0;
    double zeta2a = 0.0;
    double zeta2b = 0.0;
    double bump_max_d2 = 0.0;
    double bump_min_d2 = 0.0;
    double band_area_max = 0.0; ///< grid max of the cross-section shape area on the band
    double v1_bound = 0.0;      ///< band_area_max * e^{-T}(1 - e^{-T})/2
};

/// Interpolate the cusp metric e^{-2t}(dx^2+dy^2) + dt^2 toward
/// e^{-2t} zeta^2 h + dt^2 across [T, 2T] with T = C/delta, where C is the
/// smallest constant that keeps every sectional curvature in [-1-delta, -1].
ConformalMetric conformal_change(const TorusCuspSpec& spec, double delta);

// ---------------------------------------------------------------------------
// Flattening the tail of a conformally-changed cusp

struct FlattenedMetric {
    DoubleWarpedMetric3D metric;
    CapParameters cap;          ///< unit-scale cap constants
    double T_delta = 0.0;
    double collar_start = 0.0;  ///< the metric is flat from here to the boundary
    double log_boundary_a = 0.0;///< log of the terminal eta_a value
    double log_boundary_b = 0.0;
    // Closed-form budget for |Vol(modified) - Vol(model cusp)|:
    double v1_bound = 0.0;
    double v2_bound = 0.0;
    double cap_bound = 0.0;
    double hyp_tail_bound = 0.0;
    double total_bound() const { return v1_bound + v2_bound + cap_bound + hyp_tail_bound; }
    // Tail volumes past T_delta, for precision-preserving convergence checks:
    double tail_volume_modified = 0.0; ///< quadrature of the modified metric on [T, end]
    double tail_volume_model = 0.0;    ///< base_area e^{-2T}/2, the model cusp on [T, inf)
    double volume_delta() const;       ///< |modified - model|
};

/// Replace the exact-exponential tail beyond 5T/2 with a capped profile so
/// the metric becomes flat in a terminal collar, with curvature pinched in
/// [-(1+2 delta)^2, 0] globally.
FlattenedMetric hyperbolic_flatten(const ConformalMetric& cm, double delta);

// ---------------------------------------------------------------------------
// Connected-sum tube

struct TubeSpec {
    double L = 1.0;         ///< half-length of the product middle
    double r = 0.1;         ///< sphere radius, at most 2/(3 pi)
    double rho_left = 0.1;  ///< round scale of the left end cross-section
    double rho_right = 0.1; ///< round scale of the right end cross-section
    int dim = 3;            ///< ambient dimension n; the tube is S^{n-1} x I
};

struct TubeMetric {
    Profile f;                ///< sphere scale over [-L-r, L+r]
    int dim = 3;
    double mid_diameter = 0.0;      ///< pi r
    double volume = 0.0;            ///< omega_{n-1} Int f^{n-1} dt
    double volume_bound = 0.0;      ///< A 2r + omega_{n-1} r^{n-1} (2L + 2r)
    double max_end_area = 0.0;      ///< A
    bool totally_geodesic_mid = false;
};

/// The tube f(t)^2 can_{S^{n-1}} + dt^2: round of radius r on
/// [-L-r/3, L+r/3], blended to the end scales across the outer r/3 collars
/// by the bump schedule.
TubeMetric tube_metric(const TubeSpec& spec);

/// Area of the unit (n-1)-sphere.
double unit_sphere_area(int n_minus_1);

} // namespace minent
