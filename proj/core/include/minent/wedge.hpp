#pragma once

#include "minent/errors.hpp"

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace minent {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

/// A model geometric leaf: Euclidean plane, hyperbolic plane (unit-disk
/// chart, curvature -1) or a metric segment [0, len] on the x axis. All are
/// uniquely geodesic; log/exp maps use chart coordinates, with tangent
/// vectors normalized so the leaf norm of log_x(z) equals d(x, z).
class Leaf {
public:
    enum class Kind { Euclidean, Hyperbolic, Segment };

    static Leaf euclidean();
    static Leaf hyperbolic();
    static Leaf segment(double len);

    Kind kind() const { return kind_; }
    double segment_length() const { return len_; }

    bool contains(Vec2 p) const;
    double distance(Vec2 a, Vec2 b) const;
    Vec2 geodesic(Vec2 a, Vec2 b, double t) const;
    Vec2 log_map(Vec2 base, Vec2 target) const;
    /// Exponential map; segment leaves clamp to their range (projected step).
    Vec2 exp_map(Vec2 base, Vec2 v) const;

private:
    Leaf(Kind k, double len) : kind_(k), len_(len) {}
    Kind kind_;
    double len_;
};

struct PointRef {
    int leaf = 0;
    Vec2 p;
};

struct PointedMeasure {
    struct Atom {
        PointRef point;
        double weight = 1.0;
    };
    std::vector<Atom> atoms;
    double total_mass() const;
};

/// One gluing point: a marked point in each incident leaf.
struct HubSpec {
    std::vector<std::pair<int, Vec2>> marks;
};

/// A finite tree of leaves glued at hub points, with the induced length
/// distance. The gluing graph (leaves and hubs as nodes, incidences as
/// edges) must be a tree, so the space is simply connected and CAT(0);
/// marked points within one leaf must be distinct. Immutable and safe for
/// concurrent reads after construction.
class WedgeSpace {
public:
    WedgeSpace(std::vector<Leaf> leaves, std::vector<HubSpec> hubs);

    int leaf_count() const;
    const Leaf& leaf(int i) const;
    int hub_count() const;
    /// A representative of hub h (in its first incident leaf).
    PointRef hub_ref(int h) const;

    void validate(const PointRef& p) const;

    double distance(PointRef a, PointRef b) const;
    /// Constant-speed geodesic through the hub tree; t in [0, 1].
    PointRef geodesic(PointRef a, PointRef b, double t) const;

    /// For x ranging in `leaf`, d(x, z) = d_leaf(x, entry) + offset.
    struct Projection {
        Vec2 entry;
        double offset = 0.0;
    };
    Projection project(int leaf, const PointRef& z) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

struct MedianIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Euclidean identity AM^2 + BM*CM = AB^2*CM/BC + AC^2*BM/BC for M on [B, C].
MedianIdentity euclid_median_identity(Vec2 A, Vec2 B, Vec2 C, Vec2 M);

/// CAT(0) comparison: with m = geodesic(b, c, t),
/// d(a,m)^2 + d(m,b) d(c,m) <= d(a,b)^2 d(c,m)/d(b,c) + d(a,c)^2 d(b,m)/d(b,c).
bool comparison_check(const WedgeSpace& X, PointRef a, PointRef b, PointRef c, double t,
                      double tol = 1e-9);

/// B_mu(x) = sum w_i d(x, z_i)^2.
double leibniz(const WedgeSpace& X, const PointedMeasure& mu, const PointRef& x);

struct BarycenterOptions {
    double tol = 1e-8;
    int max_rounds = 8;            ///< refinement rounds if the certificate misses
    int descent_iterations = 4000; ///< per-leaf gradient budget per round
    std::uint64_t seed = 20240913; ///< validation-sample stream
    int validation_samples = 1000;
    std::optional<PointRef> init;  ///< optional warm start
};

struct BarycenterResult {
    PointRef point;
    double value = 0.0;       ///< B_mu at the minimizer
    double certificate = 0.0; ///< max over samples of d(b,x)^2 mu(X) - (B(x)-B(b))
    int iterations = 0;
    bool converged = false;
};

/// Minimize the Leibniz function over the wedge: per-leaf smooth descent on
/// the hub-projected objective, hub and atom candidates, and the uniqueness
/// inequality d(b,x)^2 mu(X) <= B(x) - B(b) as the stopping certificate.
BarycenterResult barycenter(const WedgeSpace& X, const PointedMeasure& mu,
                            const BarycenterOptions& opts = {});

// Bundled fixtures.
WedgeSpace single_euclidean_fixture();
WedgeSpace single_hyperbolic_fixture();
/// Three segment legs glued at one hub (hub at coordinate 0 of each leg).
WedgeSpace tripod_fixture(double leg_length = 1.0);
/// Two Euclidean planes glued at their origins.
WedgeSpace two_planes_fixture();
/// Plane A - hub1 - plane B - hub2 - plane C, hubs 2 apart inside B.
WedgeSpace chain_fixture();

} // namespace minent
