#pragma once

#include "minent/errors.hpp"
#include "minent/interval.hpp"

#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace minent {

enum class Smoothness { C0, C1, C2, Cinf };

const char* to_string(Smoothness s);

/// One analytic section of a piecewise warping function, stored as
/// phi(t) = exp(growth * t + log_scale) * m(t) together with the first two
/// derivatives of m. Keeping the exponential rate and overall scale symbolic
/// lets the log-derivative ratios phi'/phi and phi''/phi stay finite far
/// down a cusp, where the value itself underflows to zero.
struct ProfilePiece {
    Interval span;
    double growth = 0.0;
    double log_scale = 0.0;
    std::function<double(double)> m0, m1, m2;

    double value(double t) const;
    double d1(double t) const;
    double d2(double t) const;
    double log_d1(double t) const;   ///< phi'/phi
    double ratio_d2(double t) const; ///< phi''/phi
};

ProfilePiece exp_piece(Interval span, double coeff, double rate);
ProfilePiece const_piece(Interval span, double c);
/// Polynomial in (t - center), coefficients low order first.
ProfilePiece poly_piece(Interval span, std::vector<double> coeffs, double center);

/// Exact-tail tag: beyond `from` the profile is exactly coeff * exp(rate * t)
/// (rate = 0 for a constant plateau). Volume integrals over unbounded
/// intervals use this in closed form instead of truncating.
struct ProfileTail {
    enum class Kind { None, Exponential, Constant };
    Kind kind = Kind::None;
    double from = 0.0;
    double coeff = 0.0;
    double rate = 0.0;
};

/// A positive piecewise-C^2 scalar warping function on a closed interval.
///
/// Immutable after construction; evaluators are pure and safe for
/// unrestricted concurrent reads. Breakpoints are the interior piece
/// junctions, where smoothness may drop; evaluation there is one-sided.
/// The constructor validates positivity and junction matching consistent
/// with the declared smoothness tag (value for C0 and above, first
/// derivative for C1, second for C2; tolerance 1e-10 relative above 1).
class Profile {
public:
    /// `require_positive` is on for warping functions; derivative-level data
    /// handed to the corner regularizers may be sign-free.
    Profile(std::string name, std::vector<ProfilePiece> pieces, Smoothness smoothness,
            ProfileTail tail = {}, bool require_positive = true);

    const std::string& name() const;
    bool positive_required() const;
    const Interval& domain() const;
    const std::vector<double>& breakpoints() const;
    Smoothness smoothness() const;
    const ProfileTail& tail() const;
    const std::vector<ProfilePiece>& pieces() const;

    double value(double t, Side side = Side::Right) const;
    double d1(double t, Side side = Side::Right) const;
    double d2(double t, Side side = Side::Right) const;
    /// phi'(t) / phi(t), stable against exponential underflow.
    double log_d1(double t, Side side = Side::Right) const;
    /// phi''(t) / phi(t), stable against exponential underflow.
    double ratio_d2(double t, Side side = Side::Right) const;

    /// Pointwise scaling by lambda > 0.
    Profile scaled(double lambda) const;
    /// Pointwise scaling by exp(log_lambda), applied symbolically so the
    /// factor may be far below the underflow threshold.
    Profile log_scaled(double log_lambda) const;
    /// Time translation t -> t + dt (the new profile at t equals this one at t - dt).
    Profile shifted(double dt) const;
    /// Restriction to a subinterval of the domain.
    Profile restricted(Interval sub) const;

    /// Tabular text serialization: `# profile <name> domain <a> <b>` header,
    /// then `t,value,d1,d2` rows at n uniformly spaced samples.
    void write_table(std::ostream& os, int n_samples = 512) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    explicit Profile(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    static std::size_t piece_index(const Impl& impl, double t, Side side);
};

/// Achieved constants of a cusp-cap construction.
struct CapParameters {
    double delta = 0.0;
    double eps = 0.0;
    double eps_prime = 0.0;
    double t_delta = 0.0;
    double ell = 0.0;
    double ell_prime = 0.0;
};

struct CuspCap {
    Profile profile;
    CapParameters params;
};

struct CapOptions {
    double pad_left = 1.0;      ///< domain extends this far left of the splice window
    double pad_right = 1.0;     ///< domain extends this far right of the plateau start
    int max_shrink = 40;        ///< geometric shrink iterations for the splice widths
    int grid_per_unit = 10000;  ///< verification grid resolution
};

/// phi_0(t) = ell * exp(-t): the model cusp warping, -phi''/phi == -1.
Profile exp_profile(double ell, Interval domain = Interval(-40.0, 40.0));

/// phi_delta(t) = ell ((1+d)/(1+2d)) e^{-(1+2d)t} + ell (d/(1+2d)) e^{(1+2d)t},
/// the solution of phi'' = (1+2 delta)^2 phi with phi(0) = ell, phi'(0) = -ell.
Profile ode_profile(double ell, double delta, Interval domain = Interval(-6.0, 6.0));

/// Closed-form minimum location of ode_profile: ln(1 + 1/delta) / (2 (1 + 2 delta)).
double ode_min_location(double delta);
/// Closed-form minimum value: 2 ell sqrt(delta (1 + delta)) / (1 + 2 delta).
double ode_min_value(double ell, double delta);

/// C^1 regularization of a corner at t = 0: returns a profile equal to phi
/// outside (-eps, eps) whose derivative inside is sandwiched between
/// phi'(-eps) and phi'(eps), with |integral over the window| <= 2 M eps.
/// Requires a derivative jump upward at 0 and |phi(0)| <= M.
Profile c1_interpolate(const Profile& phi, double eps, double M);

struct FlattenResult {
    Profile profile;
    double shift; ///< the constant c added to phi on [eps, +inf)
};

/// C^2 regularization of a convex corner at t = 0 (second derivative jumps
/// upward): equal to phi for t <= -eps, equal to phi + c for t >= eps with
/// |c| <= 4 M eps, |result - phi| <= 4 M eps inside, and first/second
/// derivatives sandwiched between the window-endpoint values.
FlattenResult c2_flatten(const Profile& phi, double eps, double M);

/// The C^2 cusp cap: equals ell e^{-t} for t <= -eps, is constant ell' for
/// t >= t_delta + eps', is nonincreasing and convex, and satisfies
/// (phi'/phi)^2 < (1+2 delta)^2 and phi''/phi <= (1+2 delta)^2 everywhere.
/// ell' lands in [ell s/(1+2d), 4 ell s/(1+2d)] with s = sqrt(delta(1+delta)).
/// Splice widths start at min(delta/10, 0.01 t_delta) and shrink by halves
/// (at most max_shrink times) until the verification grid passes.
CuspCap cusp_cap_profile(double ell, double delta, const CapOptions& opts = {});

/// Smooth plateau function: 1 for t <= 0, 0 for t >= 1, strictly decreasing
/// between, all derivatives vanishing at the junctions.
double bump(double t);
double bump_d1(double t);
double bump_d2(double t);

struct BumpStats {
    double max_d2; ///< max of bump'' over (0, 1)
    double min_d2; ///< min of bump'' over (0, 1)
    long samples;  ///< grid resolution of the scan
};

/// Dense-grid extrema of bump''; computed once and cached.
const BumpStats& bump_stats();

} // namespace minent
