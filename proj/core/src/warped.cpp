#include "minent/warped.hpp"

#include "minent/csv.hpp"
#include "minent/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minent {

Interval DoubleWarpedMetric3D::common_domain() const {
    return eta_a.domain().clipped_to(eta_b.domain());
}

DoubleWarpedMetric3D make_double_warped(Profile eta_a, Profile eta_b, double base_area) {
    if (!(base_area > 0.0)) throw InvalidParameter("double warped metric: base_area must be positive");
    const Interval da = eta_a.domain();
    const Interval db = eta_b.domain();
    const double tol = 1e-12 * std::max({1.0, std::abs(da.lo), std::abs(da.hi)});
    if (std::abs(da.lo - db.lo) > tol || std::abs(da.hi - db.hi) > tol)
        throw InvalidParameter("double warped metric: profile domains must agree");
    return {std::move(eta_a), std::move(eta_b), base_area};
}

SectionalCurvatures sectional_curvatures_3d(const DoubleWarpedMetric3D& m, double t, Side side) {
    SectionalCurvatures s;
    const double la = m.eta_a.log_d1(t, side);
    const double lb = m.eta_b.log_d1(t, side);
    s.sigma_xy = -la * lb;
    s.sigma_xt = -m.eta_a.ratio_d2(t, side);
    s.sigma_yt = -m.eta_b.ratio_d2(t, side);
    return s;
}

double sectional_curvature_2d(const WarpedMetric2D& m, double t, Side side) {
    return -m.phi.ratio_d2(t, side);
}

namespace {

void fold(PlaneExtrema& e, double v, bool first) {
    if (first) {
        e.min = e.max = v;
    } else {
        e.min = std::min(e.min, v);
        e.max = std::max(e.max, v);
    }
}

} // namespace

CurvatureReport curvature_scan(const DoubleWarpedMetric3D& m, Interval window, long n_samples,
                               double bound_lo, double bound_hi, double tol) {
    if (n_samples < 2) throw InvalidParameter("curvature_scan: need at least 2 samples");
    CurvatureReport rep;
    rep.bound_lo = bound_lo;
    rep.bound_hi = bound_hi;

    std::vector<double> ts;
    ts.reserve(std::size_t(n_samples) + 16);
    for (long i = 0; i < n_samples; ++i)
        ts.push_back(window.lo + window.length() * double(i) / double(n_samples - 1));
    for (const auto* prof : {&m.eta_a, &m.eta_b})
        for (double b : prof->breakpoints())
            if (window.contains(b)) ts.push_back(b);
    std::sort(ts.begin(), ts.end());

    bool first = true;
    double worst_violation = -std::numeric_limits<double>::infinity();
    rep.verdict = true;
    for (double t : ts) {
        for (Side side : {Side::Left, Side::Right}) {
            const SectionalCurvatures s = sectional_curvatures_3d(m, t, side);
            fold(rep.xy, s.sigma_xy, first);
            fold(rep.xt, s.sigma_xt, first);
            fold(rep.yt, s.sigma_yt, first);
            first = false;
            for (double v : {s.sigma_xy, s.sigma_xt, s.sigma_yt}) {
                const double viol = std::max(bound_lo - tol - v, v - bound_hi - tol);
                if (viol > 0.0) rep.verdict = false;
                if (viol > worst_violation) {
                    worst_violation = viol;
                    rep.worst_t = t;
                    rep.worst_value = v;
                }
            }
            ++rep.samples;
        }
    }
    return rep;
}

CurvatureReport curvature_scan(const WarpedMetric2D& m, Interval window, long n_samples,
                               double bound_lo, double bound_hi, double tol) {
    DoubleWarpedMetric3D lifted{m.phi, Profile("one", {const_piece(m.phi.domain(), 1.0)},
                                               Smoothness::Cinf),
                                1.0};
    return curvature_scan(lifted, window, n_samples, bound_lo, bound_hi, tol);
}

void CurvatureReport::write_csv(std::ostream& os, const DoubleWarpedMetric3D& m, Interval window,
                                int n_rows) const {
    os << "t,sigma_xy,sigma_xt,sigma_yt\n";
    const int n = std::max(2, n_rows);
    for (int i = 0; i < n; ++i) {
        const double t = window.lo + window.length() * double(i) / double(n - 1);
        const SectionalCurvatures s = sectional_curvatures_3d(m, t);
        os << csv::num(t) << "," << csv::num(s.sigma_xy) << "," << csv::num(s.sigma_xt) << ","
           << csv::num(s.sigma_yt) << "\n";
    }
    os << "# verdict," << (verdict ? "pass" : "fail") << "," << csv::num(bound_lo) << ","
       << csv::num(bound_hi) << "," << csv::num(worst_t) << "," << csv::num(worst_value) << "\n";
}

namespace {

struct TailProduct {
    bool tagged = false;
    double from = 0.0;
    double coeff = 0.0;
    double rate = 0.0;
};

TailProduct combine_tails(const ProfileTail& a, const ProfileTail& b) {
    TailProduct p;
    if (a.kind == ProfileTail::Kind::None || b.kind == ProfileTail::Kind::None) return p;
    p.tagged = true;
    p.from = std::max(a.from, b.from);
    p.coeff = a.coeff * b.coeff;
    p.rate = a.rate + b.rate;
    return p;
}

VolumeResult warped_volume(const std::function<double(double)>& density,
                           const std::vector<double>& cuts, Interval domain, double factor,
                           TailProduct tail, double t0, double t1) {
    if (t1 < t0) throw InvalidParameter("cusp_volume: inverted interval");
    VolumeResult out;
    const bool unbounded = std::isinf(t1);
    const double finite_end = unbounded ? domain.hi : std::min(t1, domain.hi);
    if (!unbounded && t1 > domain.hi + 1e-12)
        throw OutOfRange("cusp_volume: t1 beyond the profile domain");
    if (t0 < domain.lo - 1e-12) throw OutOfRange("cusp_volume: t0 before the profile domain");

    double quad_to = finite_end;
    double closed = 0.0;
    if (unbounded) {
        if (tail.tagged) {
            quad_to = std::max(t0, std::min(tail.from, domain.hi));
            if (tail.rate < 0.0) {
                closed = factor * tail.coeff * std::exp(tail.rate * quad_to) / (-tail.rate);
            } else {
                // Constant (or growing) tails have infinite volume.
                out.volume = std::numeric_limits<double>::infinity();
                out.exact_tail = true;
                return out;
            }
        } else {
            // No tail tag: truncate at the domain end and report an estimate
            // of the discarded part from the local decay rate.
            quad_to = domain.hi;
            out.exact_tail = false;
        }
    }
    out.quadrature = integrate_piecewise(density, t0, quad_to, cuts, 1e-11);
    out.volume = factor * out.quadrature.value + closed;
    if (!out.exact_tail) {
        const double f_end = factor * density(domain.hi);
        // density ~ e^{r t} locally; usable only when decaying.
        const double h = 1e-6 * std::max(1.0, std::abs(domain.hi));
        const double f_prev = factor * density(domain.hi - h);
        const double r = (std::log(std::max(f_end, 1e-300)) - std::log(std::max(f_prev, 1e-300))) / h;
        out.truncation_bound =
            r < 0.0 ? f_end / (-r) : std::numeric_limits<double>::infinity();
    }
    return out;
}

} // namespace

VolumeResult cusp_volume(const DoubleWarpedMetric3D& m, double t0, double t1) {
    std::vector<double> cuts = m.eta_a.breakpoints();
    cuts.insert(cuts.end(), m.eta_b.breakpoints().begin(), m.eta_b.breakpoints().end());
    const Profile ea = m.eta_a;
    const Profile eb = m.eta_b;
    auto density = [ea, eb](double t) { return ea.value(t) * eb.value(t); };
    return warped_volume(density, cuts, m.common_domain(), m.base_area,
                         combine_tails(m.eta_a.tail(), m.eta_b.tail()), t0, t1);
}

VolumeResult cusp_volume(const WarpedMetric2D& m, double t0, double t1) {
    const Profile phi = m.phi;
    auto density = [phi](double t) { return phi.value(t); };
    TailProduct tail;
    if (phi.tail().kind != ProfileTail::Kind::None) {
        tail.tagged = true;
        tail.from = phi.tail().from;
        tail.coeff = phi.tail().coeff;
        tail.rate = phi.tail().rate;
    }
    return warped_volume(density, phi.breakpoints(), phi.domain(), m.circumference, tail, t0, t1);
}

} // namespace minent
