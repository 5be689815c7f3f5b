#include "minent/surgery.hpp"

#include "minent/csv.hpp"
#include "minent/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace minent {

namespace {

bool rel_equal(double x, double y, double tol = 1e-12) {
    return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
}

} // namespace

// ---------------------------------------------------------------------------
// Compatibility arithmetic

double seifert_euler_number(const SeifertFibrationData& data) {
    double e = 0.0;
    for (const auto& [p, q] : data.exceptional) {
        if (p < 2) throw InvalidParameter("seifert data: exceptional p must be >= 2");
        if (std::gcd(p, q) != 1) throw InvalidParameter("seifert data: (p, q) must be coprime");
        e += double(q) / double(p);
    }
    return e;
}

bool leeb_compatibility(const SeifertFibrationData& data) {
    if (data.boundary_products.empty())
        throw InvalidParameter("leeb_compatibility: no boundary tori (closed case unsupported)");
    if (data.boundary_count != int(data.boundary_products.size()))
        throw InvalidParameter("leeb_compatibility: products must be supplied for every boundary torus");
    const double e = seifert_euler_number(data);

    const double f2 = data.boundary_products.front().fiber_fiber;
    for (const auto& bp : data.boundary_products) {
        if (!rel_equal(bp.fiber_fiber, f2)) return false;
    }
    double sum_df = 0.0;
    for (const auto& bp : data.boundary_products) sum_df += bp.section_fiber;
    return rel_equal(sum_df, -e * f2);
}

double orbifold_euler(int genus, int boundary_count, const std::vector<int>& cone_orders) {
    if (boundary_count < 0) throw InvalidParameter("orbifold_euler: negative boundary count");
    const double chi_surface =
        genus >= 0 ? 2.0 - 2.0 * genus - boundary_count : 2.0 + genus - boundary_count;
    double cones = 0.0;
    for (int p : cone_orders) {
        if (p < 2) throw InvalidParameter("orbifold_euler: cone orders must be >= 2");
        cones += 1.0 - 1.0 / double(p);
    }
    return chi_surface - cones;
}

// ---------------------------------------------------------------------------
// Seifert cusp capping

namespace {

// Terminal value of the unit cap at parameter d, attached at T = 1/d:
// the terminal circumference per unit m_r.
double terminal_ratio(double d) {
    const CuspCap cap = cusp_cap_profile(1.0, d);
    return std::exp(-1.0 / d) * cap.params.ell_prime;
}

constexpr double kSeifertDeltaFloor = 1.0 / 600.0; // keeps e^{-T} in double range

} // namespace

double seifert_zeta_bar(double m_r, double delta) {
    if (!(m_r > 0.0)) throw InvalidParameter("seifert_cusp_cap: m_r must be positive");
    if (!(delta > 0.0 && delta <= 0.5))
        throw InvalidParameter("seifert_cusp_cap: delta must lie in (0, 1/2]");
    return 0.5 * terminal_ratio(delta);
}

SeifertCapResult seifert_cusp_cap(double m_r, double delta, double zeta) {
    const double zeta_bar = seifert_zeta_bar(m_r, delta);
    if (!(zeta > 0.0)) throw InvalidParameter("seifert_cusp_cap: zeta must be positive");
    if (zeta > zeta_bar) {
        std::ostringstream msg;
        msg << "seifert_cusp_cap: zeta=" << zeta << " unreachable at delta=" << delta
            << "; achievable range is (0, " << zeta_bar << "]";
        throw NoSolution(msg.str(), 0.0, zeta_bar);
    }

    // ratio(d) = e^{-1/d} ell'(d) is strictly increasing in d, so bisect.
    double hi = delta;
    double lo = delta;
    double r_lo;
    do {
        lo *= 0.5;
        if (lo < kSeifertDeltaFloor) {
            std::ostringstream msg;
            msg << "seifert_cusp_cap: zeta=" << zeta << " below the representable range (0, "
                << zeta_bar << "]";
            throw NoSolution(msg.str(), terminal_ratio(kSeifertDeltaFloor) / 1.0, zeta_bar);
        }
        r_lo = terminal_ratio(lo);
    } while (r_lo > zeta);

    double d = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        d = 0.5 * (lo + hi);
        const double r = terminal_ratio(d);
        if (std::abs(m_r * (r - zeta)) <= 0.5e-8) break;
        if (r > zeta)
            hi = d;
        else
            lo = d;
        if (hi - lo < 1e-15 * d) break;
    }

    const double T = 1.0 / d;
    const CuspCap unit = cusp_cap_profile(1.0, d);
    const double eps = unit.params.eps;
    const double t_d = unit.params.t_delta;

    Profile capped = unit.profile.shifted(T).log_scaled(std::log(m_r) - T);
    Profile cap_part = capped.restricted(Interval(T - eps, T + t_d + unit.params.eps_prime + 1.0));

    std::vector<ProfilePiece> pieces;
    pieces.push_back(exp_piece(Interval(0.0, T - eps), m_r, -1.0));
    for (const auto& p : cap_part.pieces()) pieces.push_back(p);

    ProfileTail tail = cap_part.tail();
    Profile profile("seifert_cap(" + csv::num(m_r) + "," + csv::num(delta) + ")",
                    std::move(pieces), Smoothness::C2, tail);

    SeifertCapResult out{.metric = WarpedMetric2D{profile, 1.0},
                         .cap = unit.params,
                         .T_delta = 1.0 / delta,
                         .T_attach = T,
                         .zeta_achieved = 0.0,
                         .zeta_bar = zeta_bar,
                         .cap_region_volume = 0.0,
                         .cap_region_bound = 0.0};
    out.cap.ell = m_r * std::exp(-T);
    out.cap.ell_prime = m_r * std::exp(-T) * unit.params.ell_prime;
    out.zeta_achieved = std::exp(-T) * unit.params.ell_prime;
    out.cap_region_volume =
        cusp_volume(out.metric, T - eps, profile.domain().hi).volume;
    out.cap_region_bound = m_r * std::exp(-(1.0 / d - 1.0)) * (t_d + 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Conformal change

namespace {

Profile conformal_eta(double z, double T, double t_end, const std::string& name) {
    std::vector<ProfilePiece> pieces;
    pieces.push_back(exp_piece(Interval(0.0, T), 1.0, -1.0));

    ProfilePiece band;
    band.span = Interval(T, 2.0 * T);
    band.growth = -1.0;
    band.m0 = [z, T](double t) {
        const double u = (t - T) / T;
        return bump(u) + (1.0 - bump(u)) * z;
    };
    band.m1 = [z, T](double t) {
        const double u = (t - T) / T;
        return bump_d1(u) * (1.0 - z) / T;
    };
    band.m2 = [z, T](double t) {
        const double u = (t - T) / T;
        return bump_d2(u) * (1.0 - z) / (T * T);
    };
    pieces.push_back(std::move(band));
    pieces.push_back(exp_piece(Interval(2.0 * T, t_end), z, -1.0));

    ProfileTail tail;
    tail.kind = ProfileTail::Kind::Exponential;
    tail.from = 2.0 * T;
    tail.coeff = z;
    tail.rate = -1.0;
    return Profile(name, std::move(pieces), Smoothness::Cinf, tail);
}

} // namespace

ConformalMetric conformal_change(const TorusCuspSpec& spec, double delta) {
    if (!(spec.a > 0.0 && spec.b > 0.0))
        throw InvalidParameter("conformal_change: h coefficients must be positive");
    if (!(spec.zeta2 > 0.0)) throw InvalidParameter("conformal_change: zeta2 must be positive");
    if (!(spec.base_area > 0.0))
        throw InvalidParameter("conformal_change: base_area must be positive");
    if (!(delta > 0.0 && delta < 1.0))
        throw InvalidParameter("conformal_change: delta must lie in (0, 1)");
    const double za = spec.zeta2 * spec.a;
    const double zb = spec.zeta2 * spec.b;
    if (!(za < 1.0 && zb < 1.0))
        throw InvalidParameter("conformal_change: zeta2*a and zeta2*b must be < 1");

    const BumpStats& bs = bump_stats();
    const double C = std::max({4.0 * (1.0 - za) / za, 4.0 * (1.0 - zb) / zb,
                               (bs.max_d2 + 4.0) / za, (bs.max_d2 + 4.0) / zb,
                               std::sqrt(-bs.min_d2 / 4.0)});
    const double T = C / delta;
    const double t_end = 4.0 * T;

    ConformalMetric out{.metric = make_double_warped(conformal_eta(za, T, t_end, "eta_a"),
                                                     conformal_eta(zb, T, t_end, "eta_b"),
                                                     spec.base_area)};
    out.delta = delta;
    out.T_delta = T;
    out.C = C;
    out.zeta2 = spec.zeta2;
    out.zeta2a = za;
    out.zeta2b = zb;
    out.bump_max_d2 = bs.max_d2;
    out.bump_min_d2 = bs.min_d2;

    double area_max = 0.0;
    const long n = 100000;
    for (long i = 0; i <= n; ++i) {
        const double u = double(i) / double(n);
        const double ma = bump(u) + (1.0 - bump(u)) * za;
        const double mb = bump(u) + (1.0 - bump(u)) * zb;
        area_max = std::max(area_max, ma * mb);
    }
    out.band_area_max = spec.base_area * area_max;
    out.v1_bound = out.band_area_max * std::exp(-T) * 0.5 * (1.0 - std::exp(-T));
    return out;
}

// ---------------------------------------------------------------------------
// Flattening

double FlattenedMetric::volume_delta() const {
    return std::abs(tail_volume_modified - tail_volume_model);
}

FlattenedMetric hyperbolic_flatten(const ConformalMetric& cm, double delta) {
    if (!(delta > 0.0 && delta <= 0.5))
        throw InvalidParameter("hyperbolic_flatten: delta must lie in (0, 1/2]");
    const double T = cm.T_delta;
    for (const Profile* eta : {&cm.metric.eta_a, &cm.metric.eta_b}) {
        const ProfileTail& tail = eta->tail();
        if (tail.kind != ProfileTail::Kind::Exponential || tail.rate != -1.0 ||
            tail.from > 2.0 * T + 1e-9)
            throw PreconditionError(
                "hyperbolic_flatten: the metric must have an exact exponential tail beyond 2T");
    }

    CapOptions opts;
    opts.pad_left = 1.0;
    opts.pad_right = std::max(1.0, ode_min_location(delta) + 0.1);
    const CuspCap unit = cusp_cap_profile(1.0, delta, opts);
    const double t_d = unit.params.t_delta;
    const double end = 3.0 * T + 2.0 * t_d;
    const double seam = 3.0 * T - 1.0;

    auto flatten_eta = [&](const Profile& eta, double z, const std::string& name) {
        Profile capped = unit.profile.shifted(3.0 * T).log_scaled(std::log(z) - 3.0 * T);
        Profile cap_part = capped.restricted(Interval(seam, end));
        Profile left = eta.restricted(Interval(eta.domain().lo, seam));
        std::vector<ProfilePiece> pieces = left.pieces();
        for (const auto& p : cap_part.pieces()) pieces.push_back(p);
        return Profile(name, std::move(pieces), Smoothness::C2, cap_part.tail());
    };

    FlattenedMetric out{.metric = make_double_warped(flatten_eta(cm.metric.eta_a, cm.zeta2a, "flat_a"),
                                                     flatten_eta(cm.metric.eta_b, cm.zeta2b, "flat_b"),
                                                     cm.metric.base_area),
                        .cap = unit.params};
    out.T_delta = T;
    out.collar_start = 3.0 * T + t_d + unit.params.eps_prime;
    out.log_boundary_a = std::log(cm.zeta2a) - 3.0 * T + std::log(unit.params.ell_prime);
    out.log_boundary_b = std::log(cm.zeta2b) - 3.0 * T + std::log(unit.params.ell_prime);

    const double A0 = cm.metric.base_area;
    const double v_max = cm.zeta2a * cm.zeta2b * A0;
    out.v1_bound = cm.v1_bound;
    out.v2_bound = v_max * std::exp(-4.0 * T) * 0.5;
    out.cap_bound = v_max * std::exp(-5.0 * T) * (0.5 * T + 2.0 * t_d);
    out.hyp_tail_bound = A0 * std::exp(-4.0 * T) * 0.5;
    out.tail_volume_modified = cusp_volume(out.metric, T, end).volume;
    out.tail_volume_model = A0 * std::exp(-2.0 * T) * 0.5;
    return out;
}

// ---------------------------------------------------------------------------
// Connected-sum tube

double unit_sphere_area(int n_minus_1) {
    if (n_minus_1 < 1) throw InvalidParameter("unit_sphere_area: dimension must be >= 1");
    const double n = double(n_minus_1 + 1);
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

TubeMetric tube_metric(const TubeSpec& spec) {
    const double r_max = 2.0 / (3.0 * std::numbers::pi);
    if (!(spec.r > 0.0) || spec.r > r_max + 1e-15)
        throw InvalidParameter("tube_metric: r must lie in (0, 2/(3 pi)]");
    if (!(spec.L > 0.0)) throw InvalidParameter("tube_metric: L must be positive");
    if (!(spec.rho_left > 0.0 && spec.rho_right > 0.0))
        throw InvalidParameter("tube_metric: end scales must be positive");
    if (spec.dim < 2) throw InvalidParameter("tube_metric: dimension must be >= 2");

    const double L = spec.L;
    const double r = spec.r;
    const double c = 2.0 * r / 3.0; // collar width

    auto blend = [r](double rho, double w) { return rho * bump(w) + r * (1.0 - bump(w)); };

    ProfilePiece left;
    left.span = Interval(-L - r, -L - r / 3.0);
    const double rho_l = spec.rho_left;
    left.m0 = [rho_l, r, c, L, blend](double t) { return blend(rho_l, (t + L + r) / c); };
    left.m1 = [rho_l, r, c, L](double t) {
        return (rho_l - r) * bump_d1((t + L + r) / c) / c;
    };
    left.m2 = [rho_l, r, c, L](double t) {
        return (rho_l - r) * bump_d2((t + L + r) / c) / (c * c);
    };

    ProfilePiece right;
    right.span = Interval(L + r / 3.0, L + r);
    const double rho_r = spec.rho_right;
    right.m0 = [rho_r, r, c, L, blend](double t) { return blend(rho_r, (L + r - t) / c); };
    right.m1 = [rho_r, r, c, L](double t) {
        return -(rho_r - r) * bump_d1((L + r - t) / c) / c;
    };
    right.m2 = [rho_r, r, c, L](double t) {
        return (rho_r - r) * bump_d2((L + r - t) / c) / (c * c);
    };

    std::vector<ProfilePiece> pieces;
    pieces.push_back(std::move(left));
    pieces.push_back(const_piece(Interval(-L - r / 3.0, L + r / 3.0), r));
    pieces.push_back(std::move(right));

    TubeMetric out{.f = Profile("tube(L=" + csv::num(L) + ",r=" + csv::num(r) + ")",
                                std::move(pieces), Smoothness::Cinf)};
    out.dim = spec.dim;
    out.mid_diameter = std::numbers::pi * r;

    const int k = spec.dim - 1;
    const double omega = unit_sphere_area(k);
    const Profile f = out.f;
    auto density = [f, k](double t) { return std::pow(f.value(t), k); };
    out.volume = omega * integrate_piecewise(density, -L - r, L + r, f.breakpoints(), 1e-11).value;

    const double rho_max = std::max(spec.rho_left, spec.rho_right);
    out.max_end_area = omega * std::pow(rho_max, k);
    out.volume_bound = out.max_end_area * 2.0 * r + omega * std::pow(r, k) * (2.0 * L + 2.0 * r);

    out.totally_geodesic_mid = true;
    for (int i = 0; i <= 2000; ++i) {
        const double t = -L + 2.0 * L * double(i) / 2000.0;
        if (std::abs(out.f.d1(t)) > 1e-12) out.totally_geodesic_mid = false;
    }
    return out;
}

} // namespace minent
