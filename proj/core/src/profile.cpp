#include "minent/profile.hpp"

#include "minent/csv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace minent {

namespace {

double guarded(double x) { return std::isfinite(x) ? x : 0.0; }

} // namespace

const char* to_string(Smoothness s) {
    switch (s) {
        case Smoothness::C0: return "C0";
        case Smoothness::C1: return "C1";
        case Smoothness::C2: return "C2";
        case Smoothness::Cinf: return "Cinf";
    }
    return "?";
}

double ProfilePiece::value(double t) const {
    return std::exp(growth * t + log_scale) * m0(t);
}

double ProfilePiece::d1(double t) const {
    return std::exp(growth * t + log_scale) * (growth * m0(t) + m1(t));
}

double ProfilePiece::d2(double t) const {
    return std::exp(growth * t + log_scale) *
           (growth * growth * m0(t) + 2.0 * growth * m1(t) + m2(t));
}

double ProfilePiece::log_d1(double t) const {
    const double m = m0(t);
    return growth + m1(t) / m;
}

double ProfilePiece::ratio_d2(double t) const {
    const double m = m0(t);
    return growth * growth + (2.0 * growth * m1(t) + m2(t)) / m;
}

ProfilePiece exp_piece(Interval span, double coeff, double rate) {
    ProfilePiece p;
    p.span = span;
    p.growth = rate;
    p.m0 = [coeff](double) { return coeff; };
    p.m1 = [](double) { return 0.0; };
    p.m2 = [](double) { return 0.0; };
    return p;
}

ProfilePiece const_piece(Interval span, double c) {
    return exp_piece(span, c, 0.0);
}

ProfilePiece poly_piece(Interval span, std::vector<double> coeffs, double center) {
    ProfilePiece p;
    p.span = span;
    p.growth = 0.0;
    auto horner = [](const std::vector<double>& c, double u) {
        double acc = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * u + c[i];
        return acc;
    };
    std::vector<double> d1c, d2c;
    for (std::size_t i = 1; i < coeffs.size(); ++i) d1c.push_back(double(i) * coeffs[i]);
    for (std::size_t i = 1; i < d1c.size(); ++i) d2c.push_back(double(i) * d1c[i]);
    if (d1c.empty()) d1c.push_back(0.0);
    if (d2c.empty()) d2c.push_back(0.0);
    p.m0 = [coeffs, center, horner](double t) { return horner(coeffs, t - center); };
    p.m1 = [d1c, center, horner](double t) { return horner(d1c, t - center); };
    p.m2 = [d2c, center, horner](double t) { return horner(d2c, t - center); };
    return p;
}

// ---------------------------------------------------------------------------
// Profile

struct Profile::Impl {
    std::string name;
    std::vector<ProfilePiece> pieces;
    std::vector<double> junctions;
    Interval domain;
    Smoothness smoothness = Smoothness::C0;
    ProfileTail tail;
    bool require_positive = true;
};

namespace {

void validate_junction(const ProfilePiece& a, const ProfilePiece& b, double t, Smoothness s,
                       const std::string& name) {
    auto mismatch = [&](const char* what, double l, double r) {
        const double tol = 1e-10 * std::max({1.0, std::abs(l), std::abs(r)});
        if (std::abs(l - r) > tol) {
            std::ostringstream msg;
            msg << "profile '" << name << "': " << what << " mismatch at t=" << t << " (" << l
                << " vs " << r << ")";
            throw PreconditionError(msg.str());
        }
    };
    const double rel_scale = std::exp(a.log_scale - b.log_scale);
    if (a.growth == b.growth && std::isfinite(rel_scale)) {
        // Same exponential rate: compare mantissa-space quantities, which stay
        // finite even where the value itself underflows.
        mismatch("value", rel_scale * a.m0(t), b.m0(t));
        if (s >= Smoothness::C1)
            mismatch("first derivative", rel_scale * (a.growth * a.m0(t) + a.m1(t)),
                     b.growth * b.m0(t) + b.m1(t));
        if (s >= Smoothness::C2)
            mismatch("second derivative",
                     rel_scale * (a.growth * a.growth * a.m0(t) + 2 * a.growth * a.m1(t) + a.m2(t)),
                     b.growth * b.growth * b.m0(t) + 2 * b.growth * b.m1(t) + b.m2(t));
    } else {
        mismatch("value", a.value(t), b.value(t));
        if (s >= Smoothness::C1) mismatch("first derivative", a.d1(t), b.d1(t));
        if (s >= Smoothness::C2) mismatch("second derivative", a.d2(t), b.d2(t));
    }
}

} // namespace

Profile::Profile(std::string name, std::vector<ProfilePiece> pieces, Smoothness smoothness,
                 ProfileTail tail, bool require_positive) {
    if (pieces.empty()) throw InvalidParameter("Profile: needs at least one piece");
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
        if (pieces[i].span.hi != pieces[i + 1].span.lo)
            throw InvalidParameter("Profile: pieces must be contiguous");
    }
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(name);
    impl->domain = Interval(pieces.front().span.lo, pieces.back().span.hi);
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) impl->junctions.push_back(pieces[i].span.hi);
    impl->smoothness = smoothness;
    impl->tail = tail;
    impl->require_positive = require_positive;

    for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
        validate_junction(pieces[i], pieces[i + 1], impl->junctions[i], smoothness, impl->name);

    // Warping functions are positive; spot-check the mantissa so that
    // exponential underflow cannot mask a sign error.
    if (require_positive) {
        for (const auto& p : pieces) {
            const int n = 33;
            for (int k = 0; k <= n; ++k) {
                const double t = p.span.lo + (p.span.hi - p.span.lo) * double(k) / double(n);
                if (!(p.m0(t) > 0.0)) {
                    std::ostringstream msg;
                    msg << "profile '" << impl->name << "': not positive at t=" << t;
                    throw PreconditionError(msg.str());
                }
            }
        }
    }

    impl->pieces = std::move(pieces);
    impl_ = std::move(impl);
}

const std::string& Profile::name() const { return impl_->name; }
bool Profile::positive_required() const { return impl_->require_positive; }
const Interval& Profile::domain() const { return impl_->domain; }
const std::vector<double>& Profile::breakpoints() const { return impl_->junctions; }
Smoothness Profile::smoothness() const { return impl_->smoothness; }
const ProfileTail& Profile::tail() const { return impl_->tail; }
const std::vector<ProfilePiece>& Profile::pieces() const { return impl_->pieces; }

std::size_t Profile::piece_index(const Impl& impl, double t, Side side) {
    const Interval& dom = impl.domain;
    const double pad = 1e-12 * std::max({1.0, std::abs(dom.lo), std::abs(dom.hi)});
    if (t < dom.lo - pad || t > dom.hi + pad) {
        std::ostringstream msg;
        msg << "profile '" << impl.name << "': t=" << t << " outside domain [" << dom.lo << ", "
            << dom.hi << "]";
        throw OutOfRange(msg.str());
    }
    t = std::clamp(t, dom.lo, dom.hi);
    const auto& j = impl.junctions;
    std::size_t idx;
    if (side == Side::Right)
        idx = std::size_t(std::upper_bound(j.begin(), j.end(), t) - j.begin());
    else
        idx = std::size_t(std::lower_bound(j.begin(), j.end(), t) - j.begin());
    if (idx >= impl.pieces.size()) idx = impl.pieces.size() - 1;
    return idx;
}

double Profile::value(double t, Side side) const {
    return impl_->pieces[piece_index(*impl_, t, side)].value(std::clamp(t, impl_->domain.lo, impl_->domain.hi));
}
double Profile::d1(double t, Side side) const {
    return impl_->pieces[piece_index(*impl_, t, side)].d1(std::clamp(t, impl_->domain.lo, impl_->domain.hi));
}
double Profile::d2(double t, Side side) const {
    return impl_->pieces[piece_index(*impl_, t, side)].d2(std::clamp(t, impl_->domain.lo, impl_->domain.hi));
}
double Profile::log_d1(double t, Side side) const {
    return impl_->pieces[piece_index(*impl_, t, side)].log_d1(std::clamp(t, impl_->domain.lo, impl_->domain.hi));
}
double Profile::ratio_d2(double t, Side side) const {
    return impl_->pieces[piece_index(*impl_, t, side)].ratio_d2(std::clamp(t, impl_->domain.lo, impl_->domain.hi));
}

Profile Profile::scaled(double lambda) const {
    if (!(lambda > 0.0)) throw InvalidParameter("Profile::scaled: lambda must be positive");
    std::vector<ProfilePiece> out;
    for (const auto& p : impl_->pieces) {
        ProfilePiece q = p;
        auto m0 = p.m0, m1 = p.m1, m2 = p.m2;
        q.m0 = [m0, lambda](double t) { return lambda * m0(t); };
        q.m1 = [m1, lambda](double t) { return lambda * m1(t); };
        q.m2 = [m2, lambda](double t) { return lambda * m2(t); };
        out.push_back(std::move(q));
    }
    ProfileTail tail = impl_->tail;
    tail.coeff *= lambda;
    return Profile(impl_->name + "*" + csv::num(lambda), std::move(out), impl_->smoothness, tail,
                   impl_->require_positive);
}

Profile Profile::shifted(double dt) const {
    std::vector<ProfilePiece> out;
    for (const auto& p : impl_->pieces) {
        ProfilePiece q;
        q.span = Interval(p.span.lo + dt, p.span.hi + dt);
        q.growth = p.growth;
        q.log_scale = p.log_scale - p.growth * dt;
        auto m0 = p.m0, m1 = p.m1, m2 = p.m2;
        q.m0 = [m0, dt](double t) { return m0(t - dt); };
        q.m1 = [m1, dt](double t) { return m1(t - dt); };
        q.m2 = [m2, dt](double t) { return m2(t - dt); };
        out.push_back(std::move(q));
    }
    ProfileTail tail = impl_->tail;
    if (tail.kind != ProfileTail::Kind::None) {
        tail.from += dt;
        tail.coeff *= std::exp(-tail.rate * dt);
    }
    return Profile(impl_->name, std::move(out), impl_->smoothness, tail, impl_->require_positive);
}

Profile Profile::log_scaled(double log_lambda) const {
    std::vector<ProfilePiece> out;
    for (const auto& p : impl_->pieces) {
        ProfilePiece q = p;
        q.log_scale += log_lambda;
        out.push_back(std::move(q));
    }
    ProfileTail tail = impl_->tail;
    if (tail.kind != ProfileTail::Kind::None) tail.coeff *= std::exp(log_lambda);
    return Profile(impl_->name, std::move(out), impl_->smoothness, tail, impl_->require_positive);
}

Profile Profile::restricted(Interval sub) const {
    if (sub.lo < impl_->domain.lo - 1e-12 || sub.hi > impl_->domain.hi + 1e-12)
        throw InvalidParameter("Profile::restricted: subinterval exceeds domain");
    std::vector<ProfilePiece> out;
    for (const auto& p : impl_->pieces) {
        const double lo = std::max(p.span.lo, sub.lo);
        const double hi = std::min(p.span.hi, sub.hi);
        if (lo >= hi) continue;
        ProfilePiece q = p;
        q.span = Interval(lo, hi);
        out.push_back(std::move(q));
    }
    if (out.empty()) throw InvalidParameter("Profile::restricted: empty restriction");
    return Profile(impl_->name, std::move(out), impl_->smoothness, impl_->tail,
                   impl_->require_positive);
}

void Profile::write_table(std::ostream& os, int n_samples) const {
    os << "# profile " << impl_->name << " domain " << csv::num(impl_->domain.lo) << " "
       << csv::num(impl_->domain.hi) << "\n";
    const int n = std::max(2, n_samples);
    for (int k = 0; k < n; ++k) {
        const double t = impl_->domain.lo + impl_->domain.length() * double(k) / double(n - 1);
        os << csv::num(t) << "," << csv::num(value(t)) << "," << csv::num(d1(t)) << ","
           << csv::num(d2(t)) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Catalog profiles

Profile exp_profile(double ell, Interval domain) {
    if (!(ell > 0.0)) throw InvalidParameter("exp_profile: ell must be positive");
    ProfileTail tail;
    tail.kind = ProfileTail::Kind::Exponential;
    tail.from = domain.lo;
    tail.coeff = ell;
    tail.rate = -1.0;
    return Profile("exp(" + csv::num(ell) + ")", {exp_piece(domain, ell, -1.0)}, Smoothness::Cinf,
                   tail);
}

Profile ode_profile(double ell, double delta, Interval domain) {
    if (!(ell > 0.0)) throw InvalidParameter("ode_profile: ell must be positive");
    if (!(delta > 0.0)) throw InvalidParameter("ode_profile: delta must be positive");
    const double k = 1.0 + 2.0 * delta;
    const double a = ell * (1.0 + delta) / k;
    const double b = ell * delta / k;
    ProfilePiece p;
    p.span = domain;
    p.growth = 0.0;
    p.m0 = [a, b, k](double t) { return a * std::exp(-k * t) + b * std::exp(k * t); };
    p.m1 = [a, b, k](double t) { return k * (-a * std::exp(-k * t) + b * std::exp(k * t)); };
    p.m2 = [a, b, k](double t) { return k * k * (a * std::exp(-k * t) + b * std::exp(k * t)); };
    return Profile("ode(" + csv::num(ell) + "," + csv::num(delta) + ")", {p}, Smoothness::Cinf);
}

double ode_min_location(double delta) {
    if (!(delta > 0.0)) throw InvalidParameter("ode_min_location: delta must be positive");
    return std::log(1.0 + 1.0 / delta) / (2.0 * (1.0 + 2.0 * delta));
}

double ode_min_value(double ell, double delta) {
    if (!(ell > 0.0) || !(delta > 0.0)) throw InvalidParameter("ode_min_value: bad parameters");
    return 2.0 * ell * std::sqrt(delta * (1.0 + delta)) / (1.0 + 2.0 * delta);
}

// ---------------------------------------------------------------------------
// Corner regularization

namespace {

// Cubic Hermite on [a, b]: matches value and first derivative at both ends.
// Coefficients are in powers of (t - a).
std::vector<double> hermite_cubic(double a, double b, double va, double da, double vb, double db) {
    const double h = b - a;
    const double c2 = (3.0 * (vb - va) - (2.0 * da + db) * h) / (h * h);
    const double c3 = (2.0 * (va - vb) + (da + db) * h) / (h * h * h);
    return {va, da, c2, c3};
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t i = 1; i < c.size(); ++i) d.push_back(double(i) * c[i]);
    if (d.empty()) d.push_back(0.0);
    return d;
}

std::vector<double> poly_antiderivative(const std::vector<double>& c, double constant) {
    std::vector<double> a{constant};
    for (std::size_t i = 0; i < c.size(); ++i) a.push_back(c[i] / double(i + 1));
    return a;
}

double poly_eval(const std::vector<double>& c, double u) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * u + c[i];
    return acc;
}

void require(bool ok, const std::string& diag) {
    if (!ok) throw PreconditionError(diag);
}

void check_window_clear(const Profile& phi, double center, double eps) {
    for (double b : phi.breakpoints()) {
        if (std::abs(b - center) > 1e-15 && std::abs(b - center) <= eps)
            throw PreconditionError("interpolation window overlaps another breakpoint at t=" +
                                    csv::num(b));
    }
    if (!phi.domain().contains(center - eps) || !phi.domain().contains(center + eps))
        throw PreconditionError("interpolation window exceeds the profile domain");
}

std::vector<ProfilePiece> clip_left(const Profile& phi, double cut) {
    std::vector<ProfilePiece> out;
    for (const auto& p : phi.pieces()) {
        if (p.span.lo >= cut) break;
        ProfilePiece q = p;
        q.span = Interval(p.span.lo, std::min(p.span.hi, cut));
        out.push_back(std::move(q));
    }
    return out;
}

// Highest tag in {C0, C1, C2} under which every junction validates. Window
// splices are exact where they were built; downstream corners that are still
// waiting for their own regularization keep the tag honest.
Smoothness measured_smoothness(const std::vector<ProfilePiece>& pieces) {
    for (Smoothness s : {Smoothness::C2, Smoothness::C1}) {
        bool ok = true;
        for (std::size_t i = 0; i + 1 < pieces.size() && ok; ++i) {
            try {
                validate_junction(pieces[i], pieces[i + 1], pieces[i].span.hi, s, "probe");
            } catch (const PreconditionError&) {
                ok = false;
            }
        }
        if (ok) return s;
    }
    return Smoothness::C0;
}

std::vector<ProfilePiece> clip_right(const Profile& phi, double cut, double shift) {
    std::vector<ProfilePiece> out;
    for (const auto& p : phi.pieces()) {
        if (p.span.hi <= cut) continue;
        ProfilePiece q;
        q.span = Interval(std::max(p.span.lo, cut), p.span.hi);
        if (shift == 0.0) {
            q.growth = p.growth;
            q.m0 = p.m0;
            q.m1 = p.m1;
            q.m2 = p.m2;
        } else {
            // An additive shift has no exponential-prefactor form; fall back
            // to a plain evaluation piece.
            q.growth = 0.0;
            ProfilePiece base = p;
            q.m0 = [base, shift](double t) { return base.value(t) + shift; };
            q.m1 = [base](double t) { return base.d1(t); };
            q.m2 = [base](double t) { return base.d2(t); };
        }
        out.push_back(std::move(q));
    }
    return out;
}

} // namespace

Profile c1_interpolate(const Profile& phi, double eps, double M) {
    if (!(eps > 0.0)) throw InvalidParameter("c1_interpolate: eps must be positive");
    if (!(M >= 0.0)) throw InvalidParameter("c1_interpolate: M must be nonnegative");
    check_window_clear(phi, 0.0, eps);

    const double v0l = phi.value(0.0, Side::Left);
    const double v0r = phi.value(0.0, Side::Right);
    require(std::abs(v0l - v0r) <= 1e-10 * std::max(1.0, std::abs(v0l)),
            "c1_interpolate: value must be continuous at the corner");
    require(std::abs(v0l) <= M * (1.0 + 1e-12) + 1e-300,
            "c1_interpolate: |phi(0)| exceeds the bound M");
    const double dl = phi.d1(0.0, Side::Left);
    const double dr = phi.d1(0.0, Side::Right);
    require(dl < dr, "c1_interpolate: derivative must jump upward at the corner");

    const double A = phi.d1(-eps, Side::Left);
    const double B = phi.d1(eps, Side::Right);
    require(A <= B + 1e-14 * std::max(1.0, std::abs(A)),
            "c1_interpolate: window too wide, d1(-eps) > d1(eps)");

    const auto q = hermite_cubic(-eps, eps, phi.value(-eps, Side::Left), A,
                                 phi.value(eps, Side::Right), B);
    const auto qd = poly_derivative(q);

    // Derivative sandwich on the window.
    const int n = 1024;
    const double slack = 1e-10 * (1.0 + std::abs(A) + std::abs(B));
    for (int k = 0; k <= n; ++k) {
        const double t = -eps + 2.0 * eps * double(k) / double(n);
        const double d = poly_eval(qd, t + eps);
        require(d >= A - slack && d <= B + slack,
                "c1_interpolate: derivative sandwich failed at t=" + csv::num(t));
    }
    // |integral over the window| <= 2 M eps.
    const auto qa = poly_antiderivative(q, 0.0);
    const double integral = poly_eval(qa, 2.0 * eps);
    require(std::abs(integral) <= 2.0 * M * eps * (1.0 + 1e-10) + 1e-300,
            "c1_interpolate: window integral exceeds 2*M*eps");

    std::vector<ProfilePiece> pieces = clip_left(phi, -eps);
    pieces.push_back(poly_piece(Interval(-eps, eps), q, -eps));
    auto right = clip_right(phi, eps, 0.0);
    pieces.insert(pieces.end(), right.begin(), right.end());

    ProfileTail tail = phi.tail();
    if (tail.kind != ProfileTail::Kind::None && tail.from < eps) tail.from = eps;
    const Smoothness sm = std::min(measured_smoothness(pieces), Smoothness::C1);
    return Profile(phi.name() + "~c1", std::move(pieces), sm, tail, phi.positive_required());
}

FlattenResult c2_flatten(const Profile& phi, double eps, double M) {
    if (!(eps > 0.0)) throw InvalidParameter("c2_flatten: eps must be positive");
    if (!(M >= 0.0)) throw InvalidParameter("c2_flatten: M must be nonnegative");
    check_window_clear(phi, 0.0, eps);

    // The corner must be C1 with an upward jump of the second derivative,
    // and phi must be convex.
    const double d1l = phi.d1(0.0, Side::Left);
    const double d1r = phi.d1(0.0, Side::Right);
    require(std::abs(d1l - d1r) <= 1e-10 * std::max(1.0, std::abs(d1l)),
            "c2_flatten: first derivative must be continuous at the corner");
    require(std::abs(d1l) <= M * (1.0 + 1e-12) + 1e-300, "c2_flatten: |phi'(0)| exceeds M");
    const double a0 = phi.d2(0.0, Side::Left);
    const double b0 = phi.d2(0.0, Side::Right);
    require(a0 >= -1e-10, "c2_flatten: phi must be convex (d2(0-) < 0)");
    require(a0 < b0, "c2_flatten: second derivative must jump upward at the corner");
    {
        const int n = 256;
        for (int k = 0; k <= n; ++k) {
            const double t =
                phi.domain().lo + phi.domain().length() * double(k) / double(n);
            require(phi.d2(t) >= -1e-10 * std::max(1.0, std::abs(phi.value(t))),
                    "c2_flatten: phi must be convex");
        }
    }

    const double A2 = phi.d2(-eps, Side::Left);
    const double B2 = phi.d2(eps, Side::Right);
    const auto D = hermite_cubic(-eps, eps, phi.d1(-eps, Side::Left), A2,
                                 phi.d1(eps, Side::Right), B2);
    const auto Dd = poly_derivative(D);

    const int n = 1024;
    const double s2 = 1e-10 * (1.0 + std::abs(A2) + std::abs(B2));
    const double s1 = 1e-10 * (1.0 + std::abs(phi.d1(-eps, Side::Left)) + std::abs(phi.d1(eps, Side::Right)));
    for (int k = 0; k <= n; ++k) {
        const double t = -eps + 2.0 * eps * double(k) / double(n);
        const double dd = poly_eval(Dd, t + eps);
        require(dd >= std::min(A2, B2) - s2 && dd <= std::max(A2, B2) + s2,
                "c2_flatten: second-derivative sandwich failed at t=" + csv::num(t));
        const double d = poly_eval(D, t + eps);
        const Side side = t < 0.0 ? Side::Left : Side::Right;
        require(d >= phi.d1(t, side) - s1, "c2_flatten: first derivative fell below phi' at t=" + csv::num(t));
        require(d <= phi.d1(eps, Side::Right) + s1,
                "c2_flatten: first derivative exceeded phi'(eps) at t=" + csv::num(t));
    }

    const auto P = poly_antiderivative(D, phi.value(-eps, Side::Left));
    const double c = poly_eval(P, 2.0 * eps) - phi.value(eps, Side::Right);
    require(std::abs(c) <= 4.0 * M * eps * (1.0 + 1e-10) + 1e-300,
            "c2_flatten: plateau shift |c| exceeds 4*M*eps");
    for (int k = 0; k <= n; ++k) {
        const double t = -eps + 2.0 * eps * double(k) / double(n);
        const Side side = t < 0.0 ? Side::Left : Side::Right;
        require(std::abs(poly_eval(P, t + eps) - phi.value(t, side)) <=
                    4.0 * M * eps * (1.0 + 1e-10) + 1e-300,
                "c2_flatten: |result - phi| exceeds 4*M*eps inside the window");
    }

    std::vector<ProfilePiece> pieces = clip_left(phi, -eps);
    pieces.push_back(poly_piece(Interval(-eps, eps), P, -eps));
    auto right = clip_right(phi, eps, c);
    pieces.insert(pieces.end(), right.begin(), right.end());

    ProfileTail tail = phi.tail();
    if (tail.kind == ProfileTail::Kind::Constant && tail.from >= eps) {
        tail.coeff += c;
    } else if (tail.kind != ProfileTail::Kind::None && c != 0.0) {
        tail = ProfileTail{};
    }
    return {Profile(phi.name() + "~c2", std::move(pieces), measured_smoothness(pieces), tail,
                    phi.positive_required()),
            c};
}

namespace {

// Flatten a convex corner at `center` whose right side is a constant plateau
// (second derivative jumps downward to zero). The segment left of the window
// is kept exact and the plateau level is re-based to wherever the smoothed
// window lands, so no additive shift leaks to the other pieces.
struct PlateauFlatten {
    Profile profile;
    double plateau;
};

PlateauFlatten flatten_plateau_corner(const Profile& phi, double center, double eps,
                                      const std::string& name) {
    check_window_clear(phi, center, eps);
    const double wl = center - eps;
    const double wr = center + eps;
    require(std::abs(phi.d1(wr, Side::Right)) <= 1e-12 &&
                std::abs(phi.d2(wr, Side::Right)) <= 1e-12,
            "plateau flatten: right side must be constant");

    const double dA = phi.d1(wl, Side::Left);
    const double cA = phi.d2(wl, Side::Left);
    const auto D = hermite_cubic(wl, wr, dA, cA, 0.0, 0.0);
    const auto Dd = poly_derivative(D);

    const int n = 1024;
    const double s2 = 1e-10 * (1.0 + std::abs(cA));
    const double s1 = 1e-10 * (1.0 + std::abs(dA));
    for (int k = 0; k <= n; ++k) {
        const double u = 2.0 * eps * double(k) / double(n);
        const double dd = poly_eval(Dd, u);
        require(dd >= -s2 && dd <= cA + s2, "plateau flatten: second-derivative sandwich failed");
        const double d = poly_eval(D, u);
        require(d >= dA - s1 && d <= s1, "plateau flatten: first-derivative sandwich failed");
    }

    const auto P = poly_antiderivative(D, phi.value(wl, Side::Left));
    const double plateau = poly_eval(P, 2.0 * eps);
    require(plateau > 0.0, "plateau flatten: plateau must stay positive");

    std::vector<ProfilePiece> pieces = clip_left(phi, wl);
    pieces.push_back(poly_piece(Interval(wl, wr), P, wl));
    pieces.push_back(const_piece(Interval(wr, phi.domain().hi), plateau));

    ProfileTail tail;
    tail.kind = ProfileTail::Kind::Constant;
    tail.from = wr;
    tail.coeff = plateau;
    tail.rate = 0.0;
    return {Profile(name, std::move(pieces), measured_smoothness(pieces), tail), plateau};
}

} // namespace

CuspCap cusp_cap_profile(double ell, double delta, const CapOptions& opts) {
    if (!(ell > 0.0)) throw InvalidParameter("cusp_cap_profile: ell must be positive");
    if (!(delta > 0.0 && delta <= 0.5))
        throw InvalidParameter("cusp_cap_profile: delta must lie in (0, 1/2]");

    const double t_d = ode_min_location(delta);
    const double l_d = ode_min_value(ell, delta);
    const double bound = (1.0 + 2.0 * delta) * (1.0 + 2.0 * delta);
    const double lp_lo = ell * std::sqrt(delta * (1.0 + delta)) / (1.0 + 2.0 * delta);
    const double lp_hi = 4.0 * lp_lo;

    const double PL = opts.pad_left + 1.0;
    const double PR = opts.pad_right + 1.0;
    const double eps0 = std::min(delta / 10.0, 0.01 * t_d);

    std::string last_failure = "no attempt made";
    for (int k = 0; k <= opts.max_shrink; ++k) {
        const double eps = eps0 * std::pow(0.5, k);
        try {
            Profile ode = ode_profile(ell, delta, Interval(-1.0, t_d + 1.0));
            std::vector<ProfilePiece> host_pieces;
            host_pieces.push_back(exp_piece(Interval(-PL, 0.0), ell, -1.0));
            {
                ProfilePiece mid = ode.pieces().front();
                mid.span = Interval(0.0, t_d);
                host_pieces.push_back(mid);
            }
            host_pieces.push_back(const_piece(Interval(t_d, t_d + PR), l_d));
            Profile host("cap_host", std::move(host_pieces), Smoothness::C1);

            FlattenResult f1 = c2_flatten(host, eps, ell);
            PlateauFlatten f2 = flatten_plateau_corner(
                f1.profile, t_d, eps,
                "cusp_cap(" + csv::num(ell) + "," + csv::num(delta) + ")");

            const double l_prime = f2.plateau;
            require(l_prime >= lp_lo * (1.0 - 1e-10) && l_prime <= lp_hi * (1.0 + 1e-10),
                    "cusp cap: plateau value " + csv::num(l_prime) + " outside [" +
                        csv::num(lp_lo) + ", " + csv::num(lp_hi) + "]");

            const Profile final_profile =
                f2.profile.restricted(Interval(-opts.pad_left, t_d + eps + opts.pad_right));

            // Verification grid: the two curvature-ratio bounds, monotonicity
            // and convexity, with the splice windows oversampled.
            std::vector<double> samples;
            const Interval dom = final_profile.domain();
            const long n_global =
                std::max<long>(4096, std::lround(double(opts.grid_per_unit) * dom.length()));
            const long n_cap = 200000;
            const long n_use = std::min(n_global, n_cap);
            samples.reserve(std::size_t(n_use) + 2100);
            for (long i = 0; i <= n_use; ++i)
                samples.push_back(dom.lo + dom.length() * double(i) / double(n_use));
            for (int i = 0; i <= 1024; ++i) {
                const double u = 2.0 * eps * double(i) / 1024.0;
                samples.push_back(-eps + u);
                samples.push_back(t_d - eps + u);
            }
            for (double t : samples) {
                for (Side side : {Side::Left, Side::Right}) {
                    const double v = final_profile.value(t, side);
                    const double d1v = final_profile.d1(t, side);
                    const double d2v = final_profile.d2(t, side);
                    require(v > 0.0, "cusp cap: positivity failed at t=" + csv::num(t));
                    require(d1v <= 1e-12, "cusp cap: not nonincreasing at t=" + csv::num(t));
                    require(d2v >= -1e-10, "cusp cap: not convex at t=" + csv::num(t));
                    const double r1 = d1v / v;
                    require(r1 * r1 <= bound + 1e-9,
                            "cusp cap: (phi'/phi)^2 bound failed at t=" + csv::num(t));
                    require(d2v / v <= bound + 1e-9,
                            "cusp cap: phi''/phi bound failed at t=" + csv::num(t));
                }
            }

            CapParameters params;
            params.delta = delta;
            params.eps = eps;
            params.eps_prime = eps;
            params.t_delta = t_d;
            params.ell = ell;
            params.ell_prime = l_prime;
            return {final_profile, params};
        } catch (const PreconditionError& e) {
            last_failure = e.what();
        }
    }
    throw ConstructionError("cusp_cap_profile: splice shrink budget exhausted; last failure: " +
                            last_failure);
}

// ---------------------------------------------------------------------------
// Bump

namespace {

// bump(t) = 1 / (1 + e^{h(t)}) with h(t) = 1/(1-t) - 1/t on (0, 1).
struct BumpEval {
    double f, f1, f2;
};

BumpEval bump_eval(double t) {
    if (t <= 0.0) return {1.0, 0.0, 0.0};
    if (t >= 1.0) return {0.0, 0.0, 0.0};
    const double h = 1.0 / (1.0 - t) - 1.0 / t;
    if (h > 700.0) return {0.0, 0.0, 0.0};
    if (h < -700.0) return {1.0, 0.0, 0.0};
    const double e = std::exp(h);
    const double f = 1.0 / (1.0 + e);
    const double w = f * (1.0 - f); // e^h / (1+e^h)^2
    const double omt = 1.0 - t;
    const double h1 = 1.0 / (omt * omt) + 1.0 / (t * t);
    const double h2 = 2.0 / (omt * omt * omt) - 2.0 / (t * t * t);
    const double f1 = -h1 * w;
    const double f2 = guarded(-h2 * w + h1 * h1 * w * (1.0 - 2.0 * f));
    return {f, guarded(f1), f2};
}

} // namespace

double bump(double t) { return bump_eval(t).f; }
double bump_d1(double t) { return bump_eval(t).f1; }
double bump_d2(double t) { return bump_eval(t).f2; }

const BumpStats& bump_stats() {
    static const BumpStats stats = [] {
        const long n = 1000000;
        double mx = 0.0, mn = 0.0;
        for (long i = 1; i < n; ++i) {
            const double t = double(i) / double(n);
            const double d2 = bump_d2(t);
            mx = std::max(mx, d2);
            mn = std::min(mn, d2);
        }
        return BumpStats{mx, mn, n};
    }();
    return stats;
}

} // namespace minent
