#include <doctest.h>

#include "minent/optimize.hpp"
#include "minent/profile.hpp"
#include "minent/rng.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

using namespace minent;

namespace {

// Independent finite-difference oracle for the derivative evaluators.
double central_diff(const Profile& p, double t, double h) {
    return (p.value(t + h) - p.value(t - h)) / (2.0 * h);
}

} // namespace

TEST_CASE("exp profile evaluates exactly") {
    Profile p = exp_profile(1.0);
    CHECK(p.value(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.d1(0.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(p.d2(0.0) == doctest::Approx(1.0).epsilon(1e-15));

    Profile p2 = exp_profile(2.0);
    CHECK(p2.value(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-15));

    // Exponential warping is hyperbolic: -phi''/phi == -1 on any grid.
    for (int i = 0; i <= 50; ++i) {
        const double t = -5.0 + 10.0 * i / 50.0;
        CHECK(-p.ratio_d2(t) == doctest::Approx(-1.0).epsilon(1e-13));
    }
}

TEST_CASE("exp profile rejects nonpositive ell") {
    CHECK_THROWS_AS(exp_profile(0.0), InvalidParameter);
    CHECK_THROWS_AS(exp_profile(-2.0), InvalidParameter);
}

TEST_CASE("ode profile: initial conditions and minimum") {
    for (double delta : {1.0, 0.5, 0.1, 0.01}) {
        Profile p = ode_profile(1.0, delta);
        CHECK(p.value(0.0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(p.d1(0.0) == doctest::Approx(-1.0).epsilon(1e-13));

        // Numerical minimum against the closed forms. A first value-based
        // pass brackets the minimum; a second pass on |phi'| sharpens it past
        // the sqrt(eps) wall of value-only comparisons.
        const double t0 = golden_section_min([&](double t) { return p.value(t); }, 0.0, 4.0, 1e-10);
        const double t_num = golden_section_min([&](double t) { return std::abs(p.d1(t)); },
                                                t0 - 1e-4, t0 + 1e-4, 1e-14);
        CHECK(std::abs(t_num - ode_min_location(delta)) <= 1e-8);
        CHECK(std::abs(p.value(t_num) - ode_min_value(1.0, delta)) <= 1e-8);
    }

    // delta = 1: t_delta = ln(2)/6, minimum 2*sqrt(2)/3.
    CHECK(ode_min_location(1.0) == doctest::Approx(std::log(2.0) / 6.0).epsilon(1e-15));
    CHECK(ode_min_location(1.0) == doctest::Approx(0.11552453009332421).epsilon(1e-12));
    CHECK(ode_min_value(1.0, 1.0) == doctest::Approx(0.9428090415820634).epsilon(1e-14));
}

TEST_CASE("ode profile satisfies its differential equation") {
    Rng rng(7);
    for (double delta : {0.3, 0.05}) {
        Profile p = ode_profile(2.0, delta);
        const double k2 = (1.0 + 2.0 * delta) * (1.0 + 2.0 * delta);
        for (int i = 0; i < 40; ++i) {
            const double t = rng.uniform(-3.0, 3.0);
            CHECK(p.ratio_d2(t) == doctest::Approx(k2).epsilon(1e-12));
        }
    }
}

TEST_CASE("finite differences reproduce the analytic derivatives") {
    const double h = 1e-4;
    Profile pe = exp_profile(1.5);
    Profile po = ode_profile(1.0, 0.2);
    for (const Profile& p : {pe, po}) {
        for (int i = 0; i <= 40; ++i) {
            const double t = -2.0 + 4.0 * i / 40.0;
            CHECK(std::abs(central_diff(p, t, h) - p.d1(t)) <= 1e-5);
        }
    }
}

TEST_CASE("profile junction validation catches mismatches") {
    std::vector<ProfilePiece> bad;
    bad.push_back(const_piece(Interval(0.0, 1.0), 1.0));
    bad.push_back(const_piece(Interval(1.0, 2.0), 1.5));
    CHECK_THROWS_AS(Profile("bad", std::move(bad), Smoothness::C0), PreconditionError);

    std::vector<ProfilePiece> kinked;
    kinked.push_back(exp_piece(Interval(-1.0, 0.0), 1.0, -1.0));
    kinked.push_back(const_piece(Interval(0.0, 1.0), 1.0));
    // Value matches but d1 jumps: fine as C0, rejected as C1.
    CHECK_NOTHROW(Profile("kink0", kinked, Smoothness::C0));
    CHECK_THROWS_AS(Profile("kink1", kinked, Smoothness::C1), PreconditionError);
}

TEST_CASE("one-sided evaluation at breakpoints") {
    std::vector<ProfilePiece> pieces;
    pieces.push_back(exp_piece(Interval(-1.0, 0.0), 1.0, -1.0));
    pieces.push_back(const_piece(Interval(0.0, 1.0), 1.0));
    Profile p("kink", pieces, Smoothness::C0);
    CHECK(p.d1(0.0, Side::Left) == doctest::Approx(-1.0));
    CHECK(p.d1(0.0, Side::Right) == doctest::Approx(0.0));
    CHECK_THROWS_AS(p.value(3.0), OutOfRange);
}

TEST_CASE("scaled and shifted transforms") {
    Profile p = ode_profile(1.0, 0.25);
    Profile q = p.scaled(3.0);
    Profile r = p.shifted(2.5);
    Rng rng(11);
    for (int i = 0; i < 25; ++i) {
        const double t = rng.uniform(-2.0, 2.0);
        CHECK(q.value(t) == doctest::Approx(3.0 * p.value(t)).epsilon(1e-13));
        CHECK(q.d2(t) == doctest::Approx(3.0 * p.d2(t)).epsilon(1e-13));
        CHECK(r.value(t + 2.5) == doctest::Approx(p.value(t)).epsilon(1e-12));
        CHECK(r.d1(t + 2.5) == doctest::Approx(p.d1(t)).epsilon(1e-12));
    }
}

TEST_CASE("shifted exponential keeps the symbolic rate") {
    Profile p = exp_profile(1.0, Interval(-1.0, 1.0)).shifted(50.0);
    // value(51) = e^{-1}, and the ratio evaluators stay finite
    CHECK(p.value(51.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(p.log_d1(50.5) == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(p.ratio_d2(50.5) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("c1 interpolation of the canonical corner") {
    // 1 + |t|: corner at 0, derivative jumps from -1 to +1.
    std::vector<ProfilePiece> pieces;
    pieces.push_back(poly_piece(Interval(-1.0, 0.0), {1.0, -1.0}, 0.0));
    pieces.push_back(poly_piece(Interval(0.0, 1.0), {1.0, 1.0}, 0.0));
    Profile corner("corner", pieces, Smoothness::C0);

    const double eps = 0.1;
    Profile smooth = c1_interpolate(corner, eps, 1.2);
    CHECK(smooth.smoothness() == Smoothness::C1);

    for (double t : {-0.9, -0.5, -0.2, 0.2, 0.5, 0.9}) {
        CHECK(smooth.value(t) == doctest::Approx(corner.value(t)).epsilon(1e-14));
    }
    for (int i = 0; i <= 1000; ++i) {
        const double t = -eps + 2.0 * eps * i / 1000.0;
        CHECK(smooth.d1(t) >= -1.0 - 1e-12);
        CHECK(smooth.d1(t) <= 1.0 + 1e-12);
        CHECK(smooth.value(t) >= corner.value(t) - 1e-12); // hugs the corner from above
    }
}

TEST_CASE("c1 interpolation derivative sandwich on random admissible hosts") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        // Convex-kink host: left slope a < right slope b at 0, host values positive.
        const double a = rng.uniform(-1.5, 0.5);
        const double b = a + rng.uniform(0.1, 2.0);
        const double v0 = rng.uniform(1.0, 3.0);
        std::vector<ProfilePiece> pieces;
        pieces.push_back(poly_piece(Interval(-1.0, 0.0), {v0, a, rng.uniform(0.0, 0.3)}, 0.0));
        pieces.push_back(poly_piece(Interval(0.0, 1.0), {v0, b, rng.uniform(0.0, 0.3)}, 0.0));
        Profile host("host", pieces, Smoothness::C0);
        const double eps = 0.01;
        Profile out = c1_interpolate(host, eps, v0 + 1.0);
        const double lo = host.d1(-eps, Side::Left);
        const double hi = host.d1(eps, Side::Right);
        for (int i = 0; i <= 1000; ++i) {
            const double t = -eps + 2.0 * eps * i / 1000.0;
            CHECK(out.d1(t) >= lo - 1e-10);
            CHECK(out.d1(t) <= hi + 1e-10);
        }
    }
}

TEST_CASE("c1 interpolation rejects bad hypotheses") {
    std::vector<ProfilePiece> pieces;
    pieces.push_back(poly_piece(Interval(-1.0, 0.0), {2.0, 1.0}, 0.0));
    pieces.push_back(poly_piece(Interval(0.0, 1.0), {2.0, -1.0}, 0.0));
    Profile down("down", pieces, Smoothness::C0); // derivative jumps downward
    CHECK_THROWS_AS(c1_interpolate(down, 0.1, 2.0), PreconditionError);

    std::vector<ProfilePiece> p2;
    p2.push_back(poly_piece(Interval(-1.0, 0.0), {5.0, -1.0}, 0.0));
    p2.push_back(poly_piece(Interval(0.0, 1.0), {5.0, 1.0}, 0.0));
    Profile big("big", p2, Smoothness::C0);
    CHECK_THROWS_AS(c1_interpolate(big, 0.1, 1.0), PreconditionError); // |phi(0)| > M
}

TEST_CASE("c2 flatten of a second-derivative jump") {
    // phi(t) = 2 - 0.1 t for t<0 (second derivative 0), plus t^2/2 for t>0 (second derivative 1).
    std::vector<ProfilePiece> pieces;
    pieces.push_back(poly_piece(Interval(-1.0, 0.0), {2.0, -0.1}, 0.0));
    pieces.push_back(poly_piece(Interval(0.0, 1.0), {2.0, -0.1, 0.5}, 0.0));
    Profile host("jump", pieces, Smoothness::C1);

    const double eps = 0.05;
    const double M = 0.2;
    FlattenResult res = c2_flatten(host, eps, M);
    CHECK(res.profile.smoothness() == Smoothness::C2);
    CHECK(std::abs(res.shift) <= 4.0 * M * eps + 1e-12);

    // Equal to host on the left, host + c on the right, second derivative in [0, 1].
    CHECK(res.profile.value(-2.0 * eps) == doctest::Approx(host.value(-2.0 * eps)).epsilon(1e-14));
    CHECK(res.profile.d1(-2.0 * eps) == doctest::Approx(host.d1(-2.0 * eps)).epsilon(1e-14));
    CHECK(res.profile.value(0.5) ==
          doctest::Approx(host.value(0.5) + res.shift).epsilon(1e-13));
    for (int i = 0; i <= 1000; ++i) {
        const double t = -eps + 2.0 * eps * i / 1000.0;
        CHECK(res.profile.d2(t) >= -1e-10);
        CHECK(res.profile.d2(t) <= 1.0 + 1e-10);
        CHECK(std::abs(res.profile.value(t) - host.value(t)) <= 4.0 * M * eps + 1e-12);
    }
}

TEST_CASE("c2 flatten keeps convex inputs convex") {
    std::vector<ProfilePiece> pieces;
    pieces.push_back(poly_piece(Interval(-1.0, 0.0), {1.0, -0.5, 0.05}, 0.0));
    pieces.push_back(poly_piece(Interval(0.0, 1.0), {1.0, -0.5, 0.8}, 0.0));
    Profile host("convex", pieces, Smoothness::C1);
    FlattenResult res = c2_flatten(host, 0.02, 0.6);
    for (int i = 0; i <= 2000; ++i) {
        const double t = -1.0 + 2.0 * i / 2000.0;
        CHECK(res.profile.d2(t) >= -1e-10);
    }
}

TEST_CASE("cusp cap profile: construction and bounds") {
    for (double delta : {0.5, 0.2, 0.1, 0.05}) {
        CuspCap cap = cusp_cap_profile(1.0, delta);
        const CapParameters& cp = cap.params;
        CHECK(cp.t_delta == doctest::Approx(ode_min_location(delta)).epsilon(1e-15));

        const double s = std::sqrt(delta * (1.0 + delta)) / (1.0 + 2.0 * delta);
        CHECK(cp.ell_prime >= s - 1e-12);
        CHECK(cp.ell_prime <= 4.0 * s + 1e-12);

        // Exponential to the left of the window, constant past the plateau.
        CHECK(cap.profile.value(-2.0 * cp.eps) ==
              doctest::Approx(std::exp(2.0 * cp.eps)).epsilon(1e-13));
        const double tail_t = cp.t_delta + cp.eps_prime + 0.5;
        CHECK(cap.profile.value(tail_t) == doctest::Approx(cp.ell_prime).epsilon(1e-14));
        CHECK(cap.profile.d1(tail_t) == doctest::Approx(0.0));
        CHECK(cap.profile.d2(tail_t) == doctest::Approx(0.0));

        // Ratio bounds on a dense grid.
        const double bound = (1.0 + 2.0 * delta) * (1.0 + 2.0 * delta);
        const Interval dom = cap.profile.domain();
        for (int i = 0; i <= 10000; ++i) {
            const double t = dom.lo + dom.length() * i / 10000.0;
            const double v = cap.profile.value(t);
            const double r1 = cap.profile.d1(t) / v;
            CHECK(r1 * r1 <= bound + 1e-9);
            CHECK(cap.profile.d2(t) / v <= bound + 1e-9);
            CHECK(cap.profile.d1(t) <= 1e-12);
            CHECK(cap.profile.d2(t) >= -1e-10);
        }
    }
}

TEST_CASE("cusp cap ell' interval example") {
    CuspCap cap = cusp_cap_profile(1.0, 0.1);
    CHECK(cap.params.ell_prime >= 0.27638); // sqrt(0.11)/1.2
    CHECK(cap.params.ell_prime <= 1.10555); // 4 sqrt(0.11)/1.2
}

TEST_CASE("cusp cap rejects out-of-range delta") {
    CHECK_THROWS_AS(cusp_cap_profile(1.0, 0.7), InvalidParameter);
    CHECK_THROWS_AS(cusp_cap_profile(1.0, 0.0), InvalidParameter);
    CHECK_THROWS_AS(cusp_cap_profile(0.0, 0.1), InvalidParameter);
}

TEST_CASE("bump function") {
    CHECK(bump(-3.0) == 1.0);
    CHECK(bump(7.0) == 0.0);
    CHECK(bump(0.5) == doctest::Approx(0.5).epsilon(1e-14));
    // monotone nonincreasing
    double prev = 1.0;
    for (int i = 0; i <= 2000; ++i) {
        const double t = -0.5 + 2.0 * i / 2000.0;
        const double v = bump(t);
        CHECK(v <= prev + 1e-12);
        CHECK(bump_d1(t) <= 1e-12);
        prev = v;
    }
    // derivatives against finite differences
    for (int i = 1; i < 40; ++i) {
        const double t = i / 40.0;
        const double h = 1e-5;
        CHECK(std::abs((bump(t + h) - bump(t - h)) / (2 * h) - bump_d1(t)) <= 1e-5);
        CHECK(std::abs((bump_d1(t + h) - bump_d1(t - h)) / (2 * h) - bump_d2(t)) <= 2e-4);
    }
}

TEST_CASE("bump stats are finite and reproducible") {
    const BumpStats& s1 = bump_stats();
    const BumpStats& s2 = bump_stats();
    CHECK(s1.max_d2 == s2.max_d2);
    CHECK(s1.max_d2 > 0.0);
    CHECK(s1.min_d2 < 0.0);
    CHECK(std::isfinite(s1.max_d2));
    // antisymmetry about 1/2
    CHECK(s1.max_d2 == doctest::Approx(-s1.min_d2).epsilon(1e-6));
}

TEST_CASE("profile serialization header and rows") {
    Profile p = exp_profile(1.0, Interval(0.0, 1.0));
    std::ostringstream os;
    p.write_table(os, 3);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line.rfind("# profile exp(1) domain 0 1", 0) == 0);
    std::getline(is, line);
    CHECK(line == "0,1,-1,1");
}

TEST_CASE("profiles are safe for unrestricted concurrent reads") {
    CuspCap cap = cusp_cap_profile(1.0, 0.2);
    const Profile p = cap.profile;
    const Interval dom = p.domain();
    std::atomic<int> bad{0};
    auto reader = [&]() {
        for (int i = 0; i <= 20000; ++i) {
            const double t = dom.lo + dom.length() * i / 20000.0;
            const double v = p.value(t);
            if (!(v > 0.0) || !std::isfinite(p.ratio_d2(t))) ++bad;
        }
    };
    std::thread t1(reader), t2(reader), t3(reader);
    t1.join();
    t2.join();
    t3.join();
    CHECK(bad.load() == 0);
}

TEST_CASE("cusp cap bundle holds across random parameters") {
    Rng rng(0xCA9);
    for (int trial = 0; trial < 12; ++trial) {
        const double delta = rng.uniform(0.02, 0.5);
        const double ell = std::exp(rng.uniform(-2.0, 2.0));
        CuspCap cap = cusp_cap_profile(ell, delta);
        const double bound = (1.0 + 2.0 * delta) * (1.0 + 2.0 * delta);
        const double s = ell * std::sqrt(delta * (1.0 + delta)) / (1.0 + 2.0 * delta);
        CHECK(cap.params.ell_prime >= s - 1e-10 * ell);
        CHECK(cap.params.ell_prime <= 4.0 * s + 1e-10 * ell);
        const Interval dom = cap.profile.domain();
        for (int i = 0; i <= 2000; ++i) {
            const double t = dom.lo + dom.length() * i / 2000.0;
            const double v = cap.profile.value(t);
            const double r1 = cap.profile.d1(t) / v;
            CHECK(r1 * r1 <= bound + 1e-9);
            CHECK(cap.profile.d2(t) / v <= bound + 1e-9);
        }
        // Linearity in ell: the cap at scale ell matches the scaled unit cap.
        CuspCap unit = cusp_cap_profile(1.0, delta);
        CHECK(cap.params.ell_prime ==
              doctest::Approx(ell * unit.params.ell_prime).epsilon(1e-12));
    }
}
