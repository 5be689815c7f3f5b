#include <doctest.h>

#include "minent/rng.hpp"
#include "minent/wedge.hpp"

#include <cmath>

using namespace minent;

namespace {

PointRef random_point(const WedgeSpace& X, Rng& rng) {
    const int li = int(rng.next_u64() % std::uint64_t(X.leaf_count()));
    const Leaf& l = X.leaf(li);
    switch (l.kind()) {
        case Leaf::Kind::Euclidean:
            return {li, {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}};
        case Leaf::Kind::Hyperbolic: {
            const double r = 0.95 * std::sqrt(rng.uniform());
            const double th = rng.uniform(0.0, 6.283185307179586);
            return {li, {r * std::cos(th), r * std::sin(th)}};
        }
        case Leaf::Kind::Segment:
            return {li, {rng.uniform(0.0, l.segment_length()), 0.0}};
    }
    return {li, {0.0, 0.0}};
}

} // namespace

TEST_CASE("hyperbolic leaf distance basics") {
    Leaf h = Leaf::hyperbolic();
    // d(0, r) = log((1+r)/(1-r))
    for (double r : {0.1, 0.5, 0.9}) {
        CHECK(h.distance({0, 0}, {r, 0}) ==
              doctest::Approx(std::log((1 + r) / (1 - r))).epsilon(1e-12));
    }
    // symmetry and triangle inequality on random triples
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        auto rand_pt = [&]() -> Vec2 {
            const double r = 0.95 * std::sqrt(rng.uniform());
            const double th = rng.uniform(0.0, 6.283185307179586);
            return {r * std::cos(th), r * std::sin(th)};
        };
        const Vec2 a = rand_pt(), b = rand_pt(), c = rand_pt();
        CHECK(h.distance(a, b) == doctest::Approx(h.distance(b, a)).epsilon(1e-12));
        CHECK(h.distance(a, c) <= h.distance(a, b) + h.distance(b, c) + 1e-11);
    }
}

TEST_CASE("hyperbolic exp/log are mutually inverse and geodesics have constant speed") {
    Leaf h = Leaf::hyperbolic();
    Rng rng(6);
    for (int i = 0; i < 500; ++i) {
        const double r1 = 0.9 * std::sqrt(rng.uniform());
        const double t1 = rng.uniform(0.0, 6.283185307179586);
        const double r2 = 0.9 * std::sqrt(rng.uniform());
        const double t2 = rng.uniform(0.0, 6.283185307179586);
        const Vec2 a{r1 * std::cos(t1), r1 * std::sin(t1)};
        const Vec2 b{r2 * std::cos(t2), r2 * std::sin(t2)};
        const Vec2 back = h.exp_map(a, h.log_map(a, b));
        CHECK(norm(back - b) <= 1e-10);
        const double d = h.distance(a, b);
        for (double t : {0.25, 0.5, 0.75}) {
            const Vec2 m = h.geodesic(a, b, t);
            CHECK(h.distance(a, m) == doctest::Approx(t * d).epsilon(1e-9));
        }
    }
}

TEST_CASE("wedge distances through hubs") {
    WedgeSpace two = two_planes_fixture();
    CHECK(two.distance({0, {0, 0}}, {0, {3, 4}}) == doctest::Approx(5.0));
    CHECK(two.distance({0, {1, 0}}, {1, {1, 0}}) == doctest::Approx(2.0));

    WedgeSpace chain = chain_fixture();
    // endpoints at distance 1 from their hubs: 1 + 2 + 1 = 4
    CHECK(chain.distance({0, {1, 0}}, {2, {1, 0}}) == doctest::Approx(4.0));
}

TEST_CASE("wedge geodesics: endpoints, hubs, constant speed") {
    WedgeSpace two = two_planes_fixture();
    const PointRef a{0, {-1, 0}};
    const PointRef b{0, {1, 0}};
    const PointRef mid = two.geodesic(a, b, 0.5);
    CHECK(mid.leaf == 0);
    CHECK(norm(mid.p - Vec2{0, 0}) <= 1e-12);

    // midpoint across glued planes, endpoints 1 from the hub: the hub
    const PointRef x{0, {1, 0}};
    const PointRef y{1, {0, 1}};
    const PointRef m = two.geodesic(x, y, 0.5);
    CHECK(two.distance(m, {0, {0, 0}}) <= 1e-12);

    Rng rng(8);
    const double d = two.distance(x, y);
    for (int i = 0; i < 100; ++i) {
        const double t = rng.uniform();
        const PointRef g = two.geodesic(x, y, t);
        CHECK(two.distance(x, g) == doctest::Approx(t * d).epsilon(1e-10));
    }
}

TEST_CASE("wedge rejects non-tree gluings") {
    // Two hubs joining the same two planes create a cycle.
    std::vector<Leaf> leaves{Leaf::euclidean(), Leaf::euclidean()};
    HubSpec h1;
    h1.marks = {{0, {0, 0}}, {1, {0, 0}}};
    HubSpec h2;
    h2.marks = {{0, {1, 0}}, {1, {1, 0}}};
    CHECK_THROWS_AS(WedgeSpace(leaves, {h1, h2}), InvalidParameter);

    // Disconnected: two planes, no hub.
    CHECK_THROWS_AS(WedgeSpace({Leaf::euclidean(), Leaf::euclidean()}, {}), InvalidParameter);
}

TEST_CASE("euclidean median identity") {
    MedianIdentity id = euclid_median_identity({0, 1}, {-1, 0}, {1, 0}, {0, 0});
    CHECK(id.lhs == doctest::Approx(2.0));
    CHECK(id.rhs == doctest::Approx(2.0));

    // Endpoint case M = B.
    MedianIdentity end = euclid_median_identity({2, 3}, {-1, 0}, {1, 0}, {-1, 0});
    CHECK(end.lhs == doctest::Approx(end.rhs).epsilon(1e-13));

    // Random triangles: identity to 1e-12 relative.
    Rng rng(10);
    for (int i = 0; i < 20000; ++i) {
        const Vec2 A{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        const Vec2 B{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        Vec2 C{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        if (norm(C - B) < 1e-6) C.x += 1.0;
        const double t = rng.uniform();
        const Vec2 M = B + t * (C - B);
        const MedianIdentity m = euclid_median_identity(A, B, C, M);
        CHECK(std::abs(m.lhs - m.rhs) <= 1e-12 * std::max({1.0, m.lhs, m.rhs}));
    }

    CHECK_THROWS_AS(euclid_median_identity({0, 1}, {1, 1}, {1, 1}, {1, 1}), InvalidParameter);
    CHECK_THROWS_AS(euclid_median_identity({0, 1}, {-1, 0}, {1, 0}, {0, 1}), InvalidParameter);
}

TEST_CASE("comparison inequality on the bundled fixtures") {
    Rng rng(11);

    // Single Euclidean leaf: equality within 1e-12.
    WedgeSpace flat = single_euclidean_fixture();
    for (int i = 0; i < 3000; ++i) {
        const PointRef a = random_point(flat, rng);
        const PointRef b = random_point(flat, rng);
        const PointRef c = random_point(flat, rng);
        const double t = rng.uniform();
        const double dbc = flat.distance(b, c);
        if (dbc < 1e-9) continue;
        const PointRef m = flat.geodesic(b, c, t);
        const double lhs = std::pow(flat.distance(a, m), 2) + flat.distance(m, b) * flat.distance(c, m);
        const double rhs = std::pow(flat.distance(a, b), 2) * flat.distance(c, m) / dbc +
                           std::pow(flat.distance(a, c), 2) * flat.distance(b, m) / dbc;
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max({1.0, lhs, rhs}));
    }

    // Hyperbolic leaf: the inequality holds (and is strict for fat triangles).
    WedgeSpace hyp = single_hyperbolic_fixture();
    for (int i = 0; i < 3000; ++i) {
        CHECK(comparison_check(hyp, random_point(hyp, rng), random_point(hyp, rng),
                               random_point(hyp, rng), rng.uniform()));
    }
    // Strictness sample: a fat ideal-ish triangle.
    {
        const PointRef a{0, {0.0, 0.8}};
        const PointRef b{0, {-0.8, -0.4}};
        const PointRef c{0, {0.8, -0.4}};
        const PointRef m = hyp.geodesic(b, c, 0.5);
        const double dbc = hyp.distance(b, c);
        const double lhs =
            std::pow(hyp.distance(a, m), 2) + hyp.distance(m, b) * hyp.distance(c, m);
        const double rhs = std::pow(hyp.distance(a, b), 2) * hyp.distance(c, m) / dbc +
                           std::pow(hyp.distance(a, c), 2) * hyp.distance(b, m) / dbc;
        CHECK(lhs < rhs - 1e-6);
    }

    // Tripod spanning three leaves.
    WedgeSpace tri = tripod_fixture(3.0);
    for (int i = 0; i < 3000; ++i) {
        CHECK(comparison_check(tri, random_point(tri, rng), random_point(tri, rng),
                               random_point(tri, rng), rng.uniform()));
    }
}

TEST_CASE("wedge distance axioms on random triples across fixtures") {
    Rng rng(12);
    for (const WedgeSpace& X :
         {two_planes_fixture(), chain_fixture(), tripod_fixture(2.0)}) {
        for (int i = 0; i < 2000; ++i) {
            const PointRef a = random_point(X, rng);
            const PointRef b = random_point(X, rng);
            const PointRef c = random_point(X, rng);
            CHECK(X.distance(a, b) == doctest::Approx(X.distance(b, a)).epsilon(1e-12));
            CHECK(X.distance(a, c) <= X.distance(a, b) + X.distance(b, c) + 1e-9);
            CHECK(X.distance(a, a) == 0.0);
        }
    }
}

TEST_CASE("leibniz function basics") {
    WedgeSpace flat = single_euclidean_fixture();
    PointedMeasure mu;
    mu.atoms = {{{0, {1, 0}}, 1.0}, {{0, {-1, 0}}, 1.0}};
    CHECK(leibniz(flat, mu, {0, {0, 0}}) == doctest::Approx(2.0));

    PointedMeasure single;
    single.atoms = {{{0, {0.3, -0.7}}, 2.5}};
    CHECK(leibniz(flat, single, {0, {0.3, -0.7}}) == doctest::Approx(0.0));

    PointedMeasure empty;
    CHECK_THROWS_AS(leibniz(flat, empty, {0, {0, 0}}), InvalidParameter);

    // Translation consistency in a Euclidean leaf.
    Rng rng(13);
    for (int i = 0; i < 50; ++i) {
        const Vec2 shift{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        PointedMeasure shifted = mu;
        for (auto& atom : shifted.atoms) atom.point.p = atom.point.p + shift;
        const Vec2 x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        CHECK(leibniz(flat, mu, {0, x}) ==
              doctest::Approx(leibniz(flat, shifted, {0, x + shift})).epsilon(1e-12));
    }
}

TEST_CASE("barycenter: euclidean weighted mean") {
    WedgeSpace flat = single_euclidean_fixture();
    PointedMeasure mu;
    mu.atoms = {{{0, {0, 0}}, 1.0}, {{0, {2, 0}}, 1.0}};
    BarycenterResult res = barycenter(flat, mu);
    CHECK(res.converged);
    CHECK(norm(res.point.p - Vec2{1, 0}) <= 1e-9);

    PointedMeasure weighted;
    weighted.atoms = {{{0, {0, 0}}, 1.0}, {{0, {3, 3}}, 2.0}, {{0, {-3, 6}}, 3.0}};
    BarycenterResult wres = barycenter(flat, weighted);
    const Vec2 mean = (1.0 / 6.0) * (1.0 * Vec2{0, 0} + 2.0 * Vec2{3, 3} + 3.0 * Vec2{-3, 6});
    CHECK(wres.converged);
    CHECK(norm(wres.point.p - mean) <= 1e-9);
    CHECK(wres.certificate <= 1e-8);
}

TEST_CASE("barycenter: tripod tips meet at the hub") {
    WedgeSpace tri = tripod_fixture(1.0);
    PointedMeasure mu;
    mu.atoms = {{{0, {1, 0}}, 1.0}, {{1, {1, 0}}, 1.0}, {{2, {1, 0}}, 1.0}};
    BarycenterResult res = barycenter(tri, mu);
    CHECK(res.converged);
    CHECK(tri.distance(res.point, {0, {0, 0}}) <= 1e-8);
    CHECK(res.value == doctest::Approx(3.0));
}

TEST_CASE("barycenter: two planes with unit masses at distance 1 from the hub") {
    WedgeSpace two = two_planes_fixture();
    PointedMeasure mu;
    mu.atoms = {{{0, {1, 0}}, 1.0}, {{1, {0.6, 0.8}}, 1.0}};
    BarycenterResult res = barycenter(two, mu);
    CHECK(res.converged);
    CHECK(two.distance(res.point, {0, {0, 0}}) <= 1e-8);
    CHECK(res.value == doctest::Approx(2.0));
}

TEST_CASE("barycenter: hyperbolic two-point measure lands at the geodesic midpoint") {
    WedgeSpace hyp = single_hyperbolic_fixture();
    PointedMeasure mu;
    mu.atoms = {{{0, {0.7, 0.1}}, 1.0}, {{0, {-0.5, 0.4}}, 1.0}};
    BarycenterResult res = barycenter(hyp, mu);
    const PointRef mid = hyp.geodesic(mu.atoms[0].point, mu.atoms[1].point, 0.5);
    CHECK(res.converged);
    CHECK(hyp.distance(res.point, mid) <= 1e-7);
}

TEST_CASE("barycenter: restart agreement and equivariance") {
    WedgeSpace flat = single_euclidean_fixture();
    Rng rng(14);
    PointedMeasure mu;
    for (int i = 0; i < 7; ++i)
        mu.atoms.push_back({{0, {rng.uniform(-2, 2), rng.uniform(-2, 2)}}, rng.uniform(0.2, 2.0)});

    BarycenterOptions o1;
    BarycenterOptions o2;
    o2.init = PointRef{0, {5.0, -7.0}};
    o2.seed = 999;
    const BarycenterResult r1 = barycenter(flat, mu, o1);
    const BarycenterResult r2 = barycenter(flat, mu, o2);
    CHECK(flat.distance(r1.point, r2.point) <= 10.0 * o1.tol);

    // Equivariance under a Euclidean isometry.
    const double th = 0.77;
    const Vec2 tr{0.3, -1.1};
    auto iso = [&](Vec2 p) -> Vec2 {
        return {std::cos(th) * p.x - std::sin(th) * p.y + tr.x,
                std::sin(th) * p.x + std::cos(th) * p.y + tr.y};
    };
    PointedMeasure moved = mu;
    for (auto& atom : moved.atoms) atom.point.p = iso(atom.point.p);
    const BarycenterResult r3 = barycenter(flat, moved, o1);
    CHECK(norm(r3.point.p - iso(r1.point.p)) <= 10.0 * o1.tol);
}

TEST_CASE("barycenter certificate holds on dense validation") {
    WedgeSpace tri = tripod_fixture(2.0);
    PointedMeasure mu;
    mu.atoms = {{{0, {1.7, 0}}, 0.7}, {{1, {0.4, 0}}, 1.3}, {{2, {1.9, 0}}, 1.0}};
    BarycenterOptions opts;
    opts.tol = 1e-7;
    BarycenterResult res = barycenter(tri, mu, opts);
    CHECK(res.converged);
    // Independent re-validation with a fresh sample stream.
    Rng rng(404);
    const double W = mu.total_mass();
    for (int i = 0; i < 1000; ++i) {
        const PointRef x = random_point(tri, rng);
        const double gap = leibniz(tri, mu, x) - res.value;
        CHECK(W * std::pow(tri.distance(res.point, x), 2) <= gap + 1e-7);
    }
}

TEST_CASE("wedge rejects coincident marked points in one leaf") {
    std::vector<Leaf> leaves{Leaf::euclidean(), Leaf::euclidean(), Leaf::euclidean()};
    HubSpec h1;
    h1.marks = {{0, {0, 0}}, {1, {0, 0}}};
    HubSpec h2;
    h2.marks = {{1, {0, 0}}, {2, {0, 0}}}; // same point in leaf 1 as h1
    CHECK_THROWS_AS(WedgeSpace(leaves, {h1, h2}), InvalidParameter);
}

TEST_CASE("chain geodesic is constant speed across two hubs") {
    WedgeSpace chain = chain_fixture();
    const PointRef x{0, {1.0, 0.5}};
    const PointRef y{2, {0.5, -1.0}};
    const double d = chain.distance(x, y);
    Rng rng(21);
    for (int i = 0; i < 200; ++i) {
        const double t = rng.uniform();
        const PointRef g = chain.geodesic(x, y, t);
        CHECK(chain.distance(x, g) == doctest::Approx(t * d).epsilon(1e-9));
        CHECK(chain.distance(g, y) == doctest::Approx((1.0 - t) * d).epsilon(1e-9));
    }
}

TEST_CASE("barycenter on a mixed hyperbolic/euclidean/segment wedge") {
    // hyperbolic disk - hub at its origin - euclidean plane - hub - segment
    std::vector<Leaf> leaves{Leaf::hyperbolic(), Leaf::euclidean(), Leaf::segment(2.0)};
    HubSpec h1;
    h1.marks = {{0, {0.0, 0.0}}, {1, {0.0, 0.0}}};
    HubSpec h2;
    h2.marks = {{1, {1.5, 0.0}}, {2, {0.0, 0.0}}};
    WedgeSpace X(leaves, {h1, h2});

    PointedMeasure mu;
    mu.atoms = {{{0, {0.4, 0.2}}, 1.0}, {{1, {-0.5, 0.7}}, 1.3}, {{2, {1.2, 0.0}}, 0.8}};
    BarycenterOptions opts;
    opts.tol = 1e-7;
    const BarycenterResult res = barycenter(X, mu, opts);
    CHECK(res.converged);
    CHECK(res.certificate <= opts.tol);

    // Independent validation with a fresh stream, including the comparison
    // inequality across the same fixture.
    Rng rng(515);
    const double W = mu.total_mass();
    for (int i = 0; i < 2000; ++i) {
        const PointRef x = random_point(X, rng);
        const double gap = leibniz(X, mu, x) - res.value;
        CHECK(W * std::pow(X.distance(res.point, x), 2) <= gap + 1e-6);
        CHECK(comparison_check(X, random_point(X, rng), random_point(X, rng),
                               random_point(X, rng), rng.uniform()));
    }

    // Restart from a far corner of the hyperbolic leaf agrees.
    BarycenterOptions alt = opts;
    alt.init = PointRef{0, {-0.9, 0.1}};
    alt.seed = 4242;
    const BarycenterResult res2 = barycenter(X, mu, alt);
    CHECK(X.distance(res.point, res2.point) <= 10.0 * opts.tol);
}
