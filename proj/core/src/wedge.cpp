#include "minent/wedge.hpp"

#include "minent/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <sstream>

namespace minent {

// ---------------------------------------------------------------------------
// Leaves

Leaf Leaf::euclidean() { return Leaf(Kind::Euclidean, 0.0); }
Leaf Leaf::hyperbolic() { return Leaf(Kind::Hyperbolic, 0.0); }
Leaf Leaf::segment(double len) {
    if (!(len > 0.0)) throw InvalidParameter("Leaf::segment: length must be positive");
    return Leaf(Kind::Segment, len);
}

bool Leaf::contains(Vec2 p) const {
    switch (kind_) {
        case Kind::Euclidean: return true;
        case Kind::Hyperbolic: return p.x * p.x + p.y * p.y < 1.0;
        case Kind::Segment: return p.x >= -1e-12 && p.x <= len_ + 1e-12 && std::abs(p.y) <= 1e-12;
    }
    return false;
}

namespace {

using Cx = std::complex<double>;

Cx to_cx(Vec2 v) { return {v.x, v.y}; }
Vec2 to_vec(Cx z) { return {z.real(), z.imag()}; }

// Moebius translation taking u to the origin and its inverse.
Cx moebius_to_origin(Cx u, Cx w) { return (w - u) / (1.0 - std::conj(u) * w); }
Cx moebius_from_origin(Cx u, Cx w) { return (w + u) / (1.0 + std::conj(u) * w); }

double disk_distance(Vec2 a, Vec2 b) {
    const double aa = a.x * a.x + a.y * a.y;
    const double bb = b.x * b.x + b.y * b.y;
    const double dd = (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
    const double arg = 1.0 + 2.0 * dd / ((1.0 - aa) * (1.0 - bb));
    return std::acosh(std::max(1.0, arg));
}

} // namespace

double Leaf::distance(Vec2 a, Vec2 b) const {
    switch (kind_) {
        case Kind::Euclidean: return norm(a - b);
        case Kind::Hyperbolic: return disk_distance(a, b);
        case Kind::Segment: return std::abs(a.x - b.x);
    }
    return 0.0;
}

Vec2 Leaf::log_map(Vec2 base, Vec2 target) const {
    switch (kind_) {
        case Kind::Euclidean:
        case Kind::Segment:
            return target - base;
        case Kind::Hyperbolic: {
            const Cx u = to_cx(base);
            const Cx w = moebius_to_origin(u, to_cx(target));
            const double aw = std::abs(w);
            if (aw == 0.0) return {0.0, 0.0};
            const double d = disk_distance(base, target);
            // Chart vector with hyperbolic norm d: |xi|_hyp = 2|xi|/(1-|u|^2).
            const double chart_len = d * (1.0 - std::norm(u)) / 2.0;
            const Cx dir = w / aw;
            return to_vec(chart_len * dir);
        }
    }
    return {0.0, 0.0};
}

Vec2 Leaf::exp_map(Vec2 base, Vec2 v) const {
    switch (kind_) {
        case Kind::Euclidean:
            return base + v;
        case Kind::Segment: {
            const double x = std::clamp(base.x + v.x, 0.0, len_);
            return {x, 0.0};
        }
        case Kind::Hyperbolic: {
            const double nv = norm(v);
            if (nv == 0.0) return base;
            const Cx u = to_cx(base);
            const double s = 2.0 * nv / (1.0 - std::norm(u)); // hyperbolic step length
            const Cx dir = to_cx(v) / nv;
            const Cx w = std::tanh(0.5 * s) * dir;
            return to_vec(moebius_from_origin(u, w));
        }
    }
    return base;
}

Vec2 Leaf::geodesic(Vec2 a, Vec2 b, double t) const {
    switch (kind_) {
        case Kind::Euclidean:
        case Kind::Segment:
            return a + t * (b - a);
        case Kind::Hyperbolic:
            return exp_map(a, t * log_map(a, b));
    }
    return a;
}

// ---------------------------------------------------------------------------
// Wedge space

double PointedMeasure::total_mass() const {
    double w = 0.0;
    for (const auto& a : atoms) w += a.weight;
    return w;
}

struct WedgeSpace::Impl {
    std::vector<Leaf> leaves;
    std::vector<HubSpec> hubs;

    struct Leg {
        int leaf;
        Vec2 from;
        Vec2 to;
        double length;
    };
    struct Path {
        Vec2 entry;           // marked point in the source leaf
        Vec2 exit;            // marked point in the target leaf
        double mid = 0.0;     // total length of the intermediate legs
        std::vector<Leg> legs;
    };
    // path[f][g] for f != g
    std::vector<std::vector<Path>> paths;

    Vec2 mark_of(int hub, int leaf) const {
        for (const auto& [l, p] : hubs[std::size_t(hub)].marks)
            if (l == leaf) return p;
        throw PreconditionError("wedge: hub has no mark in the requested leaf");
    }
};

WedgeSpace::WedgeSpace(std::vector<Leaf> leaves, std::vector<HubSpec> hubs) {
    if (leaves.empty()) throw InvalidParameter("wedge: needs at least one leaf");
    auto impl = std::make_shared<Impl>();
    impl->leaves = std::move(leaves);
    impl->hubs = std::move(hubs);

    const int nl = int(impl->leaves.size());
    const int nh = int(impl->hubs.size());

    // Validate marks and the distinctness of marked points per leaf.
    std::vector<std::vector<std::pair<int, Vec2>>> marks_in_leaf(static_cast<std::size_t>(nl));
    for (int h = 0; h < nh; ++h) {
        const auto& marks = impl->hubs[std::size_t(h)].marks;
        if (marks.empty()) throw InvalidParameter("wedge: hub with no incident leaves");
        std::vector<int> seen;
        for (const auto& [l, p] : marks) {
            if (l < 0 || l >= nl) throw InvalidParameter("wedge: hub mark in unknown leaf");
            if (!impl->leaves[std::size_t(l)].contains(p))
                throw InvalidParameter("wedge: hub mark outside its leaf");
            if (std::find(seen.begin(), seen.end(), l) != seen.end())
                throw InvalidParameter("wedge: hub marks one leaf twice");
            seen.push_back(l);
            marks_in_leaf[std::size_t(l)].push_back({h, p});
        }
    }
    for (int l = 0; l < nl; ++l) {
        const auto& ms = marks_in_leaf[std::size_t(l)];
        for (std::size_t i = 0; i < ms.size(); ++i)
            for (std::size_t j = i + 1; j < ms.size(); ++j)
                if (impl->leaves[std::size_t(l)].distance(ms[i].second, ms[j].second) <= 0.0)
                    throw InvalidParameter("wedge: marked points in one leaf must be distinct");
    }

    // The gluing graph (bipartite on leaves and hubs) must be a tree.
    const int nodes = nl + nh;
    int edges = 0;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(nodes));
    for (int h = 0; h < nh; ++h) {
        for (const auto& [l, p] : impl->hubs[std::size_t(h)].marks) {
            adj[std::size_t(l)].push_back(nl + h);
            adj[std::size_t(nl + h)].push_back(l);
            ++edges;
        }
    }
    std::vector<int> parent(std::size_t(nodes), -2);
    std::queue<int> bfs;
    bfs.push(0);
    parent[0] = -1;
    int reached = 0;
    while (!bfs.empty()) {
        const int v = bfs.front();
        bfs.pop();
        ++reached;
        for (int w : adj[std::size_t(v)]) {
            if (parent[std::size_t(w)] == -2) {
                parent[std::size_t(w)] = v;
                bfs.push(w);
            }
        }
    }
    if (reached != nodes) throw InvalidParameter("wedge: gluing graph must be connected");
    if (edges != nodes - 1) throw InvalidParameter("wedge: gluing graph must be a tree");

    // Precompute leaf-to-leaf paths by BFS from every leaf.
    impl->paths.assign(std::size_t(nl), std::vector<Impl::Path>(std::size_t(nl)));
    for (int src = 0; src < nl; ++src) {
        std::vector<int> par(std::size_t(nodes), -2);
        std::queue<int> q;
        q.push(src);
        par[std::size_t(src)] = -1;
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int w : adj[std::size_t(v)]) {
                if (par[std::size_t(w)] == -2) {
                    par[std::size_t(w)] = v;
                    q.push(w);
                }
            }
        }
        for (int dst = 0; dst < nl; ++dst) {
            if (dst == src || par[std::size_t(dst)] == -2) continue;
            // Reconstruct src -> dst alternating leaf, hub, leaf, ...
            std::vector<int> chain;
            for (int v = dst; v != -1; v = par[std::size_t(v)]) chain.push_back(v);
            std::reverse(chain.begin(), chain.end()); // src ... dst
            Impl::Path path;
            path.entry = impl->mark_of(chain[1] - nl, src);
            path.exit = impl->mark_of(chain[chain.size() - 2] - nl, dst);
            for (std::size_t i = 2; i + 1 < chain.size(); i += 2) {
                const int leaf = chain[i];
                const int hub_in = chain[i - 1] - nl;
                const int hub_out = chain[i + 1] - nl;
                Impl::Leg leg;
                leg.leaf = leaf;
                leg.from = impl->mark_of(hub_in, leaf);
                leg.to = impl->mark_of(hub_out, leaf);
                leg.length = impl->leaves[std::size_t(leaf)].distance(leg.from, leg.to);
                path.mid += leg.length;
                path.legs.push_back(leg);
            }
            impl->paths[std::size_t(src)][std::size_t(dst)] = std::move(path);
        }
    }
    impl_ = std::move(impl);
}

int WedgeSpace::leaf_count() const { return int(impl_->leaves.size()); }
const Leaf& WedgeSpace::leaf(int i) const { return impl_->leaves[std::size_t(i)]; }
int WedgeSpace::hub_count() const { return int(impl_->hubs.size()); }

PointRef WedgeSpace::hub_ref(int h) const {
    const auto& [l, p] = impl_->hubs[std::size_t(h)].marks.front();
    return {l, p};
}

void WedgeSpace::validate(const PointRef& p) const {
    if (p.leaf < 0 || p.leaf >= leaf_count())
        throw InvalidParameter("wedge: point refers to an unknown leaf");
    if (!leaf(p.leaf).contains(p.p))
        throw InvalidParameter("wedge: point coordinates outside its leaf");
}

double WedgeSpace::distance(PointRef a, PointRef b) const {
    validate(a);
    validate(b);
    if (a.leaf == b.leaf) return leaf(a.leaf).distance(a.p, b.p);
    const auto& path = impl_->paths[std::size_t(a.leaf)][std::size_t(b.leaf)];
    return leaf(a.leaf).distance(a.p, path.entry) + path.mid +
           leaf(b.leaf).distance(path.exit, b.p);
}

WedgeSpace::Projection WedgeSpace::project(int leaf_index, const PointRef& z) const {
    validate(z);
    if (leaf_index == z.leaf) return {z.p, 0.0};
    const auto& path = impl_->paths[std::size_t(leaf_index)][std::size_t(z.leaf)];
    return {path.entry, path.mid + leaf(z.leaf).distance(path.exit, z.p)};
}

PointRef WedgeSpace::geodesic(PointRef a, PointRef b, double t) const {
    validate(a);
    validate(b);
    t = std::clamp(t, 0.0, 1.0);
    if (a.leaf == b.leaf) {
        return {a.leaf, leaf(a.leaf).geodesic(a.p, b.p, t)};
    }
    const auto& path = impl_->paths[std::size_t(a.leaf)][std::size_t(b.leaf)];
    const double d_in = leaf(a.leaf).distance(a.p, path.entry);
    const double d_out = leaf(b.leaf).distance(path.exit, b.p);
    const double total = d_in + path.mid + d_out;
    if (total == 0.0) return a;
    double s = t * total;
    if (s <= d_in) {
        const double local = d_in == 0.0 ? 0.0 : s / d_in;
        return {a.leaf, leaf(a.leaf).geodesic(a.p, path.entry, local)};
    }
    s -= d_in;
    for (const auto& leg : path.legs) {
        if (s <= leg.length) {
            const double local = leg.length == 0.0 ? 0.0 : s / leg.length;
            return {leg.leaf, leaf(leg.leaf).geodesic(leg.from, leg.to, local)};
        }
        s -= leg.length;
    }
    const double local = d_out == 0.0 ? 1.0 : std::min(1.0, s / d_out);
    return {b.leaf, leaf(b.leaf).geodesic(path.exit, b.p, local)};
}

// ---------------------------------------------------------------------------
// Comparison machinery

MedianIdentity euclid_median_identity(Vec2 A, Vec2 B, Vec2 C, Vec2 M) {
    const double bc = norm(C - B);
    if (bc == 0.0) throw InvalidParameter("euclid_median_identity: degenerate side BC");
    // M must lie on [B, C].
    const double cross = (C.x - B.x) * (M.y - B.y) - (C.y - B.y) * (M.x - B.x);
    const double along = dot(M - B, C - B) / (bc * bc);
    if (std::abs(cross) > 1e-9 * std::max(1.0, bc) || along < -1e-12 || along > 1.0 + 1e-12)
        throw InvalidParameter("euclid_median_identity: M must lie on segment BC");

    const double am = norm(M - A);
    const double bm = norm(M - B);
    const double cm = norm(M - C);
    const double ab = norm(B - A);
    const double ac = norm(C - A);
    MedianIdentity out;
    out.lhs = am * am + bm * cm;
    out.rhs = ab * ab * cm / bc + ac * ac * bm / bc;
    return out;
}

bool comparison_check(const WedgeSpace& X, PointRef a, PointRef b, PointRef c, double t,
                      double tol) {
    const double dbc = X.distance(b, c);
    if (dbc == 0.0) return true;
    const PointRef m = X.geodesic(b, c, t);
    const double dam = X.distance(a, m);
    const double dmb = X.distance(m, b);
    const double dcm = X.distance(c, m);
    const double dab = X.distance(a, b);
    const double dac = X.distance(a, c);
    const double lhs = dam * dam + dmb * dcm;
    const double rhs = dab * dab * dcm / dbc + dac * dac * dmb / dbc;
    return lhs <= rhs + tol;
}

double leibniz(const WedgeSpace& X, const PointedMeasure& mu, const PointRef& x) {
    if (mu.atoms.empty()) throw InvalidParameter("leibniz: empty measure");
    double total = 0.0;
    for (const auto& atom : mu.atoms) {
        if (!(atom.weight > 0.0)) throw InvalidParameter("leibniz: weights must be positive");
        const double d = X.distance(x, atom.point);
        total += atom.weight * d * d;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Barycenter solver

namespace {

struct LeafProblem {
    const Leaf* leaf;
    // d(x, z_i) = d_leaf(x, p_i) + k_i
    std::vector<Vec2> points;
    std::vector<double> weights;
    std::vector<double> offsets;

    double value(Vec2 x) const {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double d = leaf->distance(x, points[i]) + offsets[i];
            total += weights[i] * d * d;
        }
        return total;
    }

    Vec2 gradient(Vec2 x) const {
        Vec2 g{0.0, 0.0};
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double d = leaf->distance(x, points[i]);
            if (d == 0.0) continue; // cone point of a (d + k)^2 term
            const Vec2 lg = leaf->log_map(x, points[i]);
            const double scale = -2.0 * weights[i] * (d + offsets[i]) / d;
            g = g + scale * lg;
        }
        return g;
    }
};

Vec2 descend(const LeafProblem& prob, Vec2 x0, double mass, int budget, double grad_tol,
             int* used) {
    Vec2 x = x0;
    double fx = prob.value(x);
    double step0 = 1.0 / (2.0 * mass);
    for (int it = 0; it < budget; ++it) {
        const Vec2 g = prob.gradient(x);
        if (used) *used = it + 1;
        if (norm(g) <= grad_tol) break;
        double step = step0;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            const Vec2 cand = prob.leaf->exp_map(x, -step * g);
            const double fc = prob.value(cand);
            if (fc < fx - 0.25 * step * dot(g, g)) {
                x = cand;
                fx = fc;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return x;
}

} // namespace

BarycenterResult barycenter(const WedgeSpace& X, const PointedMeasure& mu,
                            const BarycenterOptions& opts) {
    if (mu.atoms.empty()) throw InvalidParameter("barycenter: empty measure");
    for (const auto& atom : mu.atoms) {
        X.validate(atom.point);
        if (!(atom.weight > 0.0)) throw InvalidParameter("barycenter: weights must be positive");
    }
    const double mass = mu.total_mass();

    // Candidate pool: hubs, atoms, per-leaf smooth minimizers.
    std::vector<PointRef> candidates;
    for (int h = 0; h < X.hub_count(); ++h) candidates.push_back(X.hub_ref(h));
    for (const auto& atom : mu.atoms) candidates.push_back(atom.point);
    if (opts.init) {
        X.validate(*opts.init);
        candidates.push_back(*opts.init);
    }

    int iterations = 0;
    auto solve_leaf = [&](int li, Vec2 start, double grad_tol) {
        LeafProblem prob;
        prob.leaf = &X.leaf(li);
        for (const auto& atom : mu.atoms) {
            const auto proj = X.project(li, atom.point);
            prob.points.push_back(proj.entry);
            prob.weights.push_back(atom.weight);
            prob.offsets.push_back(proj.offset);
        }
        int used = 0;
        const Vec2 x = descend(prob, start, mass, opts.descent_iterations, grad_tol, &used);
        iterations += used;
        return PointRef{li, x};
    };

    // Initial per-leaf starts: the best existing candidate inside the leaf,
    // or the leaf's first hub projection.
    auto leaf_start = [&](int li) -> Vec2 {
        const PointRef* best = nullptr;
        double best_val = std::numeric_limits<double>::infinity();
        for (const auto& c : candidates) {
            if (c.leaf != li) continue;
            const double v = leibniz(X, mu, c);
            if (v < best_val) {
                best_val = v;
                best = &c;
            }
        }
        if (best) return best->p;
        return X.project(li, mu.atoms.front().point).entry;
    };

    double grad_tol = opts.tol * 1e-2;
    BarycenterResult out;
    out.point = candidates.front();

    Rng rng(opts.seed);
    for (int round = 0; round < opts.max_rounds; ++round) {
        std::vector<PointRef> pool = candidates;
        for (int li = 0; li < X.leaf_count(); ++li) {
            Vec2 start = leaf_start(li);
            if (round > 0 && out.point.leaf == li) start = out.point.p;
            pool.push_back(solve_leaf(li, start, grad_tol));
        }

        PointRef best = pool.front();
        double best_val = leibniz(X, mu, best);
        for (const auto& c : pool) {
            const double v = leibniz(X, mu, c);
            if (v < best_val) {
                best_val = v;
                best = c;
            }
        }

        // Uniqueness certificate on validation samples: atoms, hubs and
        // random perturbations of the candidate at three scales.
        double cert = 0.0;
        PointRef challenger = best;
        double challenger_val = best_val;
        auto consider = [&](const PointRef& x) {
            const double bx = leibniz(X, mu, x);
            const double d = X.distance(best, x);
            cert = std::max(cert, d * d * mass - (bx - best_val));
            if (bx < challenger_val) {
                challenger_val = bx;
                challenger = x;
            }
        };
        for (const auto& atom : mu.atoms) consider(atom.point);
        for (int h = 0; h < X.hub_count(); ++h) consider(X.hub_ref(h));
        const Leaf& bl = X.leaf(best.leaf);
        const double scales[3] = {0.01, 0.1, 1.0};
        for (int i = 0; i < opts.validation_samples; ++i) {
            const double scale = scales[i % 3];
            const double angle = rng.uniform(0.0, 6.283185307179586);
            const double radius = scale * rng.uniform();
            const Vec2 step{radius * std::cos(angle), radius * std::sin(angle)};
            consider({best.leaf, bl.exp_map(best.p, step)});
        }

        out.point = best;
        out.value = best_val;
        out.certificate = cert;
        out.iterations = iterations;
        if (cert <= opts.tol) {
            out.converged = true;
            return out;
        }
        // Tighten and, if a validation point won, restart from it.
        grad_tol *= 0.1;
        if (challenger_val < best_val) candidates.push_back(challenger);
    }
    out.converged = out.certificate <= opts.tol;
    return out;
}

// ---------------------------------------------------------------------------
// Fixtures

WedgeSpace single_euclidean_fixture() {
    return WedgeSpace({Leaf::euclidean()}, {});
}

WedgeSpace single_hyperbolic_fixture() {
    return WedgeSpace({Leaf::hyperbolic()}, {});
}

WedgeSpace tripod_fixture(double leg_length) {
    std::vector<Leaf> leaves{Leaf::segment(leg_length), Leaf::segment(leg_length),
                             Leaf::segment(leg_length)};
    HubSpec hub;
    hub.marks = {{0, {0.0, 0.0}}, {1, {0.0, 0.0}}, {2, {0.0, 0.0}}};
    return WedgeSpace(std::move(leaves), {hub});
}

WedgeSpace two_planes_fixture() {
    std::vector<Leaf> leaves{Leaf::euclidean(), Leaf::euclidean()};
    HubSpec hub;
    hub.marks = {{0, {0.0, 0.0}}, {1, {0.0, 0.0}}};
    return WedgeSpace(std::move(leaves), {hub});
}

WedgeSpace chain_fixture() {
    std::vector<Leaf> leaves{Leaf::euclidean(), Leaf::euclidean(), Leaf::euclidean()};
    HubSpec h1;
    h1.marks = {{0, {0.0, 0.0}}, {1, {-1.0, 0.0}}};
    HubSpec h2;
    h2.marks = {{1, {1.0, 0.0}}, {2, {0.0, 0.0}}};
    return WedgeSpace(std::move(leaves), {h1, h2});
}

} // namespace minent
