// Acceptance suite: runs every contract criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit status 0 iff all pass.

#include "minent/entropy.hpp"
#include "minent/jacobian.hpp"
#include "minent/optimize.hpp"
#include "minent/profile.hpp"
#include "minent/rng.hpp"
#include "minent/surgery.hpp"
#include "minent/warped.hpp"
#include "minent/wedge.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace minent;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Criterion {
public:
    Criterion(int index, std::string name) : index_(index), name_(std::move(name)) {
        start_ = std::chrono::steady_clock::now();
    }

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            ok_ = false;
            if (first_failure_.empty()) first_failure_ = what;
        }
    }

    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    ~Criterion() {
        const double t = seconds();
        std::printf("[%2d] %s %-34s (%.2fs)%s%s\n", index_, ok_ ? "PASS" : "FAIL", name_.c_str(),
                    t, first_failure_.empty() ? "" : " -- ", first_failure_.c_str());
        std::fflush(stdout);
        if (!ok_) ++g_failures;
    }

private:
    int index_;
    std::string name_;
    bool ok_ = true;
    std::string first_failure_;
    std::chrono::steady_clock::time_point start_;
};

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

// 1. Cusp-cap construction bounds at four deltas, under 1 s each.
void criterion_1() {
    Criterion c(1, "cusp cap construction");
    for (double delta : {0.5, 0.2, 0.1, 0.05}) {
        const auto t0 = std::chrono::steady_clock::now();
        const CuspCap cap = cusp_cap_profile(1.0, delta);
        const double built = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        c.expect(built < 1.0, "construction exceeded 1 s at delta=" + std::to_string(delta));

        const double bound = std::pow(1.0 + 2.0 * delta, 2);
        const Interval dom = cap.profile.domain();
        bool mono = true, convex = true, ratio1 = true, ratio2 = true;
        for (int i = 0; i <= 10000; ++i) {
            const double t = dom.lo + dom.length() * i / 10000.0;
            const double v = cap.profile.value(t);
            const double d1 = cap.profile.d1(t);
            const double d2 = cap.profile.d2(t);
            mono = mono && d1 <= 1e-12;
            convex = convex && d2 >= -1e-10;
            ratio1 = ratio1 && (d1 / v) * (d1 / v) <= bound + 1e-9;
            ratio2 = ratio2 && d2 / v <= bound + 1e-9;
        }
        c.expect(mono, "profile must be nonincreasing");
        c.expect(convex, "profile must be convex");
        c.expect(ratio1, "(phi'/phi)^2 bound failed");
        c.expect(ratio2, "phi''/phi bound failed");
        const double s = std::sqrt(delta * (1.0 + delta)) / (1.0 + 2.0 * delta);
        c.expect(cap.params.ell_prime >= s - 1e-12 && cap.params.ell_prime <= 4.0 * s + 1e-12,
                 "terminal ell' outside its interval");
    }
}

// 2. ODE profile minimum location and value against the closed forms.
void criterion_2() {
    Criterion c(2, "ode profile minimum");
    for (double delta : {1.0, 0.5, 0.1, 0.01}) {
        Profile p = ode_profile(1.0, delta, Interval(-1.0, 8.0));
        const double coarse =
            golden_section_min([&](double t) { return p.value(t); }, 0.0, 8.0, 1e-10);
        const double t_num = golden_section_min([&](double t) { return std::abs(p.d1(t)); },
                                                coarse - 1e-4, coarse + 1e-4, 1e-14);
        c.expect(std::abs(t_num - ode_min_location(delta)) <= 1e-8,
                 "minimum location off at delta=" + std::to_string(delta));
        c.expect(std::abs(p.value(t_num) - ode_min_value(1.0, delta)) <= 1e-8,
                 "minimum value off at delta=" + std::to_string(delta));
    }
}

// 3. Conformal change at (0.3, 0.7, 0.1): pinched band, hyperbolic outside.
void criterion_3() {
    Criterion c(3, "conformal change scan");
    TorusCuspSpec spec;
    spec.a = 0.3;
    spec.b = 0.7;
    spec.zeta2 = 1.0;
    const double delta = 0.1;
    const ConformalMetric cm = conformal_change(spec, delta);
    const double T = cm.T_delta;
    const CurvatureReport band =
        curvature_scan(cm.metric, Interval(T, 2.0 * T), 10001, -1.0 - delta, -1.0, 1e-6);
    c.expect(band.verdict, "band not pinched in [-1-delta, -1]");
    const CurvatureReport before =
        curvature_scan(cm.metric, Interval(0.0, T), 4001, -1.0, -1.0, 1e-6);
    const CurvatureReport after =
        curvature_scan(cm.metric, Interval(2.0 * T, 4.0 * T), 4001, -1.0, -1.0, 1e-6);
    c.expect(before.verdict && after.verdict, "metric not hyperbolic outside the band");
    c.expect(c.seconds() < 5.0, "runtime exceeded 5 s");
}

// 4. Hyperbolic flattening: global pinching and a flat terminal collar.
void criterion_4() {
    Criterion c(4, "hyperbolic flattening");
    TorusCuspSpec spec;
    spec.a = 0.3;
    spec.b = 0.7;
    spec.zeta2 = 1.0;
    const double delta = 0.1;
    const ConformalMetric cm = conformal_change(spec, delta);
    const FlattenedMetric fm = hyperbolic_flatten(cm, delta);
    const double bound = std::pow(1.0 + 2.0 * delta, 2);
    const Interval dom = fm.metric.common_domain();
    const CurvatureReport global = curvature_scan(fm.metric, dom, 20001, -bound, 0.0, 1e-9);
    c.expect(global.verdict, "global pinching in [-(1+2delta)^2, 0] failed");
    const CurvatureReport collar =
        curvature_scan(fm.metric, Interval(fm.collar_start, dom.hi), 2001, 0.0, 0.0, 1e-10);
    c.expect(collar.verdict, "terminal collar not flat to 1e-10");
}

// 5. Volume convergence under the delta sweep, bounded by the closed forms.
void criterion_5() {
    Criterion c(5, "volume convergence sweep");
    TorusCuspSpec spec;
    spec.a = 0.9;
    spec.b = 0.9;
    spec.zeta2 = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {0.2, 0.1, 0.05, 0.02}) {
        const ConformalMetric cm = conformal_change(spec, delta);
        const FlattenedMetric fm = hyperbolic_flatten(cm, delta);
        const double diff = fm.volume_delta();
        c.expect(diff < prev, "difference not strictly decreasing at delta=" + std::to_string(delta));
        c.expect(diff <= fm.total_bound() * (1.0 + 1e-9),
                 "difference above the V1+V2+cap budget at delta=" + std::to_string(delta));
        prev = diff;
    }
}

// 6. Algebraic lemma: 1e5 simplex samples plus polish never beat the bound.
void criterion_6() {
    Criterion c(6, "algebraic simplex maximum");
    for (int n : {3, 4, 5}) {
        const AlgebraicMax res = algebraic_max(n, 100000, 0x5eedULL + std::uint64_t(n));
        c.expect(res.max_found <= res.bound + 1e-9,
                 "samples exceeded n^{n/2}/(n-1)^n at n=" + std::to_string(n));
        c.expect(std::abs(res.uniform_value - res.bound) <= 1e-12,
                 "uniform point does not attain the bound at n=" + std::to_string(n));
    }
    c.expect(c.seconds() < 10.0, "runtime exceeded 10 s");
}

// 7. Jacobi comparison bound over random curvature schedules.
void criterion_7() {
    Criterion c(7, "jacobi comparison bound");
    Rng rng(0xAB12);
    for (int trial = 0; trial < 1000; ++trial) {
        const int pieces = 1 + int(rng.next_u64() % 4);
        std::vector<double> knots, kappas;
        double t = 0.0;
        for (int i = 0; i < pieces; ++i) {
            t += rng.uniform(0.2, 1.5);
            knots.push_back(t);
            kappas.push_back(-rng.uniform(0.0, 4.0));
        }
        const double R = rng.uniform(0.5, 5.0);
        const CurvatureSchedule schedule = make_schedule(knots, kappas, R);
        const JacobiResult res = jacobi_ii(schedule, 0.0, rng.uniform(0.1, 3.0));
        c.expect(!res.degenerate && res.ii_at_ell >= 1.0 - 2.0 * std::exp(-2.0 * R) - 1e-8,
                 "II(ell) fell below 1 - 2e^{-2R}");
    }
    CurvatureSchedule pure;
    pure.knots = {0.0, 3.0};
    pure.kappa = {-1.0};
    pure.ell = 3.0;
    pure.R = 3.0;
    const JacobiResult coth = jacobi_ii(pure, 0.0, 1.0);
    c.expect(std::abs(coth.ii_at_ell - 1.0 / std::tanh(3.0)) <= 1e-10,
             "constant-curvature closed form mismatch");
    c.expect(coth.ii_at_ell >= 1.0 - 2.0 * std::exp(-6.0), "coth(3) below its bound");
}

// 8. Radius threshold identity.
void criterion_8() {
    Criterion c(8, "hessian radius threshold");
    for (double eps : {0.5, 0.1, 0.02}) {
        const double R = radius_for_eps(eps);
        c.expect(std::abs(2.0 * std::exp(-2.0 * R) - eps) <= 1e-14,
                 "2 e^{-2R} != eps at eps=" + std::to_string(eps));
    }
}

// 9. Comparison inequality across the three wedge fixtures.
void criterion_9() {
    Criterion c(9, "comparison inequality");
    Rng rng(0xC0FFEE);

    const WedgeSpace flat = single_euclidean_fixture();
    for (int i = 0; i < 10000; ++i) {
        const PointRef a = random_point(flat, rng);
        const PointRef b = random_point(flat, rng);
        const PointRef cpt = random_point(flat, rng);
        const double t = rng.uniform();
        const double dbc = flat.distance(b, cpt);
        if (dbc < 1e-9) continue;
        const PointRef m = flat.geodesic(b, cpt, t);
        const double lhs =
            std::pow(flat.distance(a, m), 2) + flat.distance(m, b) * flat.distance(cpt, m);
        const double rhs = std::pow(flat.distance(a, b), 2) * flat.distance(cpt, m) / dbc +
                           std::pow(flat.distance(a, cpt), 2) * flat.distance(b, m) / dbc;
        c.expect(std::abs(lhs - rhs) <= 1e-12 * std::max({1.0, lhs, rhs}),
                 "euclidean leaf equality beyond 1e-12");
    }

    const WedgeSpace hyp = single_hyperbolic_fixture();
    const WedgeSpace tri = tripod_fixture(3.0);
    for (int i = 0; i < 10000; ++i) {
        c.expect(comparison_check(hyp, random_point(hyp, rng), random_point(hyp, rng),
                                  random_point(hyp, rng), rng.uniform(), 1e-9),
                 "hyperbolic leaf comparison failed");
        c.expect(comparison_check(tri, random_point(tri, rng), random_point(tri, rng),
                                  random_point(tri, rng), rng.uniform(), 1e-9),
                 "tripod comparison failed");
    }
}

// 10. Barycenter solver with the uniqueness certificate.
void criterion_10() {
    Criterion c(10, "barycenter with certificate");
    const double tol = 1e-8;

    {
        const WedgeSpace flat = single_euclidean_fixture();
        PointedMeasure mu;
        Rng rng(0xBA5E);
        Vec2 mean{0, 0};
        double mass = 0.0;
        for (int i = 0; i < 6; ++i) {
            const Vec2 p{rng.uniform(-2, 2), rng.uniform(-2, 2)};
            const double w = rng.uniform(0.3, 2.0);
            mu.atoms.push_back({{0, p}, w});
            mean = mean + w * p;
            mass += w;
        }
        mean = (1.0 / mass) * mean;
        BarycenterOptions opts;
        opts.tol = tol;
        const BarycenterResult res = barycenter(flat, mu, opts);
        c.expect(res.converged && norm(res.point.p - mean) <= 1e-9,
                 "euclidean weighted mean off by more than 1e-9");

        BarycenterOptions alt = opts;
        alt.init = PointRef{0, {9.0, -4.0}};
        alt.seed = 777;
        const BarycenterResult res2 = barycenter(flat, mu, alt);
        c.expect(flat.distance(res.point, res2.point) <= 10.0 * tol,
                 "restart disagreement beyond 10 tol");
    }

    {
        const WedgeSpace tri = tripod_fixture(1.0);
        PointedMeasure mu;
        mu.atoms = {{{0, {1, 0}}, 1.0}, {{1, {1, 0}}, 1.0}, {{2, {1, 0}}, 1.0}};
        BarycenterOptions opts;
        opts.tol = tol;
        const BarycenterResult res = barycenter(tri, mu, opts);
        c.expect(res.converged && tri.distance(res.point, {0, {0, 0}}) <= tol,
                 "tripod barycenter missed the hub");

        Rng rng(0xF00D);
        const double W = mu.total_mass();
        for (int i = 0; i < 1000; ++i) {
            const PointRef x = random_point(tri, rng);
            const double gap = leibniz(tri, mu, x) - res.value;
            c.expect(W * std::pow(tri.distance(res.point, x), 2) <= gap + 1e-7,
                     "tripod uniqueness certificate violated");
        }
    }

    {
        const WedgeSpace two = two_planes_fixture();
        PointedMeasure mu;
        mu.atoms = {{{0, {0.28, 0.96}}, 1.0}, {{1, {-0.6, 0.8}}, 1.0}};
        BarycenterOptions opts;
        opts.tol = tol;
        const BarycenterResult res = barycenter(two, mu, opts);
        c.expect(res.converged && two.distance(res.point, {0, {0, 0}}) <= tol,
                 "two-plane barycenter missed the hub");
        Rng rng(0xFEED);
        const double W = mu.total_mass();
        for (int i = 0; i < 1000; ++i) {
            const PointRef x = random_point(two, rng);
            const double gap = leibniz(two, mu, x) - res.value;
            c.expect(W * std::pow(two.distance(res.point, x), 2) <= gap + 1e-7,
                     "two-plane uniqueness certificate violated");
        }
    }
}

// 11. Critical exponents: F2, H^3 and the rescaling property.
void criterion_11() {
    Criterion c(11, "critical exponents");
    const auto f2 = free_group_oracle(2);
    const CriticalExponent e2 = critical_exponent(*f2, 1e-3, 18.0);
    c.expect(e2.conclusive && std::abs(e2.exponent - std::log(3.0)) <= 1e-3,
             "F2 exponent not within 1e-3 of ln 3");

    const auto h3 = h3_ball_oracle();
    const CriticalExponent eh = critical_exponent(*h3, 0.05, 20.0);
    c.expect(eh.conclusive && std::abs(eh.exponent - 2.0) <= 0.05,
             "H^3 exponent not within 0.05 of 2");

    const double lambda = 2.5;
    const auto scaled = free_group_oracle(2, {lambda, lambda});
    const CriticalExponent es = critical_exponent(*scaled, 1e-6, lambda * 18.0);
    c.expect(std::abs(es.exponent - e2.exponent / lambda) <=
                 1e-6 * std::abs(e2.exponent / lambda),
             "rescaling property beyond 1e-6 relative");
    c.expect(c.seconds() < 30.0, "runtime exceeded 30 s");
}

// 12. Free-product tube series against the geometric bound, and the
//     convergence flag flip across the threshold.
void criterion_12() {
    Criterion c(12, "free product tube series");
    const auto z1 = free_group_oracle(1);
    const auto z2 = free_group_oracle(1);
    const double s = 0.5;
    const FreeProductReport rep = free_product_exponent_check(*z1, *z2, 3.0, {s}, 30.0);
    c.expect(!rep.truncated, "enumeration truncated");
    c.expect(rep.rows.front().converges, "series should converge at L=3");
    c.expect(rep.rows.front().partial <= rep.rows.front().bound + 1e-9,
             "partial sums exceeded 1 + 4q/(1-q)");

    const double p_star = 2.0 * std::exp(-s) / (1.0 - std::exp(-s));
    const double threshold = std::log(p_star * p_star) / (4.0 * s);
    int flips = 0;
    bool prev = false, first = true;
    for (double L = 0.3; L <= 2.2 * threshold; L += 0.12 * threshold) {
        const FreeProductReport r = free_product_exponent_check(*z1, *z2, L, {s}, 30.0);
        const bool conv = r.rows.front().converges;
        if (!first && conv != prev) ++flips;
        prev = conv;
        first = false;
    }
    c.expect(flips == 1 && prev, "converged flag must flip exactly once across the threshold");
}

// 13. Euclidean median identity on random triangles.
void criterion_13() {
    Criterion c(13, "euclidean median identity");
    Rng rng(0x1DEA);
    for (int i = 0; i < 100000; ++i) {
        const Vec2 A{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        const Vec2 B{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        Vec2 C{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        if (norm(C - B) < 1e-6) C.x += 1.0;
        const Vec2 M = B + rng.uniform() * (C - B);
        const MedianIdentity m = euclid_median_identity(A, B, C, M);
        c.expect(std::abs(m.lhs - m.rhs) <= 1e-12 * std::max({1.0, m.lhs, m.rhs}),
                 "identity off beyond 1e-12 relative");
    }
}

// 14. Determinism: repeated CLI runs with a fixed seed produce byte-identical
//     CSV outputs.
void criterion_14(const std::string& cli_path) {
    Criterion c(14, "CLI determinism");
    if (cli_path.empty()) {
        c.expect(false, "path to the CLI binary was not supplied");
        return;
    }
    const fs::path work = fs::temp_directory_path() / "minent_acceptance_determinism";
    fs::remove_all(work);
    fs::create_directories(work);
    const fs::path cfg_path = work / "cap.toml";
    {
        std::ofstream cfg(cfg_path);
        cfg << "[experiment]\nkind = \"cap\"\nseed = 31415\n\n"
            << "[cap]\nm_r = 1.0\ndelta = 0.1\nzeta_frac = 0.5\n";
    }
    auto run = [&](const std::string& out) {
        std::ostringstream cmd;
        cmd << "\"" << cli_path << "\" run " << cfg_path << " --out " << (work / out)
            << " > /dev/null 2>&1";
        return std::system(cmd.str().c_str());
    };
    c.expect(run("r1") == 0, "first CLI run failed");
    c.expect(run("r2") == 0, "second CLI run failed");

    int files_compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(work / "r1")) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() != ".csv") continue;
        const fs::path other = work / "r2" / fs::relative(entry.path(), work / "r1");
        std::ifstream f1(entry.path(), std::ios::binary);
        std::ifstream f2(other, std::ios::binary);
        std::stringstream s1, s2;
        s1 << f1.rdbuf();
        s2 << f2.rdbuf();
        c.expect(f2.good() || fs::exists(other), "missing CSV in the second run");
        c.expect(s1.str() == s2.str(),
                 "CSV differs between runs: " + entry.path().filename().string());
        ++files_compared;
    }
    c.expect(files_compared > 0, "no CSV files produced");
}

} // namespace

int main(int argc, char** argv) {
    const std::string cli_path = argc > 1 ? argv[1] : "";
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    criterion_13();
    criterion_14(cli_path);
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
