#include "experiments.hpp"

#include "minent/csv.hpp"
#include "minent/entropy.hpp"
#include "minent/errors.hpp"
#include "minent/jacobian.hpp"
#include "minent/profile.hpp"
#include "minent/rng.hpp"
#include "minent/surgery.hpp"
#include "minent/warped.hpp"
#include "minent/wedge.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

namespace minent::lab {

namespace fs = std::filesystem;

void Outcome::check(bool ok, const std::string& name) {
    lines.push_back(std::string(ok ? "[ok]   " : "[FAIL] ") + name);
    if (!ok && pass) {
        pass = false;
        failed_invariant = name;
    }
}

namespace {

// Atomic text write: temp file in the target directory, then rename.
void write_text(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

// Minimal standalone SVG polyline plot; purely optional output.
void write_plot(const fs::path& path, const std::string& title,
                const std::vector<std::pair<double, double>>& points) {
    if (points.empty()) return;
    double xmin = points[0].first, xmax = xmin, ymin = points[0].second, ymax = ymin;
    for (const auto& [x, y] : points) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    const double W = 640, H = 400, pad = 40;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"12\" y=\"20\" font-family=\"monospace\" font-size=\"13\">" << title
        << "</text>\n";
    svg << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.2\" points=\"";
    for (const auto& [x, y] : points) {
        const double px = pad + (W - 2 * pad) * (x - xmin) / (xmax - xmin);
        const double py = H - pad - (H - 2 * pad) * (y - ymin) / (ymax - ymin);
        svg << csv::num(px) << "," << csv::num(py) << " ";
    }
    svg << "\"/>\n</svg>\n";
    write_text(path, svg.str());
}

std::string metric_csv(const std::vector<std::pair<std::string, double>>& metrics) {
    std::ostringstream head, row;
    bool first = true;
    for (const auto& [k, v] : metrics) {
        if (!first) {
            head << ",";
            row << ",";
        }
        head << k;
        row << csv::num(v);
        first = false;
    }
    return head.str() + "\n" + row.str() + "\n";
}

std::string profile_table(const Profile& p, int samples) {
    std::ostringstream os;
    p.write_table(os, samples);
    return os.str();
}

std::string scan_csv(const CurvatureReport& rep, const DoubleWarpedMetric3D& m, Interval window,
                     int rows) {
    std::ostringstream os;
    rep.write_csv(os, m, window, rows);
    return os.str();
}

// ---------------------------------------------------------------------------
// Oracle construction from a config section

std::unique_ptr<LengthOracle> make_oracle(const Config& cfg, const std::string& section) {
    const std::string kind = cfg.text(section, "kind");
    if (kind == "trivial") return trivial_oracle();
    if (kind == "free") {
        const int rank = int(cfg.integer(section, "rank"));
        return free_group_oracle(rank, cfg.numbers_or(section, "lengths", {}));
    }
    if (kind == "growth") {
        const std::string name = cfg.text_or(section, "name", "h3");
        if (name != "h3")
            throw ConfigError("oracle section [" + section + "]: unknown growth oracle '" + name +
                              "'");
        return h3_ball_oracle();
    }
    if (kind == "rewriting") {
        std::vector<RewriteRule> rules;
        for (const std::string& spec : cfg.strings(section, "rules")) {
            const auto arrow = spec.find("->");
            if (arrow == std::string::npos)
                throw ConfigError("oracle section [" + section + "]: rule '" + spec +
                                  "' must look like lhs->rhs");
            rules.push_back({spec.substr(0, arrow), spec.substr(arrow + 2)});
        }
        return rewriting_oracle(cfg.text(section, "generators"), std::move(rules),
                                cfg.numbers_or(section, "lengths", {}));
    }
    throw ConfigError("oracle section [" + section + "]: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Wedge fixtures and measures from config

WedgeSpace make_wedge(const Config& cfg) {
    const std::string fixture = cfg.text_or("wedge", "fixture", "");
    if (fixture == "single_euclidean") return single_euclidean_fixture();
    if (fixture == "single_hyperbolic") return single_hyperbolic_fixture();
    if (fixture == "tripod") return tripod_fixture(cfg.number_or("wedge", "leg", 1.0));
    if (fixture == "two_planes") return two_planes_fixture();
    if (fixture == "chain") return chain_fixture();
    if (!fixture.empty()) throw ConfigError("[wedge]: unknown fixture '" + fixture + "'");

    // Generic declaration: leaves = ["euclidean", "segment:2.0", ...],
    // hubs = ["0:0,0;1:0,0", ...] (leaf:coords pairs joined by ';').
    std::vector<Leaf> leaves;
    for (const std::string& spec : cfg.strings("wedge", "leaves")) {
        if (spec == "euclidean") leaves.push_back(Leaf::euclidean());
        else if (spec == "hyperbolic") leaves.push_back(Leaf::hyperbolic());
        else if (spec.rfind("segment:", 0) == 0)
            leaves.push_back(Leaf::segment(std::stod(spec.substr(8))));
        else throw ConfigError("[wedge]: unknown leaf '" + spec + "'");
    }
    std::vector<HubSpec> hubs;
    if (cfg.has("wedge", "hubs")) {
        for (const std::string& spec : cfg.strings("wedge", "hubs")) {
            HubSpec hub;
            std::istringstream marks(spec);
            std::string mark;
            while (std::getline(marks, mark, ';')) {
                const auto colon = mark.find(':');
                const auto comma = mark.find(',', colon);
                if (colon == std::string::npos || comma == std::string::npos)
                    throw ConfigError("[wedge]: hub mark '" + mark + "' must be leaf:x,y");
                hub.marks.push_back({std::stoi(mark.substr(0, colon)),
                                     {std::stod(mark.substr(colon + 1, comma - colon - 1)),
                                      std::stod(mark.substr(comma + 1))}});
            }
            hubs.push_back(std::move(hub));
        }
    }
    return WedgeSpace(std::move(leaves), std::move(hubs));
}

PointedMeasure make_measure(const Config& cfg) {
    PointedMeasure mu;
    auto parse_atom = [&](const std::string& row) {
        std::istringstream is(row);
        std::string field;
        std::vector<double> vals;
        while (std::getline(is, field, ',')) vals.push_back(std::stod(field));
        if (vals.size() != 4)
            throw ConfigError("measure row '" + row + "' must be leaf,coord1,coord2,weight");
        mu.atoms.push_back({{int(vals[0]), {vals[1], vals[2]}}, vals[3]});
    };
    if (cfg.has("measure", "file")) {
        std::ifstream in(cfg.text("measure", "file"));
        if (!in) throw ConfigError("measure file not readable: " + cfg.text("measure", "file"));
        std::string row;
        while (std::getline(in, row)) {
            if (row.empty() || row[0] == '#' || row.rfind("leaf", 0) == 0) continue;
            parse_atom(row);
        }
    } else {
        for (const std::string& row : cfg.strings("measure", "atoms")) parse_atom(row);
    }
    return mu;
}

// ---------------------------------------------------------------------------
// Experiments

Outcome run_cap(const Config& cfg, const RunContext& ctx) {
    Outcome out;
    const double m_r = cfg.number_or("cap", "m_r", 1.0);
    const double delta = cfg.number("cap", "delta");
    const double zeta_bar = seifert_zeta_bar(m_r, delta);
    const double zeta = cfg.has("cap", "zeta")
                            ? cfg.number("cap", "zeta")
                            : zeta_bar * cfg.number_or("cap", "zeta_frac", 0.5);

    const SeifertCapResult res = seifert_cusp_cap(m_r, delta, zeta);
    out.note("seifert cusp cap: m_r=" + csv::num(m_r) + " delta=" + csv::num(delta) +
             " zeta=" + csv::num(zeta));
    out.note("T_delta=" + csv::num(res.T_delta) + " T_attach=" + csv::num(res.T_attach) +
             " delta_attach=" + csv::num(res.cap.delta));
    out.note("eps=" + csv::num(res.cap.eps) + " eps_prime=" + csv::num(res.cap.eps_prime) +
             " t_delta=" + csv::num(res.cap.t_delta));
    const double s = std::sqrt(res.cap.delta * (1.0 + res.cap.delta)) / (1.0 + 2.0 * res.cap.delta);
    const double unit_ratio = res.cap.ell_prime / (m_r * std::exp(-res.T_attach));
    out.note("ell_prime=" + csv::num(res.cap.ell_prime) + " interval=[" + csv::num(s) + ", " +
             csv::num(4.0 * s) + "] ratio=" + csv::num(unit_ratio));
    out.note("zeta_bar=" + csv::num(res.zeta_bar));

    out.check(std::abs(res.cap.ell_prime - zeta * m_r) <= 1e-8, "terminal circumference within 1e-8");
    out.check(unit_ratio >= s - 1e-10 && unit_ratio <= 4.0 * s + 1e-10,
              "terminal ratio in the admissible interval");
    const double bound = std::pow(1.0 + 2.0 * delta, 2);
    const CurvatureReport rep =
        curvature_scan(res.metric, res.metric.phi.domain(), ctx.grid + 1, -bound, 0.0);
    out.check(rep.verdict, "curvature pinched in [-(1+2delta)^2, 0]");
    out.check(res.cap_region_volume <= res.cap_region_bound * (1.0 + 1e-9),
              "cap-region volume within the closed-form budget");

    out.metric("T_delta", res.T_delta);
    out.metric("ell_prime", res.cap.ell_prime);
    out.metric("cap_volume", res.cap_region_volume);
    out.metric("cap_volume_bound", res.cap_region_bound);

    write_text(ctx.out_dir / "data" / "profile.csv", profile_table(res.metric.phi, 2048));
    DoubleWarpedMetric3D lifted{res.metric.phi,
                                Profile("one", {const_piece(res.metric.phi.domain(), 1.0)},
                                        Smoothness::Cinf),
                                1.0};
    write_text(ctx.out_dir / "data" / "curvature.csv",
               scan_csv(rep, lifted, res.metric.phi.domain(), 2048));
    if (ctx.plots) {
        std::vector<std::pair<double, double>> pts;
        const Interval dom = res.metric.phi.domain();
        for (int i = 0; i <= 512; ++i) {
            const double t = dom.lo + dom.length() * i / 512.0;
            pts.push_back({t, res.metric.phi.value(t)});
        }
        write_plot(ctx.out_dir / "plots" / "profile.svg", "cusp cap warping", pts);
    }
    return out;
}

TorusCuspSpec cusp_spec_from(const Config& cfg) {
    TorusCuspSpec spec;
    spec.a = cfg.number("cusp", "zeta2_a");
    spec.b = cfg.number("cusp", "zeta2_b");
    spec.zeta2 = 1.0;
    spec.base_area = cfg.number_or("cusp", "base_area", 1.0);
    return spec;
}

Outcome run_conformal(const Config& cfg, const RunContext& ctx) {
    Outcome out;
    const double delta = cfg.number("cusp", "delta");
    const double slack = cfg.number_or("cusp", "slack", 1e-6);
    const ConformalMetric cm = conformal_change(cusp_spec_from(cfg), delta);
    const double T = cm.T_delta;
    out.note("conformal change: delta=" + csv::num(delta) + " C=" + csv::num(cm.C) +
             " T_delta=" + csv::num(T));
    out.note("bump max d2=" + csv::num(cm.bump_max_d2) + " min d2=" + csv::num(cm.bump_min_d2));

    const CurvatureReport band =
        curvature_scan(cm.metric, Interval(T, 2.0 * T), ctx.grid + 1, -1.0 - delta, -1.0, slack);
    out.check(band.verdict, "band curvature in [-1-delta, -1]");
    const CurvatureReport before =
        curvature_scan(cm.metric, Interval(0.0, T), ctx.grid / 4 + 2, -1.0, -1.0, slack);
    const CurvatureReport after = curvature_scan(cm.metric, Interval(2.0 * T, 3.0 * T),
                                                 ctx.grid / 4 + 2, -1.0, -1.0, slack);
    out.check(before.verdict && after.verdict, "hyperbolic outside the band");

    const double v1 = cusp_volume(cm.metric, T, 2.0 * T).volume;
    out.check(v1 <= cm.v1_bound * (1.0 + 1e-9), "band volume within the closed-form budget");

    out.metric("T_delta", T);
    out.metric("C", cm.C);
    out.metric("band_min", std::min({band.xy.min, band.xt.min, band.yt.min}));
    out.metric("band_max", std::max({band.xy.max, band.xt.max, band.yt.max}));
    out.metric("v1", v1);
    out.metric("v1_bound", cm.v1_bound);

    write_text(ctx.out_dir / "data" / "curvature.csv",
               scan_csv(band, cm.metric, Interval(T, 2.0 * T), 2048));
    return out;
}

Outcome run_flatten(const Config& cfg, const RunContext& ctx) {
    Outcome out;
    const double delta = cfg.number("cusp", "delta");
    const ConformalMetric cm = conformal_change(cusp_spec_from(cfg), delta);
    const FlattenedMetric fm = hyperbolic_flatten(cm, delta);
    const double bound = std::pow(1.0 + 2.0 * delta, 2);
    const Interval dom = fm.metric.common_domain();

    out.note("hyperbolic flatten: delta=" + csv::num(delta) + " C=" + csv::num(cm.C) +
             " T_delta=" + csv::num(fm.T_delta));
    out.note("eps=" + csv::num(fm.cap.eps) + " eps_prime=" + csv::num(fm.cap.eps_prime) +
             " unit ell_prime=" + csv::num(fm.cap.ell_prime));
    out.note("collar start=" + csv::num(fm.collar_start) + " domain end=" + csv::num(dom.hi));
    out.note("log boundary eta=(" + csv::num(fm.log_boundary_a) + ", " +
             csv::num(fm.log_boundary_b) + ")");

    const CurvatureReport global = curvature_scan(fm.metric, dom, ctx.grid + 1, -bound, 0.0);
    out.check(global.verdict, "global curvature pinched in [-(1+2delta)^2, 0]");
    const CurvatureReport collar = curvature_scan(fm.metric, Interval(fm.collar_start, dom.hi),
                                                  ctx.grid / 4 + 2, 0.0, 0.0, 1e-10);
    out.check(collar.verdict, "terminal collar flat to 1e-10");
    out.check(fm.volume_delta() <= fm.total_bound() * (1.0 + 1e-9),
              "volume difference within V1+V2+cap budget");

    out.metric("T_delta", fm.T_delta);
    out.metric("vol_delta", fm.volume_delta());
    out.metric("vol_bound", fm.total_bound());
    out.metric("v1_bound", fm.v1_bound);
    out.metric("v2_bound", fm.v2_bound);
    out.metric("cap_bound", fm.cap_bound);

    write_text(ctx.out_dir / "data" / "curvature.csv", scan_csv(global, fm.metric, dom, 2048));
    return out;
}

Outcome run_tube(const Config& cfg, const RunContext& ctx) {
    Outcome out;
    TubeSpec spec;
    spec.L = cfg.number("tube", "L");
    spec.r = cfg.number("tube", "r");
    spec.rho_left = cfg.number_or("tube", "rho_left", spec.r);
    spec.rho_right = cfg.number_or("tube", "rho_right", spec.r);
    spec.dim = int(cfg.integer_or("tube", "dim", 3));
    const TubeMetric tube = tube_metric(spec);

    out.note("tube: L=" + csv::num(spec.L) + " r=" + csv::num(spec.r) + " dim=" +
             csv::num(spec.dim));
    out.note("mid diameter=" + csv::num(tube.mid_diameter) + " volume=" + csv::num(tube.volume) +
             " bound=" + csv::num(tube.volume_bound));
    out.check(tube.totally_geodesic_mid, "middle cross-sections are totally geodesic");
    out.check(tube.volume <= tube.volume_bound * (1.0 + 1e-9), "volume within A*2r + omega r^{n-1}(2L+2r)");
    out.check(std::abs(tube.mid_diameter - std::acos(-1.0) * spec.r) <= 1e-12,
              "middle diameter equals pi r");

    out.metric("volume", tube.volume);
    out.metric("volume_bound", tube.volume_bound);
    out.metric("mid_diameter", tube.mid_diameter);

    write_text(ctx.out_dir / "data" / "profile.csv", profile_table(tube.f, 2048));
    return out;
}

Outcome run_compat(const Config& cfg, const RunContext&) {
    Outcome out;
    SeifertFibrationData data;
    data.genus = int(cfg.integer_or("compat", "genus", 0));
    const auto p = cfg.numbers_or("compat", "p", {});
    const auto q = cfg.numbers_or("compat", "q", {});
    if (p.size() != q.size()) throw ConfigError("[compat]: p and q must have equal lengths");
    for (std::size_t i = 0; i < p.size(); ++i)
        data.exceptional.push_back({int(p[i]), int(q[i])});
    const auto ff = cfg.numbers("compat", "sigma_ff");
    const auto df = cfg.numbers("compat", "sigma_df");
    if (ff.size() != df.size()) throw ConfigError("[compat]: sigma_ff/sigma_df length mismatch");
    for (std::size_t i = 0; i < ff.size(); ++i) data.boundary_products.push_back({ff[i], df[i]});
    data.boundary_count = int(ff.size());

    const bool compatible = leeb_compatibility(data);
    const double euler = seifert_euler_number(data);
    out.note(std::string("leeb compatibility: ") + (compatible ? "compatible" : "incompatible"));
    out.note("euler number=" + csv::num(euler));
    out.metric("compatible", compatible ? 1.0 : 0.0);
    out.metric("euler_number", euler);

    if (cfg.has("compat", "cone_orders") || cfg.has("compat", "boundary_count")) {
        std::vector<int> orders;
        for (double o : cfg.numbers_or("compat", "cone_orders", {})) orders.push_back(int(o));
        const int b = int(cfg.integer_or("compat", "boundary_count", long(data.boundary_count)));
        const double chi = orbifold_euler(data.genus, b, orders);
        out.note("orbifold euler characteristic=" + csv::num(chi));
        out.metric("orbifold_euler", chi);
    }
    if (cfg.has("compat", "expect_compatible")) {
        out.check(compatible == cfg.flag_or("compat", "expect_compatible", true),
                  "compatibility verdict matches the expectation");
    }
    return out;
}

Outcome run_poincare(const Config& cfg, const RunContext& ctx) {
    Outcome out;
    const auto oracle = make_oracle(cfg, "oracle");
    const auto s_values = cfg.numbers("poincare", "s_values");
    const double cutoff = cfg.number("poincare", "cutoff");
    const double r_max = cfg.number_or("poincare", "r_max", cutoff);

    std::ostringstream csv_rows;
    csv_rows << "s,partial_sum,cutoff,converged\n";
    for (double s : s_values) {
        const PoincarePartial full = poincare_partial(*oracle, s, cutoff);
        const PoincarePartial half = poincare_partial(*oracle, s, 0.9 * cutoff);
        const bool converged =
            std::abs(full.value - half.value) <= 1e-6 * std::max(1.0, full.value);
        csv_rows << csv::num(s) << "," << csv::num(full.value) << "," << csv::num(cutoff) << ","
                 << (converged ? "1" : "0") << "\n";
        out.note("s=" + csv::num(s) + " partial=" + csv::num(full.value) +
                 (converged ? " (converged)" : " (growing)"));
    }
    write_text(ctx.out_dir / "data" / "poincare.csv", csv_rows.str());

    const CriticalExponent exponent = critical_exponent(*oracle, 1e-3, r_max);
    out.note("critical exponent estimate=" + csv::num(exponent.exponent) + " [" + exponent.note +
             "]");
    out.check(exponent.conclusive, "growth regression conclusive");
    out.metric("exponent", exponent.exponent);
    if (cfg.has("poincare", "expect_exponent")) {
        const double expect = cfg.number("poincare", "expect_exponent");
        const double tol = cfg.number_or("poincare", "tol", 1e-3);
        out.check(std::abs(exponent.exponent - expect) <= tol,
                  "critical exponent within tolerance of the expected value");
    }
    return out;
}

Outcome run_freeproduct(const Config& cfg, const RunContext& ctx) {
    Outcome out;
    const auto f1 = make_oracle(cfg, "factor1");
    const auto f2 = make_oracle(cfg, "factor2");
    const double L = cfg.number("freeproduct", "L");
    const auto s_values = cfg.numbers("freeproduct", "s_values");
    const double cutoff = cfg.number("freeproduct", "cutoff");
    const auto budget = std::uint64_t(cfg.integer_or("freeproduct", "budget", 1000000));

    const FreeProductReport rep = free_product_exponent_check(*f1, *f2, L, s_values, cutoff, budget);
    out.note("free product: L=" + csv::num(L) + " cutoff=" + csv::num(cutoff) + " words=" +
             csv::num((unsigned long long)rep.words) + (rep.truncated ? " (truncated)" : ""));
    out.note("factor exponents ~ (" + csv::num(rep.factor_exponent_1) + ", " +
             csv::num(rep.factor_exponent_2) + ")");

    std::ostringstream rows;
    rows << "s,q,bound,partial,threshold_L,converged,ok\n";
    for (const auto& r : rep.rows) {
        rows << csv::num(r.s) << "," << csv::num(r.q) << "," << csv::num(r.bound) << ","
             << csv::num(r.partial) << "," << csv::num(r.threshold_L) << ","
             << (r.converges ? "1" : "0") << "," << (r.within_bound ? "1" : "0") << "\n";
    }
    write_text(ctx.out_dir / "data" / "freeproduct.csv", rows.str());

    out.check(rep.all_ok, "partial sums bounded by 1 + 4q/(1-q) wherever q < 1");
    out.metric("converged", rep.rows.empty() ? 0.0 : (rep.rows.front().converges ? 1.0 : 0.0));
    out.metric("partial_s0", rep.rows.empty() ? 0.0 : rep.rows.front().partial);
    out.metric("bound_s0", rep.rows.empty() ? 0.0 : rep.rows.front().bound);
    out.metric("threshold_L", rep.rows.empty() ? 0.0 : rep.rows.front().threshold_L);
    return out;
}

Outcome run_barycenter(const Config& cfg, const RunContext& ctx) {
    Outcome out;
    const WedgeSpace X = make_wedge(cfg);
    const PointedMeasure mu = make_measure(cfg);
    BarycenterOptions opts;
    opts.tol = cfg.number_or("barycenter", "tol", 1e-8);
    opts.seed = ctx.seed;

    const BarycenterResult res = barycenter(X, mu, opts);
    nlohmann::json report{
        {"barycenter", {{"leaf", res.point.leaf}, {"x", res.point.p.x}, {"y", res.point.p.y}}},
        {"leibniz_value", res.value},
        {"certificate", res.certificate},
        {"iterations", res.iterations},
        {"converged", res.converged},
    };
    out.note(report.dump(2));
    out.check(res.converged, "solver converged");
    out.check(res.certificate <= opts.tol, "uniqueness certificate within tol");

    if (cfg.has("barycenter", "expect_leaf")) {
        const PointRef expected{int(cfg.integer("barycenter", "expect_leaf")),
                                {cfg.number_or("barycenter", "expect_x", 0.0),
                                 cfg.number_or("barycenter", "expect_y", 0.0)}};
        out.check(X.distance(res.point, expected) <= 10.0 * opts.tol,
                  "barycenter matches the expected point");
    }

    out.metric("value", res.value);
    out.metric("certificate", res.certificate);
    out.metric("iterations", res.iterations);

    std::ostringstream rows;
    rows << "leaf,coord1,coord2,weight\n";
    for (const auto& atom : mu.atoms)
        rows << atom.point.leaf << "," << csv::num(atom.point.p.x) << ","
             << csv::num(atom.point.p.y) << "," << csv::num(atom.weight) << "\n";
    write_text(ctx.out_dir / "data" / "measure.csv", rows.str());
    write_text(ctx.out_dir / "data" / "barycenter.json", report.dump(2) + "\n");
    return out;
}

PointRef random_point_in(const WedgeSpace& X, Rng& rng) {
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

Outcome run_comparison(const Config& cfg, const RunContext& ctx) {
    Outcome out;
    const WedgeSpace X = make_wedge(cfg);
    const long samples = cfg.integer_or("comparison", "samples", 10000);
    const double slack = cfg.number_or("comparison", "slack", 1e-9);
    Rng rng(ctx.seed);
    long violations = 0;
    for (long i = 0; i < samples; ++i) {
        if (!comparison_check(X, random_point_in(X, rng), random_point_in(X, rng),
                              random_point_in(X, rng), rng.uniform(), slack))
            ++violations;
    }
    out.note("comparison inequality: " + csv::num(samples) + " random quadruples, " +
             csv::num(violations) + " violations");
    out.check(violations == 0, "comparison inequality on all random quadruples");
    out.metric("samples", double(samples));
    out.metric("violations", double(violations));
    return out;
}

Outcome run_algebraic(const Config& cfg, const RunContext& ctx) {
    Outcome out;
    const int n = int(cfg.integer("algebraic", "n"));
    const long samples = cfg.integer_or("algebraic", "samples", 100000);
    const AlgebraicMax res = algebraic_max(n, samples, ctx.seed);

    out.note("phi maximum over the trace-1 spectrum simplex, n=" + csv::num(n));
    out.note("max=" + csv::num(res.max_found) + " at argmax near uniform; bound n^{n/2}/(n-1)^n=" +
             csv::num(res.bound));
    out.check(res.max_found <= res.bound + 1e-9, "search never exceeds n^{n/2}/(n-1)^n");
    out.check(std::abs(res.uniform_value - res.bound) <= 1e-12, "uniform point attains the bound");
    double max_dev = 0.0;
    for (double h : res.argmax) max_dev = std::max(max_dev, std::abs(h - 1.0 / n));
    out.check(max_dev <= 1e-4, "argmax within 1e-4 of the uniform point");

    out.metric("max_found", res.max_found);
    out.metric("bound", res.bound);
    out.metric("argmax_dev", max_dev);

    std::ostringstream rows;
    rows << "n,samples,max_found,bound,argmax_dev\n"
         << n << "," << samples << "," << csv::num(res.max_found) << "," << csv::num(res.bound)
         << "," << csv::num(max_dev) << "\n";
    write_text(ctx.out_dir / "data" / "algebraic.csv", rows.str());
    return out;
}

Outcome run_jacobi(const Config& cfg, const RunContext& ctx) {
    Outcome out;

    // Optional explicit schedule: prefix breakpoints + kappas and the final
    // hyperbolic window length.
    if (cfg.has("jacobi", "knots")) {
        const CurvatureSchedule schedule = make_schedule(
            cfg.numbers("jacobi", "knots"), cfg.numbers("jacobi", "kappa"),
            cfg.number("jacobi", "R"));
        const JacobiResult res = jacobi_ii(schedule, cfg.number_or("jacobi", "J0", 0.0),
                                           cfg.number_or("jacobi", "J0p", 1.0), 256);
        out.note("explicit schedule: ell=" + csv::num(schedule.ell) + " R=" +
                 csv::num(schedule.R) + " II(ell)=" + csv::num(res.ii_at_ell) + " bound=" +
                 csv::num(res.bound));
        out.check(!res.degenerate && res.ii_at_ell >= res.bound - 1e-8,
                  "explicit schedule satisfies II(ell) >= 1 - 2e^{-2R}");
        std::ostringstream prof;
        prof << "t,ii\n";
        for (const auto& [t, ii] : res.profile) prof << csv::num(t) << "," << csv::num(ii) << "\n";
        write_text(ctx.out_dir / "data" / "schedule_profile.csv", prof.str());
        out.metric("ii_at_ell", res.ii_at_ell);
        out.metric("bound", res.bound);
    }

    const long trials = cfg.integer_or("jacobi", "trials", 1000);
    Rng rng(ctx.seed);
    std::ostringstream rows;
    rows << "seed,R,ell,ii,bound,ok\n";
    bool all_ok = true;
    for (long trial = 0; trial < trials; ++trial) {
        const std::uint64_t sub_seed = Rng::derive(ctx.seed, std::uint64_t(trial));
        Rng sub(sub_seed);
        const int pieces = 1 + int(sub.next_u64() % 4);
        std::vector<double> knots, kappas;
        double t = 0.0;
        for (int i = 0; i < pieces; ++i) {
            t += sub.uniform(0.2, 1.5);
            knots.push_back(t);
            kappas.push_back(-sub.uniform(0.0, 4.0));
        }
        const double R = sub.uniform(0.5, 5.0);
        const CurvatureSchedule schedule = make_schedule(knots, kappas, R);
        const JacobiResult res = jacobi_ii(schedule, 0.0, sub.uniform(0.1, 3.0));
        const bool ok = !res.degenerate && res.ii_at_ell >= res.bound - 1e-8;
        all_ok = all_ok && ok;
        rows << sub_seed << "," << csv::num(R) << "," << csv::num(schedule.ell) << ","
             << csv::num(res.ii_at_ell) << "," << csv::num(res.bound) << "," << (ok ? "1" : "0")
             << "\n";
    }
    write_text(ctx.out_dir / "data" / "jacobi.csv", rows.str());
    out.note("random schedules: " + csv::num(trials) + " trials");
    out.check(all_ok, "II(ell) >= 1 - 2e^{-2R} on every random schedule");

    // Closed-form check in constant curvature -1.
    CurvatureSchedule pure;
    pure.knots = {0.0, 3.0};
    pure.kappa = {-1.0};
    pure.ell = 3.0;
    pure.R = 3.0;
    const JacobiResult coth = jacobi_ii(pure, 0.0, 1.0);
    out.check(std::abs(coth.ii_at_ell - 1.0 / std::tanh(3.0)) <= 1e-10,
              "constant-curvature run matches coth");
    out.metric("trials", double(trials));

    // Composed jacobian inequality sweep.
    std::ostringstream chain;
    chain << "seed,n,c,eps,phi,bound,ok\n";
    bool chain_ok = true;
    const long chain_samples = cfg.integer_or("jacobi", "chain_samples", 2000);
    for (int n : {3, 4, 5}) {
        for (double c : {2.0, 2.5}) {
            for (double eps : {0.0, 0.1}) {
                for (long i = 0; i < chain_samples; ++i) {
                    const std::uint64_t sub_seed =
                        Rng::derive(ctx.seed, std::uint64_t(1000000 + i) * std::uint64_t(n));
                    Rng sub(sub_seed);
                    std::vector<double> h(static_cast<std::size_t>(n));
                    double total = 0.0;
                    for (double& v : h) {
                        v = sub.exponential();
                        total += v;
                    }
                    for (double& v : h) v /= total;
                    double lhs = 0.0, rhs = 0.0;
                    const bool ok =
                        jacobian_chain_check(validated_spectrum(h), c, n, eps, &lhs, &rhs);
                    chain_ok = chain_ok && ok;
                    const PhiValue phi = phi_of_spectrum({h});
                    chain << sub_seed << "," << n << "," << csv::num(c) << "," << csv::num(eps)
                          << "," << csv::num(phi.value) << "," << csv::num(rhs) << ","
                          << (ok ? "1" : "0") << "\n";
                }
            }
        }
    }
    write_text(ctx.out_dir / "data" / "chain.csv", chain.str());
    out.check(chain_ok, "composed jacobian inequality on random spectra");
    return out;
}

Outcome run_minent(const Config& cfg, const RunContext& ctx) {
    Outcome out;
    const auto volumes = cfg.numbers_or("minent", "volumes", {});
    const double target = minent_target(volumes);
    out.note("minent target 2 (sum vol)^{1/3} = " + csv::num(target));
    out.metric("target", target);

    std::ostringstream rows;
    rows << "delta,n,bishop_bound\n";
    for (double delta : cfg.numbers_or("minent", "delta_values", {0.0, 0.1, 0.2})) {
        const int n = int(cfg.integer_or("minent", "n", 3));
        rows << csv::num(delta) << "," << n << "," << csv::num(ent_upper_bound_bishop(delta, n))
             << "\n";
    }
    write_text(ctx.out_dir / "data" / "minent.csv", rows.str());

    if (cfg.has("minent", "expect_target")) {
        out.check(std::abs(target - cfg.number("minent", "expect_target")) <=
                      cfg.number_or("minent", "tol", 1e-9),
                  "target matches the expected value");
    }
    return out;
}

} // namespace

Outcome run_experiment(const Config& cfg, const RunContext& ctx) {
    const std::string kind = cfg.text("experiment", "kind");
    Outcome out;
    if (kind == "cap") out = run_cap(cfg, ctx);
    else if (kind == "conformal") out = run_conformal(cfg, ctx);
    else if (kind == "flatten") out = run_flatten(cfg, ctx);
    else if (kind == "tube") out = run_tube(cfg, ctx);
    else if (kind == "compat") out = run_compat(cfg, ctx);
    else if (kind == "poincare") out = run_poincare(cfg, ctx);
    else if (kind == "freeproduct") out = run_freeproduct(cfg, ctx);
    else if (kind == "barycenter") out = run_barycenter(cfg, ctx);
    else if (kind == "comparison") out = run_comparison(cfg, ctx);
    else if (kind == "algebraic") out = run_algebraic(cfg, ctx);
    else if (kind == "jacobi") out = run_jacobi(cfg, ctx);
    else if (kind == "minent") out = run_minent(cfg, ctx);
    else throw ConfigError("[experiment]: unknown kind '" + kind + "'");

    std::ostringstream report;
    report << "experiment: " << kind << "\n";
    report << "seed: " << ctx.seed << "\n";
    report << "grid: " << ctx.grid << "\n\n";
    for (const std::string& line : out.lines) report << line << "\n";
    report << "\nstatus: " << (out.pass ? "PASS" : ("FAIL (" + out.failed_invariant + ")"))
           << "\n";
    write_text(ctx.out_dir / "report.txt", report.str());
    if (!out.metrics.empty())
        write_text(ctx.out_dir / "data" / "metrics.csv", metric_csv(out.metrics));
    return out;
}

} // namespace minent::lab
