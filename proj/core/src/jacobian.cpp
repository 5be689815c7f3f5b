#include "minent/jacobian.hpp"

#include "minent/errors.hpp"
#include "minent/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minent {

SpectrumPoint validated_spectrum(std::vector<double> eigenvalues) {
    if (eigenvalues.size() < 2) throw InvalidParameter("spectrum: need at least 2 eigenvalues");
    double sum = 0.0;
    for (double h : eigenvalues) {
        if (h < -1e-15 || h > 1.0 + 1e-15)
            throw InvalidParameter("spectrum: eigenvalues must lie in [0, 1]");
        sum += h;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidParameter("spectrum: trace must equal 1");
    return {std::move(eigenvalues)};
}

PhiValue phi_of_spectrum(const SpectrumPoint& p) {
    double det_h = 1.0;
    double det_c = 1.0;
    bool pole = false;
    for (double h : p.eigenvalues) {
        det_h *= h;
        const double c = 1.0 - h;
        if (c <= 1e-15) pole = true;
        det_c *= c;
    }
    if (pole) return {std::numeric_limits<double>::infinity(), true};
    return {std::sqrt(std::max(0.0, det_h)) / det_c, false};
}

AlgebraicMax algebraic_max(int n, long samples, std::uint64_t seed) {
    if (n < 3) throw InvalidParameter("algebraic_max: n must be >= 3");
    if (samples < 1) throw InvalidParameter("algebraic_max: need at least one sample");

    AlgebraicMax out;
    out.samples = samples;
    out.bound = std::pow(double(n), 0.5 * n) / std::pow(double(n - 1), n);
    std::vector<double> uniform(static_cast<std::size_t>(n), 1.0 / double(n));
    out.uniform_value = phi_of_spectrum({uniform}).value;

    Rng rng(seed);
    std::vector<double> best = uniform;
    double best_val = out.uniform_value;
    std::vector<double> draw(static_cast<std::size_t>(n));
    for (long i = 0; i < samples; ++i) {
        double total = 0.0;
        for (double& d : draw) {
            d = rng.exponential();
            total += d;
        }
        for (double& d : draw) d /= total;
        const double v = phi_of_spectrum({draw}).value;
        if (v > best_val) {
            best_val = v;
            best = draw;
        }
    }

    // Local polish by pairwise transfers with a shrinking step.
    std::vector<double> cur = best;
    double cur_val = best_val;
    for (double step = 0.05; step > 1e-12; step *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    std::vector<double> cand = cur;
                    const double move = std::min(step, cand[std::size_t(i)]);
                    cand[std::size_t(i)] -= move;
                    cand[std::size_t(j)] += move;
                    if (cand[std::size_t(j)] > 1.0) continue;
                    const double v = phi_of_spectrum({cand}).value;
                    if (v > cur_val) {
                        cur_val = v;
                        cur = cand;
                        improved = true;
                    }
                }
            }
        }
    }
    out.max_found = cur_val;
    out.argmax = cur;
    return out;
}

// ---------------------------------------------------------------------------
// Jacobi comparison

double CurvatureSchedule::kappa_at(double t) const {
    if (knots.empty()) throw PreconditionError("curvature schedule: empty");
    const auto it = std::upper_bound(knots.begin() + 1, knots.end(), t);
    std::size_t idx = std::size_t(it - knots.begin()) - 1;
    if (idx >= kappa.size()) idx = kappa.size() - 1;
    return kappa[idx];
}

void CurvatureSchedule::validate() const {
    if (knots.size() < 2 || kappa.size() + 1 != knots.size())
        throw InvalidParameter("curvature schedule: knots/kappa sizes mismatch");
    if (knots.front() != 0.0) throw InvalidParameter("curvature schedule: must start at 0");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (!(knots[i] < knots[i + 1]))
            throw InvalidParameter("curvature schedule: knots must increase");
    if (!(ell == knots.back())) throw InvalidParameter("curvature schedule: ell must be the last knot");
    if (!(R > 0.0 && R <= ell)) throw InvalidParameter("curvature schedule: need 0 < R <= ell");
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        const double lo = knots[i];
        const double hi = knots[i + 1];
        if (lo < ell - R - 1e-12 && kappa[i] > 0.0)
            throw InvalidParameter("curvature schedule: kappa must be <= 0 before ell - R");
        if (hi > ell - R + 1e-12 && lo > ell - R - 1e-12 && kappa[i] != -1.0)
            throw InvalidParameter("curvature schedule: kappa must be -1 on [ell - R, ell]");
    }
}

CurvatureSchedule make_schedule(const std::vector<double>& prefix_knots,
                                const std::vector<double>& prefix_kappa, double R) {
    CurvatureSchedule s;
    s.knots.push_back(0.0);
    for (double k : prefix_knots) s.knots.push_back(k);
    for (double v : prefix_kappa) s.kappa.push_back(v);
    const double prefix_end = s.knots.back();
    s.knots.push_back(prefix_end + R);
    s.kappa.push_back(-1.0);
    s.ell = prefix_end + R;
    s.R = R;
    s.validate();
    return s;
}

namespace {

struct State {
    double j;
    double jp;
};

// One Cash-Karp 4(5) step for J'' = -kappa J with constant kappa.
State ck_step(const State& y, double kappa, double h, double* err) {
    auto f = [kappa](const State& s) { return State{s.jp, -kappa * s.j}; };
    auto axpy = [](const State& y0, double a, const State& k) {
        return State{y0.j + a * k.j, y0.jp + a * k.jp};
    };
    const State k1 = f(y);
    const State k2 = f(axpy(y, h / 5.0, k1));
    const State k3 = f({y.j + h * (3.0 / 40.0 * k1.j + 9.0 / 40.0 * k2.j),
                        y.jp + h * (3.0 / 40.0 * k1.jp + 9.0 / 40.0 * k2.jp)});
    const State k4 = f({y.j + h * (3.0 / 10.0 * k1.j - 9.0 / 10.0 * k2.j + 6.0 / 5.0 * k3.j),
                        y.jp + h * (3.0 / 10.0 * k1.jp - 9.0 / 10.0 * k2.jp + 6.0 / 5.0 * k3.jp)});
    const State k5 = f({y.j + h * (-11.0 / 54.0 * k1.j + 5.0 / 2.0 * k2.j - 70.0 / 27.0 * k3.j +
                                   35.0 / 27.0 * k4.j),
                        y.jp + h * (-11.0 / 54.0 * k1.jp + 5.0 / 2.0 * k2.jp - 70.0 / 27.0 * k3.jp +
                                    35.0 / 27.0 * k4.jp)});
    const State k6 =
        f({y.j + h * (1631.0 / 55296.0 * k1.j + 175.0 / 512.0 * k2.j + 575.0 / 13824.0 * k3.j +
                      44275.0 / 110592.0 * k4.j + 253.0 / 4096.0 * k5.j),
           y.jp + h * (1631.0 / 55296.0 * k1.jp + 175.0 / 512.0 * k2.jp + 575.0 / 13824.0 * k3.jp +
                       44275.0 / 110592.0 * k4.jp + 253.0 / 4096.0 * k5.jp)});

    const State y5{
        y.j + h * (37.0 / 378.0 * k1.j + 250.0 / 621.0 * k3.j + 125.0 / 594.0 * k4.j +
                   512.0 / 1771.0 * k6.j),
        y.jp + h * (37.0 / 378.0 * k1.jp + 250.0 / 621.0 * k3.jp + 125.0 / 594.0 * k4.jp +
                    512.0 / 1771.0 * k6.jp)};
    const State y4{
        y.j + h * (2825.0 / 27648.0 * k1.j + 18575.0 / 48384.0 * k3.j + 13525.0 / 55296.0 * k4.j +
                   277.0 / 14336.0 * k5.j + 1.0 / 4.0 * k6.j),
        y.jp + h * (2825.0 / 27648.0 * k1.jp + 18575.0 / 48384.0 * k3.jp +
                    13525.0 / 55296.0 * k4.jp + 277.0 / 14336.0 * k5.jp + 1.0 / 4.0 * k6.jp)};
    *err = std::max(std::abs(y5.j - y4.j), std::abs(y5.jp - y4.jp));
    return y5;
}

State integrate_piece(State y, double kappa, double a, double b, long* steps) {
    const double tol = 1e-12;
    double t = a;
    double h = std::min(0.1, b - a);
    while (t < b) {
        h = std::min(h, b - t);
        double err = 0.0;
        const State cand = ck_step(y, kappa, h, &err);
        const double scale =
            tol * std::max({1.0, std::abs(y.j), std::abs(y.jp)});
        if (err <= scale || h <= 1e-14) {
            y = cand;
            t += h;
            ++*steps;
            if (err > 0.0) h = std::min(0.95 * h * std::pow(scale / err, 0.2), 4.0 * h);
            else h *= 2.0;
        } else {
            h = std::max(0.95 * h * std::pow(scale / err, 0.25), 0.05 * h);
        }
    }
    return y;
}

State integrate_to(const CurvatureSchedule& s, State y, double from, double to, long* steps) {
    double t = from;
    for (std::size_t i = 0; i + 1 < s.knots.size(); ++i) {
        const double lo = std::max(s.knots[i], from);
        const double hi = std::min(s.knots[i + 1], to);
        if (lo >= hi) continue;
        y = integrate_piece(y, s.kappa[i], lo, hi, steps);
        t = hi;
    }
    (void)t;
    return y;
}

} // namespace

JacobiResult jacobi_ii(const CurvatureSchedule& schedule, double J0, double J0p,
                       int profile_samples) {
    schedule.validate();
    if (J0 == 0.0 && J0p == 0.0)
        throw InvalidParameter("jacobi_ii: J must not be identically zero");

    JacobiResult out;
    out.bound = 1.0 - 2.0 * std::exp(-2.0 * schedule.R);

    State y{J0, J0p};
    long steps = 0;
    if (profile_samples > 0) {
        double prev = 0.0;
        for (int k = 1; k <= profile_samples; ++k) {
            const double t = schedule.ell * double(k) / double(profile_samples);
            y = integrate_to(schedule, y, prev, t, &steps);
            prev = t;
            if (std::abs(y.j) > 1e-300)
                out.profile.push_back({t, y.jp * y.j / (y.j * y.j)});
        }
    } else {
        y = integrate_to(schedule, y, 0.0, schedule.ell, &steps);
    }
    out.steps = steps;
    out.j_at_ell = y.j;
    out.jp_at_ell = y.jp;
    if (std::abs(y.j) <= 1e-300) {
        out.degenerate = true;
        return out;
    }
    out.ii_at_ell = y.jp * y.j / (y.j * y.j);
    return out;
}

double radius_for_eps(double eps) {
    if (!(eps > 0.0 && eps < 2.0))
        throw InvalidParameter("radius_for_eps: eps must lie in (0, 2)");
    return std::log(std::sqrt(2.0 / eps));
}

double jacobian_bound(double c, int n, double eps) {
    if (!(c > 0.0)) throw InvalidParameter("jacobian_bound: c must be positive");
    if (n < 2) throw InvalidParameter("jacobian_bound: n must be >= 2");
    if (!(eps >= 0.0 && eps < 1.0)) throw InvalidParameter("jacobian_bound: eps must lie in [0, 1)");
    return std::pow(1.0 - eps, -n) * std::pow(c / double(n - 1), n);
}

bool jacobian_chain_check(const SpectrumPoint& spectrum, double c, int n, double eps, double* lhs,
                          double* rhs) {
    if (int(spectrum.eigenvalues.size()) != n)
        throw InvalidParameter("jacobian_chain_check: spectrum dimension mismatch");
    const PhiValue phi = phi_of_spectrum(spectrum);
    if (phi.pole) throw PreconditionError("jacobian_chain_check: spectrum has an eigenvalue at 1");
    const double left =
        std::pow(c, n) / std::pow(double(n), 0.5 * n) * phi.value / std::pow(1.0 - eps, n);
    const double right = jacobian_bound(c, n, eps);
    if (lhs) *lhs = left;
    if (rhs) *rhs = right;
    return left <= right + 1e-9;
}

} // namespace minent
