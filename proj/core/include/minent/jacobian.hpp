#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace minent {

/// Eigenvalues of a symmetric endomorphism with trace 1, each in [0, 1]
/// (sum checked to 1e-12).
struct SpectrumPoint {
    std::vector<double> eigenvalues;
};

SpectrumPoint validated_spectrum(std::vector<double> eigenvalues);

struct PhiValue {
    double value = 0.0;
    bool pole = false; ///< an eigenvalue hit 1: value reported as +infinity
};

/// phi(H) = (det H)^{1/2} / det(Id - H) on the spectrum simplex.
PhiValue phi_of_spectrum(const SpectrumPoint& p);

struct AlgebraicMax {
    double max_found = 0.0;
    std::vector<double> argmax;
    double bound = 0.0;         ///< n^{n/2} / (n-1)^n
    double uniform_value = 0.0; ///< phi at the uniform point (attains the bound)
    long samples = 0;
};

/// Random simplex search plus local polish for the maximum of phi; the
/// maximum is n^{n/2}/(n-1)^n, attained only at the uniform spectrum.
AlgebraicMax algebraic_max(int n, long samples, std::uint64_t seed = 2718281828ULL);

/// Piecewise-constant curvature kappa(t) on [0, ell]: kappa <= 0 before
/// ell - R and kappa = -1 on the final window of length R.
struct CurvatureSchedule {
    std::vector<double> knots; ///< 0 = t_0 < t_1 < ... < t_m = ell
    std::vector<double> kappa; ///< one value per interval
    double ell = 0.0;
    double R = 0.0;

    double kappa_at(double t) const;
    void validate() const;
};

/// Convenience: nonpositive prefix pieces followed by a kappa = -1 window of
/// length R.
CurvatureSchedule make_schedule(const std::vector<double>& prefix_knots,
                                const std::vector<double>& prefix_kappa, double R);

struct JacobiResult {
    double ii_at_ell = 0.0; ///< J'(ell) J(ell) / J(ell)^2
    double j_at_ell = 0.0;
    double jp_at_ell = 0.0;
    double bound = 0.0; ///< 1 - 2 e^{-2R}
    bool degenerate = false;
    long steps = 0;
    std::vector<std::pair<double, double>> profile; ///< sampled (t, II)
};

/// Integrate the scalar Jacobi equation J'' = -kappa(t) J by an embedded
/// 4(5) pair with step rejection (local error <= 1e-12 per step, pieces
/// split at the schedule knots) and report the second-fundamental-form
/// ratio at ell. For J(0) = 0, J'(0) > 0 the contract is
/// II(ell) >= 1 - 2 e^{-2R}.
JacobiResult jacobi_ii(const CurvatureSchedule& schedule, double J0, double J0p,
                       int profile_samples = 0);

/// R_eps = ln(sqrt(2/eps)); the unique radius with 2 e^{-2 R} = eps.
double radius_for_eps(double eps);

/// (1/(1-eps)^n) (c/(n-1))^n.
double jacobian_bound(double c, int n, double eps);

/// Composed inequality: c^n/n^{n/2} * phi(spectrum) / (1-eps)^n is at most
/// jacobian_bound(c, n, eps) (slack 1e-9). Throws on a pole.
bool jacobian_chain_check(const SpectrumPoint& spectrum, double c, int n, double eps,
                          double* lhs = nullptr, double* rhs = nullptr);

} // namespace minent
