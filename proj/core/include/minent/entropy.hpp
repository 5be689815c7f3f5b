#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace minent {

/// An enumerator of group elements with nonnegative lengths, in nondecreasing
/// length order, together with the counting function N(R). Identity has
/// length 0 and id 0.
class LengthOracle {
public:
    virtual ~LengthOracle() = default;

    virtual std::string describe() const = 0;

    /// N(R) = #{elements with length <= R} (a volume for continuous oracles).
    virtual double count(double R) const = 0;

    /// Natural sampling granularity for growth regression; 0 means continuous.
    virtual double sample_step() const { return 0.0; }

    virtual bool enumerable() const { return false; }

    /// Visit (id, length) in nondecreasing length order while length <= cutoff,
    /// at most `budget` elements. Returns false iff the budget truncated the
    /// walk before the cutoff was exhausted.
    virtual bool enumerate(double cutoff, std::uint64_t budget,
                           const std::function<void(std::uint64_t, double)>& visit) const;

    /// d/dR of count, for continuous oracles integrated against e^{-sR}.
    virtual std::optional<std::function<double(double)>> density() const { return std::nullopt; }

    /// Closed-form identity-free Poincare series, when one is known.
    /// +infinity signals divergence at this s.
    virtual std::optional<double> poincare_star_closed(double s) const {
        (void)s;
        return std::nullopt;
    }
};

std::unique_ptr<LengthOracle> trivial_oracle();

/// Free group of the given rank; generator i and its inverse both have length
/// generator_lengths[i] (all 1 when the vector is empty).
std::unique_ptr<LengthOracle> free_group_oracle(int rank, std::vector<double> generator_lengths = {});

struct RewriteRule {
    std::string lhs;
    std::string rhs;
};

/// Finitely presented group explored breadth-first through a user-supplied
/// confluent rewriting system. Generators are single lowercase letters whose
/// inverses are the corresponding uppercase letters; free reduction must be
/// part of the rules. Lengths are per generator (inverse letters match).
std::unique_ptr<LengthOracle> rewriting_oracle(std::string generators,
                                               std::vector<RewriteRule> rules,
                                               std::vector<double> lengths = {});

/// Closed-form volume-growth oracle: count(R) = volume(R).
std::unique_ptr<LengthOracle> growth_oracle(std::string name,
                                            std::function<double(double)> volume,
                                            std::function<double(double)> dvolume);

/// Ball volume of hyperbolic 3-space: pi (sinh 2R - 2R).
std::unique_ptr<LengthOracle> h3_ball_oracle();

struct PoincarePartial {
    double value = 0.0;
    double cutoff = 0.0;
    std::uint64_t terms = 0;
    bool truncated = false;
};

/// Sum of e^{-s length} over elements of length <= cutoff (an integral for
/// continuous oracles). Deterministic.
PoincarePartial poincare_partial(const LengthOracle& oracle, double s, double cutoff,
                                 std::uint64_t budget = 20000000ULL);

struct CriticalExponent {
    double exponent = 0.0;
    bool conclusive = false;
    std::string note;
};

/// Growth-slope estimate of limsup log N(R) / R by least squares on log N
/// over [R_max/2, R_max]; equals the critical exponent of the Poincare
/// series for the supported oracles.
CriticalExponent critical_exponent(const LengthOracle& oracle, double tol, double R_max);

// ---------------------------------------------------------------------------
// Free-product tube model

struct Syllable {
    int factor = 0; ///< 0 or 1
    double length = 0.0;
};

/// Alternating identity-free syllables of a free-product element.
struct SyllableWord {
    std::vector<Syllable> syllables;
};

/// Sum over syllables of (factor length + 2L): the tube length model.
/// Throws on malformed alternation or nonpositive syllable lengths.
double syllable_lower_bound(const SyllableWord& w, double L);

struct TubeSeriesBound {
    bool converges = false;
    double q = 0.0;
    double bound = 0.0; ///< 1 + 4q/(1-q) when q < 1
    double threshold_L = 0.0;
};

/// Geometric-series bound for the free-product Poincare series with
/// identity-free factor sums P1*(s), P2*(s) and tube half-length L.
TubeSeriesBound tube_series_bound(const std::function<double(double)>& p1_star,
                                  const std::function<double(double)>& p2_star, double L,
                                  double s);

struct FreeProductRow {
    double s = 0.0;
    double q = 0.0;
    double bound = 0.0;
    double threshold_L = 0.0;
    double partial = 0.0;
    bool converges = false;
    bool within_bound = false;
};

struct FreeProductReport {
    double L = 0.0;
    double length_cutoff = 0.0;
    std::uint64_t words = 0;
    bool truncated = false;
    double factor_exponent_1 = 0.0;
    double factor_exponent_2 = 0.0;
    std::vector<FreeProductRow> rows;
    bool all_ok = true;
};

/// Brute-force enumeration of free-product elements as syllable words with
/// the tube length model, in syllable-count-major, length-minor order;
/// verifies the partial sums against tube_series_bound on the s grid.
FreeProductReport free_product_exponent_check(const LengthOracle& factor1,
                                              const LengthOracle& factor2, double L,
                                              const std::vector<double>& s_grid,
                                              double length_cutoff,
                                              std::uint64_t budget = 1000000ULL);

/// Ball-growth entropy bound (n-1)(1+2 delta) under Ric >= -(n-1)(1+2 delta)^2.
double ent_upper_bound_bishop(double delta, int n);

/// 2 (sum of volumes)^{1/3}; an empty list gives 0.
double minent_target(const std::vector<double>& volumes);

} // namespace minent
