#include "minent/entropy.hpp"

#include "minent/errors.hpp"
#include "minent/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace minent {

bool LengthOracle::enumerate(double, std::uint64_t,
                             const std::function<void(std::uint64_t, double)>&) const {
    throw PreconditionError("oracle '" + describe() + "' does not support enumeration");
}

// ---------------------------------------------------------------------------
// Trivial group

namespace {

class TrivialOracle final : public LengthOracle {
public:
    std::string describe() const override { return "trivial"; }
    double count(double R) const override { return R >= 0.0 ? 1.0 : 0.0; }
    double sample_step() const override { return 1.0; }
    bool enumerable() const override { return true; }
    bool enumerate(double cutoff, std::uint64_t budget,
                   const std::function<void(std::uint64_t, double)>& visit) const override {
        if (cutoff >= 0.0 && budget > 0) visit(0, 0.0);
        return true;
    }
    std::optional<double> poincare_star_closed(double) const override { return 0.0; }
};

// ---------------------------------------------------------------------------
// Free groups

class FreeGroupOracle final : public LengthOracle {
public:
    FreeGroupOracle(int rank, std::vector<double> lengths) : rank_(rank), lengths_(std::move(lengths)) {
        if (rank < 1) throw InvalidParameter("free group oracle: rank must be >= 1");
        if (lengths_.empty()) lengths_.assign(std::size_t(rank), 1.0);
        if (int(lengths_.size()) != rank)
            throw InvalidParameter("free group oracle: one length per generator");
        for (double l : lengths_)
            if (!(l > 0.0)) throw InvalidParameter("free group oracle: lengths must be positive");
        uniform_ = true;
        for (double l : lengths_) uniform_ = uniform_ && std::abs(l - lengths_[0]) <= 1e-15;
    }

    std::string describe() const override {
        return "free(rank=" + std::to_string(rank_) + ")";
    }

    double count(double R) const override {
        if (R < 0.0) return 0.0;
        if (uniform_) {
            const double l = lengths_[0];
            const long n = long(std::floor(R / l + 1e-12));
            // 1 + sum_{j=1..n} 2k (2k-1)^{j-1}
            double total = 1.0;
            double sphere = 2.0 * rank_;
            for (long j = 1; j <= n; ++j) {
                total += sphere;
                sphere *= 2.0 * rank_ - 1.0;
            }
            return total;
        }
        double total = 0.0;
        enumerate(R, 50000000ULL, [&](std::uint64_t, double) { total += 1.0; });
        return total;
    }

    double sample_step() const override {
        return uniform_ ? lengths_[0] : *std::min_element(lengths_.begin(), lengths_.end());
    }

    bool enumerable() const override { return true; }

    bool enumerate(double cutoff, std::uint64_t budget,
                   const std::function<void(std::uint64_t, double)>& visit) const override {
        if (cutoff < 0.0 || budget == 0) return true;
        // Letters 0..2k-1; letter g pairs with inverse g^rank (mod 2k).
        struct Node {
            double len;
            std::uint64_t seq;
            int last; // -1 for the identity
        };
        auto cmp = [](const Node& a, const Node& b) {
            return a.len > b.len || (a.len == b.len && a.seq > b.seq);
        };
        std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
        std::uint64_t seq = 0;
        heap.push({0.0, seq++, -1});
        std::uint64_t id = 0;
        while (!heap.empty()) {
            const Node node = heap.top();
            heap.pop();
            if (id >= budget) return false;
            visit(id++, node.len);
            for (int g = 0; g < 2 * rank_; ++g) {
                if (node.last >= 0 && g == (node.last + rank_) % (2 * rank_)) continue;
                const double nl = node.len + lengths_[std::size_t(g % rank_)];
                if (nl <= cutoff) heap.push({nl, seq++, g});
            }
        }
        return true;
    }

    std::optional<double> poincare_star_closed(double s) const override {
        if (!uniform_) return std::nullopt;
        const double x = std::exp(-s * lengths_[0]);
        const double k2 = 2.0 * rank_;
        if ((k2 - 1.0) * x >= 1.0) return std::numeric_limits<double>::infinity();
        return k2 * x / (1.0 - (k2 - 1.0) * x);
    }

private:
    int rank_;
    std::vector<double> lengths_;
    bool uniform_ = false;
};

// ---------------------------------------------------------------------------
// Confluent-rewriting Cayley exploration

class RewritingOracle final : public LengthOracle {
public:
    RewritingOracle(std::string generators, std::vector<RewriteRule> rules,
                    std::vector<double> lengths)
        : gens_(std::move(generators)), rules_(std::move(rules)), lengths_(std::move(lengths)) {
        if (gens_.empty()) throw InvalidParameter("rewriting oracle: need at least one generator");
        for (char c : gens_)
            if (c < 'a' || c > 'z')
                throw InvalidParameter("rewriting oracle: generators are lowercase letters");
        if (lengths_.empty()) lengths_.assign(gens_.size(), 1.0);
        if (lengths_.size() != gens_.size())
            throw InvalidParameter("rewriting oracle: one length per generator");
        for (double l : lengths_)
            if (!(l > 0.0)) throw InvalidParameter("rewriting oracle: lengths must be positive");
    }

    std::string describe() const override { return "rewriting(" + gens_ + ")"; }

    double count(double R) const override {
        build(R);
        const auto& d = cache_dists_;
        return double(std::upper_bound(d.begin(), d.end(), R + 1e-12) - d.begin());
    }

    double sample_step() const override {
        return *std::min_element(lengths_.begin(), lengths_.end());
    }

    bool enumerable() const override { return true; }

    bool enumerate(double cutoff, std::uint64_t budget,
                   const std::function<void(std::uint64_t, double)>& visit) const override {
        // Dijkstra over the Cayley graph with edge weights per generator;
        // states are rewriting normal forms.
        struct Node {
            double len;
            std::uint64_t seq;
            std::string word;
        };
        auto cmp = [](const Node& a, const Node& b) {
            return a.len > b.len || (a.len == b.len && a.seq > b.seq);
        };
        std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
        std::unordered_map<std::string, double> dist;
        std::uint64_t seq = 0;
        heap.push({0.0, seq++, ""});
        dist[""] = 0.0;
        std::uint64_t id = 0;
        while (!heap.empty()) {
            Node node = heap.top();
            heap.pop();
            auto it = dist.find(node.word);
            if (it != dist.end() && node.len > it->second + 1e-15) continue;
            if (id >= budget) return false;
            visit(id++, node.len);
            dist[node.word] = -1.0; // mark visited: lengths are nonnegative
            for (std::size_t g = 0; g < gens_.size(); ++g) {
                for (char c : {gens_[g], char(std::toupper(gens_[g]))}) {
                    std::string next = normal_form(node.word + c);
                    const double nl = node.len + lengths_[g];
                    if (nl > cutoff) continue;
                    auto jt = dist.find(next);
                    if (jt == dist.end() || nl < jt->second - 1e-15) {
                        if (jt != dist.end() && jt->second == -1.0) continue;
                        dist[next] = nl;
                        heap.push({nl, seq++, std::move(next)});
                    }
                }
            }
        }
        return true;
    }

private:
    std::string normal_form(std::string w) const {
        for (long guard = 0; guard < 100000; ++guard) {
            bool changed = false;
            for (const auto& rule : rules_) {
                const auto pos = w.find(rule.lhs);
                if (pos != std::string::npos) {
                    w = w.substr(0, pos) + rule.rhs + w.substr(pos + rule.lhs.size());
                    changed = true;
                    break;
                }
            }
            if (!changed) return w;
        }
        throw PreconditionError("rewriting oracle: rewriting did not terminate (rules confluent?)");
    }

    void build(double R) const {
        std::scoped_lock lock(mu_);
        if (R <= cache_R_) return;
        std::vector<double> dists;
        const bool complete = enumerate(R, 50000000ULL, [&](std::uint64_t, double l) {
            dists.push_back(l);
        });
        if (!complete)
            throw PreconditionError("rewriting oracle: enumeration budget exceeded for N(R)");
        cache_dists_ = std::move(dists);
        cache_R_ = R;
    }

    std::string gens_;
    std::vector<RewriteRule> rules_;
    std::vector<double> lengths_;
    mutable std::mutex mu_;
    mutable std::vector<double> cache_dists_;
    mutable double cache_R_ = -1.0;
};

// ---------------------------------------------------------------------------
// Closed-form growth

class GrowthOracle final : public LengthOracle {
public:
    GrowthOracle(std::string name, std::function<double(double)> volume,
                 std::function<double(double)> dvolume)
        : name_(std::move(name)), vol_(std::move(volume)), dvol_(std::move(dvolume)) {}

    std::string describe() const override { return name_; }
    double count(double R) const override { return R <= 0.0 ? 0.0 : vol_(R); }
    std::optional<std::function<double(double)>> density() const override { return dvol_; }

private:
    std::string name_;
    std::function<double(double)> vol_;
    std::function<double(double)> dvol_;
};

} // namespace

std::unique_ptr<LengthOracle> trivial_oracle() { return std::make_unique<TrivialOracle>(); }

std::unique_ptr<LengthOracle> free_group_oracle(int rank, std::vector<double> generator_lengths) {
    return std::make_unique<FreeGroupOracle>(rank, std::move(generator_lengths));
}

std::unique_ptr<LengthOracle> rewriting_oracle(std::string generators,
                                               std::vector<RewriteRule> rules,
                                               std::vector<double> lengths) {
    return std::make_unique<RewritingOracle>(std::move(generators), std::move(rules),
                                             std::move(lengths));
}

std::unique_ptr<LengthOracle> growth_oracle(std::string name,
                                            std::function<double(double)> volume,
                                            std::function<double(double)> dvolume) {
    return std::make_unique<GrowthOracle>(std::move(name), std::move(volume), std::move(dvolume));
}

std::unique_ptr<LengthOracle> h3_ball_oracle() {
    return growth_oracle(
        "h3_ball", [](double R) { return std::numbers::pi * (std::sinh(2.0 * R) - 2.0 * R); },
        [](double R) { return std::numbers::pi * (2.0 * std::cosh(2.0 * R) - 2.0); });
}

// ---------------------------------------------------------------------------

PoincarePartial poincare_partial(const LengthOracle& oracle, double s, double cutoff,
                                 std::uint64_t budget) {
    if (!std::isfinite(cutoff)) throw InvalidParameter("poincare_partial: cutoff must be finite");
    PoincarePartial out;
    out.cutoff = cutoff;
    if (oracle.enumerable()) {
        double sum = 0.0;
        std::uint64_t terms = 0;
        const bool complete = oracle.enumerate(cutoff, budget, [&](std::uint64_t, double len) {
            sum += std::exp(-s * len);
            ++terms;
        });
        out.value = sum;
        out.terms = terms;
        out.truncated = !complete;
        return out;
    }
    const auto density = oracle.density();
    if (!density)
        throw PreconditionError("poincare_partial: oracle has neither enumeration nor density");
    const auto f = *density;
    out.value = integrate([f, s](double R) { return std::exp(-s * R) * f(R); }, 0.0, cutoff, 1e-10)
                    .value;
    return out;
}

CriticalExponent critical_exponent(const LengthOracle& oracle, double tol, double R_max) {
    if (!(R_max > 0.0)) throw InvalidParameter("critical_exponent: R_max must be positive");
    const double lo = R_max / 2.0;
    std::vector<double> xs, ys;
    const double step = oracle.sample_step();
    if (step > 0.0) {
        for (long k = long(std::ceil(lo / step - 1e-9)); k * step <= R_max * (1.0 + 1e-12); ++k) {
            const double R = double(k) * step;
            const double N = oracle.count(R);
            if (N >= 1.0) {
                xs.push_back(R);
                ys.push_back(std::log(N));
            }
        }
    } else {
        const int n = 128;
        for (int i = 0; i <= n; ++i) {
            const double R = lo + (R_max - lo) * double(i) / double(n);
            const double N = oracle.count(R);
            if (N > 0.0) {
                xs.push_back(R);
                ys.push_back(std::log(N));
            }
        }
    }

    CriticalExponent out;
    if (xs.size() < 3) {
        out.note = "insufficient growth data in [" + std::to_string(lo) + ", " +
                   std::to_string(R_max) + "]";
        return out;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(xs.size());
    my /= double(xs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) {
        out.note = "degenerate sample spacing";
        return out;
    }
    out.exponent = sxy / sxx;
    out.conclusive = true;
    std::ostringstream note;
    note << xs.size() << " samples on [" << lo << ", " << R_max << "], target tol " << tol;
    out.note = note.str();
    return out;
}

// ---------------------------------------------------------------------------
// Free-product tube model

double syllable_lower_bound(const SyllableWord& w, double L) {
    if (!(L > 0.0)) throw InvalidParameter("syllable_lower_bound: L must be positive");
    double total = 0.0;
    for (std::size_t i = 0; i < w.syllables.size(); ++i) {
        const Syllable& s = w.syllables[i];
        if (s.factor != 0 && s.factor != 1)
            throw InvalidParameter("syllable word: factor tags must be 0 or 1");
        if (s.length < 0.0) throw InvalidParameter("syllable word: negative syllable length");
        // Identity syllables are admitted only as leading/trailing padding of
        // the canonical alternating form; they still count a tube crossing.
        if (s.length == 0.0 && i != 0 && i + 1 != w.syllables.size())
            throw InvalidParameter("syllable word: interior syllables must be nontrivial");
        if (i > 0 && w.syllables[i - 1].factor == s.factor)
            throw InvalidParameter("syllable word: adjacent syllables in the same factor");
        total += s.length + 2.0 * L;
    }
    return total;
}

TubeSeriesBound tube_series_bound(const std::function<double(double)>& p1_star,
                                  const std::function<double(double)>& p2_star, double L,
                                  double s) {
    if (!(L > 0.0) || !(s > 0.0))
        throw InvalidParameter("tube_series_bound: L and s must be positive");
    const double p1 = p1_star(s);
    const double p2 = p2_star(s);
    if (!(p1 >= 0.0) || !(p2 >= 0.0) || !std::isfinite(p1) || !std::isfinite(p2))
        throw InvalidParameter("tube_series_bound: factor sums must be finite and nonnegative");
    TubeSeriesBound out;
    out.q = std::exp(-4.0 * s * L) * p1 * p2;
    out.threshold_L = std::log(p1 * p2) / (4.0 * s);
    out.converges = out.q < 1.0;
    out.bound = out.converges ? 1.0 + 4.0 * out.q / (1.0 - out.q)
                              : std::numeric_limits<double>::infinity();
    return out;
}

namespace {

struct FactorTable {
    std::vector<double> lengths; // identity-free, nondecreasing
    bool truncated = false;
};

FactorTable factor_elements(const LengthOracle& factor, double max_len, std::uint64_t budget) {
    FactorTable table;
    table.truncated = !factor.enumerate(max_len, budget, [&](std::uint64_t id, double len) {
        if (id > 0) table.lengths.push_back(len);
    });
    return table;
}

} // namespace

FreeProductReport free_product_exponent_check(const LengthOracle& factor1,
                                              const LengthOracle& factor2, double L,
                                              const std::vector<double>& s_grid,
                                              double length_cutoff, std::uint64_t budget) {
    if (!(L > 0.0)) throw InvalidParameter("free_product_exponent_check: L must be positive");
    if (!(length_cutoff > 0.0))
        throw InvalidParameter("free_product_exponent_check: cutoff must be positive");

    FreeProductReport rep;
    rep.L = L;
    rep.length_cutoff = length_cutoff;

    const double factor_budget_len = length_cutoff - 2.0 * L;
    const FactorTable t1 =
        factor_budget_len > 0.0 ? factor_elements(factor1, factor_budget_len, budget)
                                : FactorTable{};
    const FactorTable t2 =
        factor_budget_len > 0.0 ? factor_elements(factor2, factor_budget_len, budget)
                                : FactorTable{};
    rep.truncated = t1.truncated || t2.truncated;

    // Enumerate elements in the canonical alternating form
    // h1' h1'' ... hn' hn'' with h1' and hn'' possibly trivial, interior
    // syllables identity-free, modeled length sum(len_i) + 4 n L (trivial
    // padding syllables still count a tube crossing). Pair-count-major,
    // length-minor order; within one pattern the recursion walks factor
    // elements in nondecreasing length order.
    std::vector<double> modeled_lengths;
    modeled_lengths.push_back(0.0); // identity (n = 0)
    std::uint64_t words = 1;
    bool budget_hit = false;

    const std::vector<double>* tables[2] = {&t1.lengths, &t2.lengths};
    for (int pairs = 1; !budget_hit; ++pairs) {
        const double pad = 4.0 * double(pairs) * L;
        if (pad > length_cutoff) break;

        bool any = false;
        // Patterns: (count from factor 1, count from factor 2, leading factor)
        struct Pattern {
            int n0, n1, lead;
        };
        const Pattern patterns[4] = {
            {pairs, pairs, 0},         // nontrivial ends on both sides
            {pairs, pairs - 1, 0},     // trailing syllable trivial
            {pairs - 1, pairs, 1},     // leading syllable trivial
            {pairs - 1, pairs - 1, 1}, // both ends trivial
        };
        for (const Pattern& pat : patterns) {
            const int n_syll = pat.n0 + pat.n1;
            if (n_syll == 0) continue; // the identity, counted once at n = 0
            if ((pat.n0 > 0 && tables[0]->empty()) || (pat.n1 > 0 && tables[1]->empty()))
                continue;
            const double min0 = tables[0]->empty() ? 0.0 : tables[0]->front();
            const double min1 = tables[1]->empty() ? 0.0 : tables[1]->front();
            std::function<void(int, double)> walk = [&](int i, double acc) {
                if (budget_hit) return;
                if (i == n_syll) {
                    modeled_lengths.push_back(acc);
                    ++words;
                    any = true;
                    if (words >= budget) budget_hit = true;
                    return;
                }
                const int factor = (pat.lead + i) % 2;
                const auto& tab = *tables[factor];
                // Remaining syllables after this one, per factor.
                int rem[2] = {pat.n0, pat.n1};
                for (int j = 0; j <= i; ++j) rem[(pat.lead + j) % 2]--;
                const double rest_min = rem[0] * min0 + rem[1] * min1;
                for (double len : tab) {
                    const double next = acc + len;
                    if (next + rest_min > length_cutoff) break;
                    walk(i + 1, next);
                    if (budget_hit) return;
                }
            };
            walk(0, pad);
        }
        if (!any) break;
    }
    rep.words = words;
    rep.truncated = rep.truncated || budget_hit;

    const double R_max = std::min(12.0, factor_budget_len > 0 ? factor_budget_len : 12.0);
    rep.factor_exponent_1 = critical_exponent(factor1, 1e-3, R_max).exponent;
    rep.factor_exponent_2 = critical_exponent(factor2, 1e-3, R_max).exponent;

    auto p_star = [&](const LengthOracle& f, const FactorTable& t, double s) {
        if (auto closed = f.poincare_star_closed(s)) return *closed;
        double sum = 0.0;
        for (double len : t.lengths) sum += std::exp(-s * len);
        return sum;
    };

    for (double s : s_grid) {
        FreeProductRow row;
        row.s = s;
        const TubeSeriesBound b = tube_series_bound(
            [&](double ss) { return p_star(factor1, t1, ss); },
            [&](double ss) { return p_star(factor2, t2, ss); }, L, s);
        row.q = b.q;
        row.bound = b.bound;
        row.threshold_L = b.threshold_L;
        row.converges = b.converges;
        double partial = 0.0;
        for (double len : modeled_lengths) partial += std::exp(-s * len);
        row.partial = partial;
        row.within_bound = !row.converges || partial <= row.bound * (1.0 + 1e-12) + 1e-9;
        rep.all_ok = rep.all_ok && row.within_bound;
        rep.rows.push_back(row);
    }
    return rep;
}

double ent_upper_bound_bishop(double delta, int n) {
    if (n < 2) throw InvalidParameter("ent_upper_bound_bishop: n must be >= 2");
    if (!(delta >= 0.0)) throw InvalidParameter("ent_upper_bound_bishop: delta must be >= 0");
    return double(n - 1) * (1.0 + 2.0 * delta);
}

double minent_target(const std::vector<double>& volumes) {
    double total = 0.0;
    for (double v : volumes) {
        if (!(v > 0.0)) throw InvalidParameter("minent_target: volumes must be positive");
        total += v;
    }
    if (volumes.empty()) return 0.0;
    return 2.0 * std::cbrt(total);
}

} // namespace minent
