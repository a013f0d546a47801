#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "point.hpp"

namespace sparsesplit {

enum class Measure { entropy, gini };

struct GlobalCounts {
    std::uint64_t n = 0;
    std::uint64_t c0 = 0;
    std::uint64_t c1 = 0;
};

// One-side counters of a feature that has been seen with value 1 at least
// once. Zero-side counts are derived by subtraction at use sites:
//   c_j00 = c0 - c10,  c_j01 = c1 - c11,  n_j0 = n - n1.
struct FeatureOneSide {
    std::uint64_t n1 = 0;  // points with x_j = 1
    std::uint64_t c10 = 0; // x_j = 1, y = 0
    std::uint64_t c11 = 0; // x_j = 1, y = 1
};

// Global label counters plus per-feature one-side counters. Update cost is
// O(1) per label and O(1) per active feature; absent features cost nothing.
class CounterStore {
public:
    void add_label(int label) {
        ++globals_.n;
        if (label == 0) ++globals_.c0;
        else ++globals_.c1;
    }

    FeatureOneSide& add_active(FeatureId j, int label) {
        FeatureOneSide& f = features_[j];
        ++f.n1;
        if (label == 0) ++f.c10;
        else ++f.c11;
        return f;
    }

    void ingest(const SparsePoint& p) {
        add_label(p.label);
        for (FeatureId j : p.ones) add_active(j, p.label);
    }

    const GlobalCounts& globals() const { return globals_; }

    const FeatureOneSide* find(FeatureId j) const {
        auto it = features_.find(j);
        return it == features_.end() ? nullptr : &it->second;
    }

    const FeatureOneSide& at(FeatureId j) const {
        auto it = features_.find(j);
        if (it == features_.end())
            throw std::out_of_range("CounterStore: unknown feature id");
        return it->second;
    }

    const std::unordered_map<FeatureId, FeatureOneSide>& features() const {
        return features_;
    }

    std::size_t tracked_count() const { return features_.size(); }

    // Assembles a store from explicit counters; validates consistency.
    static CounterStore from_counts(
        const GlobalCounts& g,
        const std::vector<std::pair<FeatureId, FeatureOneSide>>& feats) {
        if (g.n != g.c0 + g.c1)
            throw std::invalid_argument("from_counts: n != c0 + c1");
        CounterStore s;
        s.globals_ = g;
        for (const auto& [j, f] : feats) {
            if (f.n1 != f.c10 + f.c11 || f.n1 == 0)
                throw std::invalid_argument("from_counts: bad one-side counts");
            if (f.c10 > g.c0 || f.c11 > g.c1)
                throw std::invalid_argument("from_counts: one-side exceeds globals");
            if (!s.features_.emplace(j, f).second)
                throw std::invalid_argument("from_counts: duplicate feature id");
        }
        return s;
    }

private:
    GlobalCounts globals_;
    std::unordered_map<FeatureId, FeatureOneSide> features_;
};

namespace detail {

// -a ln(a/(a+b)) - b ln(b/(a+b)) with 0 ln 0 = 0; returns 0 for an empty pair.
inline double branch_cost(std::uint64_t a, std::uint64_t b) {
    double out = 0.0;
    const double s = double(a) + double(b);
    if (a > 0) out -= double(a) * std::log(double(a) / s);
    if (b > 0) out -= double(b) * std::log(double(b) / s);
    return out;
}

// C(c0, c1, theta) = -c0 ln(1-theta) - c1 ln(theta); theta in (0,1).
inline double entropy_C(std::uint64_t c0, std::uint64_t c1, double theta) {
    return -double(c0) * std::log1p(-theta) - double(c1) * std::log(theta);
}

// K(c10, c11, theta) = -c10 ln(c10/(n1(1-theta))) - c11 ln(c11/(n1 theta)),
// 0 ln 0 = 0. Depends only on the one-side counters.
inline double entropy_K(std::uint64_t c10, std::uint64_t c11, double theta) {
    const double n1 = double(c10) + double(c11);
    double out = 0.0;
    if (c10 > 0) out -= double(c10) * std::log(double(c10) / (n1 * (1.0 - theta)));
    if (c11 > 0) out -= double(c11) * std::log(double(c11) / (n1 * theta));
    return out;
}

inline double gini_C(std::uint64_t c0, std::uint64_t c1, double theta) {
    return theta >= 0.5 ? 2.0 * double(c0) * theta
                        : 2.0 * double(c1) * (1.0 - theta);
}

inline double gini_K(std::uint64_t c10, std::uint64_t c11, double theta) {
    const std::uint64_t n1 = c10 + c11;
    double out = n1 > 0 ? 2.0 * double(c10) * double(c11) / double(n1) : 0.0;
    out -= theta >= 0.5 ? 2.0 * double(c10) * theta
                        : 2.0 * double(c11) * (1.0 - theta);
    return out;
}

} // namespace detail

// rho_j = c_j01 / n_j0, the positive-label rate on the zero branch; defined
// as 0 when every point so far has x_j = 1.
inline double rho(const GlobalCounts& g, const FeatureOneSide& f) {
    const std::uint64_t n0 = g.n - f.n1;
    if (n0 == 0) return 0.0;
    return double(g.c1 - f.c11) / double(n0);
}

inline double rho(const CounterStore& s, FeatureId j) {
    return rho(s.globals(), s.at(j));
}

// n-scaled impurity of a single branch holding c10 zeros and c11 ones.
// Equals n * H(D|j) for a feature whose zero branch is empty or pure.
inline double one_branch_cost(std::uint64_t c10, std::uint64_t c11) {
    if (c10 == 0 && c11 == 0)
        throw std::invalid_argument("one_branch_cost: empty branch");
    return detail::branch_cost(c10, c11);
}

inline double impurity(const GlobalCounts& g, Measure m) {
    if (g.n == 0) throw std::domain_error("impurity: empty dataset");
    const double n = double(g.n);
    if (m == Measure::entropy) return detail::branch_cost(g.c0, g.c1) / n;
    return 2.0 * double(g.c0) * double(g.c1) / (n * n);
}

inline double impurity(const CounterStore& s, Measure m) {
    return impurity(s.globals(), m);
}

inline double cond_impurity(const GlobalCounts& g, const FeatureOneSide& f,
                            Measure m) {
    const std::uint64_t c00 = g.c0 - f.c10;
    const std::uint64_t c01 = g.c1 - f.c11;
    const std::uint64_t n0 = g.n - f.n1;
    const double n = double(g.n);
    if (m == Measure::entropy)
        return (detail::branch_cost(f.c10, f.c11) + detail::branch_cost(c00, c01)) / n;
    double out = 2.0 * double(f.c10) * double(f.c11) / double(f.n1);
    if (n0 > 0) out += 2.0 * double(c00) * double(c01) / double(n0);
    return out / n;
}

inline double cond_impurity(const CounterStore& s, FeatureId j, Measure m) {
    return cond_impurity(s.globals(), s.at(j), m);
}

// Conditional impurity with the zero-branch rate pinned to theta instead of
// the empirical rho. For entropy, a positive count against a zero rate
// diverges and is reported as +infinity.
inline double cond_impurity_at(const GlobalCounts& g, const FeatureOneSide& f,
                               double theta, Measure m) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::domain_error("cond_impurity_at: theta outside [0,1]");
    const std::uint64_t c00 = g.c0 - f.c10;
    const std::uint64_t c01 = g.c1 - f.c11;
    const double n = double(g.n);
    if (m == Measure::gini) {
        double out = 2.0 * double(f.c10) * double(f.c11) / double(f.n1);
        out += theta >= 0.5 ? 2.0 * double(c00) * theta
                            : 2.0 * double(c01) * (1.0 - theta);
        return out / n;
    }
    double out = detail::branch_cost(f.c10, f.c11);
    if (c00 > 0) {
        if (theta == 1.0) return std::numeric_limits<double>::infinity();
        out -= double(c00) * std::log1p(-theta);
    }
    if (c01 > 0) {
        if (theta == 0.0) return std::numeric_limits<double>::infinity();
        out -= double(c01) * std::log(theta);
    }
    return out / n;
}

inline double cond_impurity_at(const CounterStore& s, FeatureId j, double theta,
                               Measure m) {
    return cond_impurity_at(s.globals(), s.at(j), theta, m);
}

// Splits n * cond_impurity_at into a feature-independent term C and a
// feature-local term K. K is what the candidate trees key on.
inline std::pair<double, double> decomp_terms(std::uint64_t c0, std::uint64_t c1,
                                              std::uint64_t c10, std::uint64_t c11,
                                              double theta, Measure m) {
    if (m == Measure::entropy) {
        if (!(theta > 0.0 && theta < 1.0))
            throw std::domain_error("decomp_terms: entropy needs theta in (0,1)");
        return {detail::entropy_C(c0, c1, theta), detail::entropy_K(c10, c11, theta)};
    }
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::domain_error("decomp_terms: theta outside [0,1]");
    return {detail::gini_C(c0, c1, theta), detail::gini_K(c10, c11, theta)};
}

inline double info_gain(const CounterStore& s, FeatureId j) {
    return impurity(s, Measure::entropy) - cond_impurity(s, j, Measure::entropy);
}

} // namespace sparsesplit
