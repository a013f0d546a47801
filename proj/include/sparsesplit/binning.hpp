#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace sparsesplit {

// Bucketing parameters for a (1+alpha) guarantee. beta = alpha/(alpha+2)
// drives the Gini scheme's bucket width.
struct Scheme {
    double alpha;
    double beta;

    explicit Scheme(double a) : alpha(a), beta(a / (a + 2.0)) {
        if (!(a > 0.0) || !std::isfinite(a))
            throw std::invalid_argument("Scheme: alpha must be positive and finite");
    }
};

// A bucket of zero-branch rates: closed interval [s, t] with the centroid mu
// used to form surrogate keys.
struct Interval {
    double s;
    double t;
    double mu;
};

// Signed bucket index for the entropy scheme. Finite indices are nonzero;
// the sentinels name the degenerate buckets [0,0] and [1,1]. Ordering follows
// the buckets' position in [0,1].
class EntBinId {
public:
    static constexpr EntBinId neg_inf() { return EntBinId(kNegInf); }
    static constexpr EntBinId pos_inf() { return EntBinId(kPosInf); }

    static EntBinId finite(std::int32_t i) {
        if (i == 0 || i == kNegInf || i == kPosInf)
            throw std::invalid_argument("EntBinId: invalid finite index");
        return EntBinId(i);
    }

    bool is_neg_inf() const { return raw_ == kNegInf; }
    bool is_pos_inf() const { return raw_ == kPosInf; }
    bool is_finite() const { return raw_ != kNegInf && raw_ != kPosInf; }

    // Finite index value; meaningless for the sentinels.
    std::int32_t value() const { return raw_; }

    // Neighboring finite index below/above, skipping the unused index 0.
    EntBinId prev() const { return EntBinId(raw_ == 1 ? -1 : raw_ - 1); }
    EntBinId next() const { return EntBinId(raw_ == -1 ? 1 : raw_ + 1); }

    friend std::strong_ordering operator<=>(EntBinId, EntBinId) = default;

private:
    constexpr explicit EntBinId(std::int32_t r) : raw_(r) {}

    static constexpr std::int32_t kNegInf = std::numeric_limits<std::int32_t>::min();
    static constexpr std::int32_t kPosInf = std::numeric_limits<std::int32_t>::max();

    std::int32_t raw_;
};

using GiniBinId = std::int32_t;

// Entropy-scheme bucket. For i < 0 the bounds are
//   s_i = 2^(-(1+alpha)^(-i)),  t_i = 2^(-(1+alpha)^(-i-1)),
// and for i > 0 the mirror image around 1/2: s_i = 1 - t_{-i}, t_i = 1 - s_{-i}.
// The centroid is the endpoint closer to 1/2: mu_i = s_i below, t_i above.
inline Interval ent_bin(const Scheme& sc, EntBinId id) {
    if (id.is_neg_inf()) return {0.0, 0.0, 0.0};
    if (id.is_pos_inf()) return {1.0, 1.0, 1.0};
    const std::int32_t i = id.value();
    if (i < 0) {
        const double s = std::exp2(-std::pow(1.0 + sc.alpha, double(-i)));
        const double t = std::exp2(-std::pow(1.0 + sc.alpha, double(-i - 1)));
        return {s, t, s};
    }
    const double s = 1.0 - std::exp2(-std::pow(1.0 + sc.alpha, double(i - 1)));
    const double t = 1.0 - std::exp2(-std::pow(1.0 + sc.alpha, double(i)));
    return {s, t, t};
}

// Bucket index for a zero-branch rate r in [0,1]. Exact 0, 1/2, 1 map to
// the -inf bucket, bucket 1, and the +inf bucket. Otherwise the index is
// +-ceil(log_{1+alpha} log_{1/2} x) with x = r below 1/2 and x = 1-r above.
// libm rounding can land one bucket off at interval borders, so membership
// is re-checked and corrected toward a containing neighbor.
inline EntBinId ent_index(const Scheme& sc, double r) {
    if (!(r >= 0.0 && r <= 1.0))
        throw std::domain_error("ent_index: rho outside [0,1]");
    if (r == 0.0) return EntBinId::neg_inf();
    if (r == 1.0) return EntBinId::pos_inf();
    if (r == 0.5) return EntBinId::finite(1);
    const bool below = r < 0.5;
    const double g = -std::log2(below ? r : 1.0 - r); // log_{1/2} x, > 1
    std::int32_t m = std::int32_t(std::ceil(std::log(g) / std::log1p(sc.alpha)));
    if (m < 1) m = 1;
    EntBinId id = EntBinId::finite(below ? -m : m);
    Interval b = ent_bin(sc, id);
    if (r >= b.s && r <= b.t) return id;
    const EntBinId adj = r < b.s ? id.prev() : id.next();
    b = ent_bin(sc, adj);
    if (r >= b.s && r <= b.t) return adj;
    throw std::logic_error("ent_index: membership unresolved");
}

// Largest Gini bucket index: floor(2(alpha+2)/alpha). Index 0's interval
// starts below 0 and the last one ends above 1, so [0,1] is covered.
inline GiniBinId gini_index_limit(const Scheme& sc) {
    return GiniBinId(std::floor(2.0 * (sc.alpha + 2.0) / sc.alpha));
}

// Gini-scheme bucket i: [s_i, t_i] = [(i/2 - 1/4) beta, (i/2 + 3/4) beta],
// centroid mu_i = (i/2 + 1/4) beta. Consecutive buckets overlap by beta/2.
inline Interval gini_bin(const Scheme& sc, GiniBinId i) {
    if (i < 0 || i > gini_index_limit(sc))
        throw std::out_of_range("gini_bin: index outside scheme range");
    const double half = 0.5 * double(i);
    return {(half - 0.25) * sc.beta, (half + 0.75) * sc.beta,
            (half + 0.25) * sc.beta};
}

// Bucket index floor(2 r / beta) clamped to the scheme range, with the same
// membership correction as ent_index. r then sits at least beta/4 away from
// the chosen bucket's boundary in exact arithmetic.
inline GiniBinId gini_index(const Scheme& sc, double r) {
    if (!(r >= 0.0 && r <= 1.0))
        throw std::domain_error("gini_index: rho outside [0,1]");
    const GiniBinId lim = gini_index_limit(sc);
    const double raw = std::floor(2.0 * r * (sc.alpha + 2.0) / sc.alpha);
    GiniBinId i = raw <= 0.0 ? 0 : (raw >= double(lim) ? lim : GiniBinId(raw));
    Interval b = gini_bin(sc, i);
    if (r >= b.s && r <= b.t) return i;
    if (r < b.s && i > 0) --i;
    else if (r > b.t && i < lim) ++i;
    b = gini_bin(sc, i);
    if (r >= b.s && r <= b.t) return i;
    throw std::logic_error("gini_index: membership unresolved");
}

} // namespace sparsesplit
