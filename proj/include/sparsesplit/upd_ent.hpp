#pragma once

#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "binning.hpp"
#include "counters.hpp"
#include "split.hpp"

namespace sparsesplit {

struct UpdEntStats {
    std::size_t nonempty_trees = 0; // buckets currently holding a candidate
    std::uint64_t relocations = 0;  // direct placements a = b = ind(rho), cumulative
    std::uint64_t extensions = 0;   // one-bucket widenings of [a, b], cumulative
};

// Streaming (1+alpha)-approximate best split under conditional entropy.
//
// Each tracked feature j occupies a contiguous bucket range [a, b] of the
// entropy Scheme that contains rho_j. It appears in the candidate tree T_i of
// every bucket in the range, keyed by the feature-local decomposition term
// K(c_j10, c_j11, mu_i) (one_branch_cost for the degenerate buckets), so the
// per-bucket minimum is a near-optimal candidate whenever rho_j is near mu_i.
// The auxiliary trees L_a / U_b key features linearly by s_a*n_j1 - c_j11 and
// t_b*n_j1 - c_j11; comparing the tree extremes against s_a*n - c1 and
// t_b*n - c1 detects every rho that left [s_a, t_b] without touching
// zero-side counters (the comparisons are equivalent to rho < s_a and
// rho > t_b by the violation identity).
//
// Active features are re-placed directly at ind(rho). Inactive features whose
// rho drifted are handled by widening: the lower sweep walks buckets in
// descending order moving each violating feature's a down one bucket (a
// feature re-lowered in the same pass is seen again at its new bucket), the
// upper sweep mirrors this ascending. Features parked at the degenerate
// buckets jump straight to ind(rho) instead, which keeps the walk off the
// sentinels.
class UpdEnt {
public:
    explicit UpdEnt(double alpha) : scheme_(alpha) {}

    SplitDecision process(const SparsePoint& p) {
        assert(is_well_formed(p));
        store_.add_label(p.label);
        for (FeatureId j : p.ones) {
            auto it = slots_.find(j);
            if (it != slots_.end()) remove_feature(j, store_.at(j), it->second);
            const FeatureOneSide& f = store_.add_active(j, p.label);
            place(j, f, ent_index(scheme_, rho(store_.globals(), f)));
        }
        drain_neg_inf();
        drain_pos_inf();
        sweep_lower();
        sweep_upper();
        prune();
        return current_best();
    }

    // argmin of the exact conditional entropy over the per-bucket minima.
    SplitDecision current_best() const {
        SplitDecision out;
        for (const auto& [id, b] : buckets_) {
            if (b.candidates.empty()) continue;
            ++out.candidates;
            const FeatureId j = b.candidates.begin()->second;
            const double score =
                cond_impurity(store_.globals(), store_.at(j), Measure::entropy);
            if (!out.feature || score < out.score ||
                (score == out.score && j < *out.feature)) {
                out.feature = j;
                out.score = score;
            }
        }
        return out;
    }

    UpdEntStats stats() const {
        UpdEntStats s;
        for (const auto& [id, b] : buckets_)
            if (!b.candidates.empty()) ++s.nonempty_trees;
        s.relocations = relocations_;
        s.extensions = extensions_;
        return s;
    }

    std::optional<std::pair<EntBinId, EntBinId>> residency(FeatureId j) const {
        auto it = slots_.find(j);
        if (it == slots_.end()) return std::nullopt;
        return std::pair{it->second.a, it->second.b};
    }

    const CounterStore& store() const { return store_; }
    const Scheme& scheme() const { return scheme_; }

    // Structural audit; returns human-readable violations, empty when sound.
    std::vector<std::string> check_invariants() const {
        std::vector<std::string> out;
        const GlobalCounts& g = store_.globals();
        if (g.n != g.c0 + g.c1) out.push_back("globals: n != c0 + c1");
        if (slots_.size() != store_.tracked_count())
            out.push_back("slot count != tracked feature count");

        std::size_t t_total = 0, l_total = 0, u_total = 0;
        for (const auto& [id, b] : buckets_) {
            if (b.empty()) out.push_back("unpruned empty bucket");
            const Interval iv = ent_bin(scheme_, id);
            if (b.s != iv.s || b.t != iv.t || b.mu != iv.mu)
                out.push_back("bucket interval cache mismatch");
            t_total += b.candidates.size();
            l_total += b.lower.size();
            u_total += b.upper.size();
        }

        std::size_t span_total = 0;
        for (const auto& [j, f] : store_.features()) {
            const std::string tag = "feature " + std::to_string(j) + ": ";
            if (f.n1 != f.c10 + f.c11 || f.n1 == 0 || f.c10 > g.c0 || f.c11 > g.c1) {
                out.push_back(tag + "inconsistent counters");
                continue;
            }
            auto sit = slots_.find(j);
            if (sit == slots_.end()) {
                out.push_back(tag + "missing slot");
                continue;
            }
            const Residency& r = sit->second;
            if (r.a.is_finite() != r.b.is_finite() || r.b < r.a) {
                out.push_back(tag + "malformed residency");
                continue;
            }
            bool in_all_trees = true;
            bool contains_rho = false;
            const double rj = rho(g, f);
            for_range(r, [&](EntBinId i) {
                ++span_total;
                auto bit = buckets_.find(i);
                if (bit == buckets_.end() ||
                    !bit->second.candidates.count({t_key(f, i, bit->second), j}))
                    in_all_trees = false;
                else if (rj >= bit->second.s && rj <= bit->second.t)
                    contains_rho = true;
            });
            if (!in_all_trees) {
                out.push_back(tag + "candidate entry missing in range");
                continue;
            }
            const Bucket& ba = buckets_.at(r.a);
            const Bucket& bb = buckets_.at(r.b);
            if (!ba.lower.count({l_key(f, ba), j}))
                out.push_back(tag + "lower entry missing at a");
            if (!bb.upper.count({u_key(f, bb), j}))
                out.push_back(tag + "upper entry missing at b");
            // rho must sit inside [s_a, t_b]: accept closed floating-point
            // membership or, at the borders, non-violation in key form (the
            // two agree in exact arithmetic).
            const double n = double(g.n), c1 = double(g.c1);
            const bool no_violation = !(l_key(f, ba) < ba.s * n - c1) &&
                                      !(u_key(f, bb) > bb.t * n - c1);
            if (!contains_rho && !no_violation)
                out.push_back(tag + "rho outside residency range");
        }
        if (t_total != span_total) out.push_back("stray candidate entries");
        if (l_total != slots_.size()) out.push_back("stray lower entries");
        if (u_total != slots_.size()) out.push_back("stray upper entries");
        return out;
    }

private:
    friend struct UpdEntTestAccess;

    using Entry = std::pair<double, FeatureId>;
    using Tree = std::set<Entry>;

    struct Bucket {
        double s, t, mu;
        Tree candidates; // T_i
        Tree lower;      // L_i: features with a(j) = i
        Tree upper;      // U_i: features with b(j) = i

        bool empty() const {
            return candidates.empty() && lower.empty() && upper.empty();
        }
    };

    struct Residency {
        EntBinId a, b;
    };

    double t_key(const FeatureOneSide& f, EntBinId id, const Bucket& b) const {
        return id.is_finite() ? detail::entropy_K(f.c10, f.c11, b.mu)
                              : one_branch_cost(f.c10, f.c11);
    }
    static double l_key(const FeatureOneSide& f, const Bucket& b) {
        return b.s * double(f.n1) - double(f.c11);
    }
    static double u_key(const FeatureOneSide& f, const Bucket& b) {
        return b.t * double(f.n1) - double(f.c11);
    }

    Bucket& bucket(EntBinId id) {
        auto it = buckets_.find(id);
        if (it == buckets_.end()) {
            const Interval iv = ent_bin(scheme_, id);
            it = buckets_.emplace(id, Bucket{iv.s, iv.t, iv.mu, {}, {}, {}}).first;
        }
        return it->second;
    }

    static void erase_entry(Tree& tree, Entry e, const char* what) {
        if (tree.erase(e) != 1)
            throw std::logic_error(std::string("UpdEnt: stale key in ") + what);
    }

    template <class F>
    static void for_range(const Residency& r, F&& fn) {
        if (!r.a.is_finite()) { // degenerate residency, a == b
            fn(r.a);
            return;
        }
        for (EntBinId i = r.a;; i = i.next()) {
            fn(i);
            if (i == r.b) break;
        }
    }

    void remove_feature(FeatureId j, const FeatureOneSide& f, const Residency& r) {
        for_range(r, [&](EntBinId i) {
            Bucket& b = bucket(i);
            erase_entry(b.candidates, {t_key(f, i, b), j}, "T");
        });
        Bucket& ba = bucket(r.a);
        erase_entry(ba.lower, {l_key(f, ba), j}, "L");
        Bucket& bb = bucket(r.b);
        erase_entry(bb.upper, {u_key(f, bb), j}, "U");
    }

    void place(FeatureId j, const FeatureOneSide& f, EntBinId i) {
        Bucket& b = bucket(i);
        b.candidates.insert({t_key(f, i, b), j});
        b.lower.insert({l_key(f, b), j});
        b.upper.insert({u_key(f, b), j});
        slots_.insert_or_assign(j, Residency{i, i});
        ++relocations_;
    }

    // Features parked at rho = 0 must leave the moment c_j11 < c1 (their true
    // rho turned positive); they jump straight to ind(rho) instead of
    // widening off the sentinel.
    void drain_neg_inf() {
        auto it = buckets_.find(EntBinId::neg_inf());
        if (it == buckets_.end()) return;
        Bucket& b = it->second;
        const double thresh = -double(store_.globals().c1); // t = 0
        while (!b.upper.empty() && std::prev(b.upper.end())->first > thresh) {
            const FeatureId j = std::prev(b.upper.end())->second;
            const FeatureOneSide& f = store_.at(j);
            const EntBinId dest = ent_index(scheme_, rho(store_.globals(), f));
            if (dest == EntBinId::neg_inf()) break; // fp tie at the boundary
            remove_feature(j, f, slots_.at(j));
            place(j, f, dest);
        }
    }

    // Mirror image: rho = 1 residents leave once c_j10 < c0.
    void drain_pos_inf() {
        auto it = buckets_.find(EntBinId::pos_inf());
        if (it == buckets_.end()) return;
        Bucket& b = it->second;
        const GlobalCounts& g = store_.globals();
        const double thresh = double(g.n) - double(g.c1); // s = 1
        while (!b.lower.empty() && b.lower.begin()->first < thresh) {
            const FeatureId j = b.lower.begin()->second;
            const FeatureOneSide& f = store_.at(j);
            const EntBinId dest = ent_index(scheme_, rho(store_.globals(), f));
            if (dest == EntBinId::pos_inf()) break;
            remove_feature(j, f, slots_.at(j));
            place(j, f, dest);
        }
    }

    // rho dropped below s_a for the L_a extremes: widen [a, b] downward one
    // bucket at a time. Descending bucket order revisits a lowered feature in
    // its new bucket within the same pass, so one pass suffices.
    void sweep_lower() {
        const GlobalCounts& g = store_.globals();
        const double n = double(g.n), c1 = double(g.c1);
        for (auto it = buckets_.end(); it != buckets_.begin();) {
            --it;
            if (it->first.is_pos_inf()) continue;
            if (it->first.is_neg_inf()) break;
            Bucket& b = it->second;
            const double thresh = b.s * n - c1;
            while (!b.lower.empty() && b.lower.begin()->first < thresh) {
                const FeatureId j = b.lower.begin()->second;
                b.lower.erase(b.lower.begin());
                const FeatureOneSide& f = store_.at(j);
                Residency& r = slots_.at(j);
                assert(r.a == it->first);
                r.a = it->first.prev();
                Bucket& nb = bucket(r.a);
                nb.candidates.insert({t_key(f, r.a, nb), j});
                nb.lower.insert({l_key(f, nb), j});
                ++extensions_;
            }
        }
    }

    // rho rose above t_b for the U_b extremes: widen upward, ascending.
    void sweep_upper() {
        const GlobalCounts& g = store_.globals();
        const double n = double(g.n), c1 = double(g.c1);
        for (auto it = buckets_.begin(); it != buckets_.end(); ++it) {
            if (it->first.is_neg_inf()) continue;
            if (it->first.is_pos_inf()) break;
            Bucket& b = it->second;
            const double thresh = b.t * n - c1;
            while (!b.upper.empty() && std::prev(b.upper.end())->first > thresh) {
                auto last = std::prev(b.upper.end());
                const FeatureId j = last->second;
                b.upper.erase(last);
                const FeatureOneSide& f = store_.at(j);
                Residency& r = slots_.at(j);
                assert(r.b == it->first);
                r.b = it->first.next();
                Bucket& nb = bucket(r.b);
                nb.candidates.insert({t_key(f, r.b, nb), j});
                nb.upper.insert({u_key(f, nb), j});
                ++extensions_;
            }
        }
    }

    void prune() {
        for (auto it = buckets_.begin(); it != buckets_.end();) {
            if (it->second.empty()) it = buckets_.erase(it);
            else ++it;
        }
    }

    Scheme scheme_;
    CounterStore store_;
    std::unordered_map<FeatureId, Residency> slots_;
    std::map<EntBinId, Bucket> buckets_;
    std::uint64_t relocations_ = 0;
    std::uint64_t extensions_ = 0;
};

} // namespace sparsesplit
