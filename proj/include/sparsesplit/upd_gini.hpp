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

struct UpdGiniStats {
    std::size_t nonempty_trees = 0; // buckets currently holding a candidate
    std::uint64_t moves = 0;        // sweep relocations, cumulative
};

// Streaming (1+alpha)-approximate best split under the Gini index.
//
// Same skeleton as the entropy engine, but on the uniform overlapping
// Gini-scheme buckets a feature always occupies exactly one bucket i
// containing rho_j; candidate keys are the feature-local decomposition term
// K(c_j10, c_j11, mu_i). Because neighboring buckets overlap by beta/2, a
// violating rho never sits on the destination bucket's boundary, so one
// ascending pass over the buckets relocates every violator directly to
// ind(rho) and creates no new violations.
class UpdGini {
public:
    explicit UpdGini(double alpha) : scheme_(alpha) {}

    SplitDecision process(const SparsePoint& p) {
        assert(is_well_formed(p));
        store_.add_label(p.label);
        for (FeatureId j : p.ones) {
            auto it = slots_.find(j);
            if (it != slots_.end()) remove_feature(j, store_.at(j), it->second);
            const FeatureOneSide& f = store_.add_active(j, p.label);
            place(j, f, gini_index(scheme_, rho(store_.globals(), f)));
        }
        sweep();
        prune();
        return current_best();
    }

    // argmin of the exact conditional Gini over the per-bucket minima.
    SplitDecision current_best() const {
        SplitDecision out;
        for (const auto& [id, b] : buckets_) {
            if (b.candidates.empty()) continue;
            ++out.candidates;
            const FeatureId j = b.candidates.begin()->second;
            const double score =
                cond_impurity(store_.globals(), store_.at(j), Measure::gini);
            if (!out.feature || score < out.score ||
                (score == out.score && j < *out.feature)) {
                out.feature = j;
                out.score = score;
            }
        }
        return out;
    }

    UpdGiniStats stats() const {
        UpdGiniStats s;
        for (const auto& [id, b] : buckets_)
            if (!b.candidates.empty()) ++s.nonempty_trees;
        s.moves = moves_;
        return s;
    }

    std::optional<GiniBinId> residency(FeatureId j) const {
        auto it = slots_.find(j);
        if (it == slots_.end()) return std::nullopt;
        return it->second;
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
            const Interval iv = gini_bin(scheme_, id);
            if (b.s != iv.s || b.t != iv.t || b.mu != iv.mu)
                out.push_back("bucket interval cache mismatch");
            t_total += b.candidates.size();
            l_total += b.lower.size();
            u_total += b.upper.size();
        }

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
            auto bit = buckets_.find(sit->second);
            if (bit == buckets_.end()) {
                out.push_back(tag + "slot bucket missing");
                continue;
            }
            const Bucket& b = bit->second;
            if (!b.candidates.count({detail::gini_K(f.c10, f.c11, b.mu), j}))
                out.push_back(tag + "candidate entry missing");
            if (!b.lower.count({l_key(f, b), j}))
                out.push_back(tag + "lower entry missing");
            if (!b.upper.count({u_key(f, b), j}))
                out.push_back(tag + "upper entry missing");
            const double rj = rho(g, f);
            const double n = double(g.n), c1 = double(g.c1);
            const bool no_violation = !(l_key(f, b) < b.s * n - c1) &&
                                      !(u_key(f, b) > b.t * n - c1);
            if (!(rj >= b.s && rj <= b.t) && !no_violation)
                out.push_back(tag + "rho outside bucket");
        }
        if (t_total != slots_.size()) out.push_back("stray candidate entries");
        if (l_total != slots_.size()) out.push_back("stray lower entries");
        if (u_total != slots_.size()) out.push_back("stray upper entries");
        return out;
    }

private:
    friend struct UpdGiniTestAccess;

    using Entry = std::pair<double, FeatureId>;
    using Tree = std::set<Entry>;

    struct Bucket {
        double s, t, mu;
        Tree candidates; // T_i
        Tree lower;      // L_i
        Tree upper;      // U_i

        bool empty() const {
            return candidates.empty() && lower.empty() && upper.empty();
        }
    };

    static double l_key(const FeatureOneSide& f, const Bucket& b) {
        return b.s * double(f.n1) - double(f.c11);
    }
    static double u_key(const FeatureOneSide& f, const Bucket& b) {
        return b.t * double(f.n1) - double(f.c11);
    }

    Bucket& bucket(GiniBinId id) {
        auto it = buckets_.find(id);
        if (it == buckets_.end()) {
            const Interval iv = gini_bin(scheme_, id);
            it = buckets_.emplace(id, Bucket{iv.s, iv.t, iv.mu, {}, {}, {}}).first;
        }
        return it->second;
    }

    static void erase_entry(Tree& tree, Entry e, const char* what) {
        if (tree.erase(e) != 1)
            throw std::logic_error(std::string("UpdGini: stale key in ") + what);
    }

    void remove_feature(FeatureId j, const FeatureOneSide& f, GiniBinId id) {
        Bucket& b = bucket(id);
        erase_entry(b.candidates, {detail::gini_K(f.c10, f.c11, b.mu), j}, "T");
        erase_entry(b.lower, {l_key(f, b), j}, "L");
        erase_entry(b.upper, {u_key(f, b), j}, "U");
    }

    void place(FeatureId j, const FeatureOneSide& f, GiniBinId id) {
        Bucket& b = bucket(id);
        b.candidates.insert({detail::gini_K(f.c10, f.c11, b.mu), j});
        b.lower.insert({l_key(f, b), j});
        b.upper.insert({u_key(f, b), j});
        slots_[j] = id;
    }

    // One ascending pass: per bucket, pop lower-tree violators (rho < s_i)
    // then upper-tree violators (rho > t_i) and re-place each at ind(rho).
    // The bucket overlap guarantees the destination has margin, so nothing
    // placed by this pass violates again. A destination equal to the current
    // bucket can only come from floating-point disagreement exactly at a
    // boundary; the entry is left in place in that case.
    void sweep() {
        const GlobalCounts& g = store_.globals();
        const double n = double(g.n), c1 = double(g.c1);
        for (auto it = buckets_.begin(); it != buckets_.end(); ++it) {
            Bucket& b = it->second;
            while (!b.lower.empty() && b.lower.begin()->first < b.s * n - c1) {
                const FeatureId j = b.lower.begin()->second;
                const FeatureOneSide& f = store_.at(j);
                const GiniBinId dest = gini_index(scheme_, rho(g, f));
                if (dest == it->first) break;
                remove_feature(j, f, it->first);
                place(j, f, dest);
                ++moves_;
            }
            while (!b.upper.empty() &&
                   std::prev(b.upper.end())->first > b.t * n - c1) {
                const FeatureId j = std::prev(b.upper.end())->second;
                const FeatureOneSide& f = store_.at(j);
                const GiniBinId dest = gini_index(scheme_, rho(g, f));
                if (dest == it->first) break;
                remove_feature(j, f, it->first);
                place(j, f, dest);
                ++moves_;
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
    std::unordered_map<FeatureId, GiniBinId> slots_;
    std::map<GiniBinId, Bucket> buckets_;
    std::uint64_t moves_ = 0;
};

} // namespace sparsesplit
