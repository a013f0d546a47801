#pragma once

#include "counters.hpp"
#include "split.hpp"

namespace sparsesplit {

// Exact selection: scan every tracked feature and take the minimal exact
// conditional impurity, ties broken toward the smallest feature id. O(d) per
// query; independent of any bucketing, so it doubles as the oracle.
inline SplitDecision exact_best(const CounterStore& store, Measure m) {
    SplitDecision out;
    for (const auto& [j, f] : store.features()) {
        const double score = cond_impurity(store.globals(), f, m);
        if (!out.feature || score < out.score ||
            (score == out.score && j < *out.feature)) {
            out.feature = j;
            out.score = score;
        }
    }
    out.candidates = store.tracked_count();
    return out;
}

class Baseline {
public:
    explicit Baseline(Measure m) : measure_(m) {}

    SplitDecision process(const SparsePoint& p) {
        store_.ingest(p);
        return exact_best(store_, measure_);
    }

    SplitDecision current_best() const { return exact_best(store_, measure_); }

    const CounterStore& store() const { return store_; }
    Measure measure() const { return measure_; }

private:
    Measure measure_;
    CounterStore store_;
};

} // namespace sparsesplit
