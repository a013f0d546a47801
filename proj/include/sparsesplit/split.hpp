#pragma once

#include <cstddef>
#include <optional>

#include "point.hpp"

namespace sparsesplit {

// Outcome of a best-split query. `feature` is absent while nothing is
// tracked. `score` is the exact conditional impurity of the chosen feature.
// `candidates` counts the entries the query compared (buckets for the
// approximate engines, tracked features for the baseline).
struct SplitDecision {
    std::optional<FeatureId> feature;
    double score = 0.0;
    std::size_t candidates = 0;
};

} // namespace sparsesplit
