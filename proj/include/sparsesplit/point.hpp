#pragma once

#include <cstdint>
#include <vector>

namespace sparsesplit {

using FeatureId = std::uint64_t;

// One stream element: ids of the features with value 1, plus a binary label.
// `ones` must be strictly increasing.
struct SparsePoint {
    std::vector<FeatureId> ones;
    int label = 0; // 0 or 1
};

inline bool is_well_formed(const SparsePoint& p) {
    if (p.label != 0 && p.label != 1) return false;
    for (std::size_t k = 1; k < p.ones.size(); ++k)
        if (p.ones[k - 1] >= p.ones[k]) return false;
    return true;
}

} // namespace sparsesplit
