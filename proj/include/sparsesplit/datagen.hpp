#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "point.hpp"

namespace sparsesplit {

// sparse(n, d1, d2, q): d1 label-coupled features (ids 0..d1-1) whose value
// is the label flipped with a per-feature probability theta_j drawn once
// uniformly from [0,1), plus d2 independent Bernoulli(q) noise features
// (ids d1..d1+d2-1). Labels are fair coin flips.
struct GenConfig {
    std::uint64_t n = 10000;
    std::uint64_t d1 = 10;
    std::uint64_t d2 = 10000;
    double q = 0.001;
    std::uint64_t seed = 0;
};

struct Generated {
    std::vector<SparsePoint> points;
    std::vector<double> thetas; // flip probabilities, one per informative feature
};

namespace detail {

// Fixed uniform [0,1) mapping over the top 53 bits, so streams never depend
// on the standard library's distribution implementations.
inline double canonical(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

} // namespace detail

inline void validate(const GenConfig& c) {
    if (c.n < 1) throw std::invalid_argument("GenConfig: n must be >= 1");
    if (!(c.q >= 0.0 && c.q <= 1.0))
        throw std::invalid_argument("GenConfig: q must be in [0,1]");
}

// Deterministic in (config, seed). `forced_thetas`, when nonempty, replaces
// the theta draw entirely (same d1 values, no generator consumption), which
// pins the informative features' difficulty in tests.
inline Generated generate(const GenConfig& cfg,
                          std::span<const double> forced_thetas = {}) {
    validate(cfg);
    std::mt19937_64 rng(cfg.seed);
    Generated out;
    if (forced_thetas.empty()) {
        out.thetas.reserve(cfg.d1);
        for (std::uint64_t j = 0; j < cfg.d1; ++j)
            out.thetas.push_back(detail::canonical(rng));
    } else {
        if (forced_thetas.size() != cfg.d1)
            throw std::invalid_argument("generate: forced_thetas size != d1");
        out.thetas.assign(forced_thetas.begin(), forced_thetas.end());
    }
    out.points.reserve(cfg.n);
    for (std::uint64_t i = 0; i < cfg.n; ++i) {
        SparsePoint p;
        p.label = detail::canonical(rng) < 0.5 ? 1 : 0;
        for (std::uint64_t j = 0; j < cfg.d1; ++j) {
            const bool flip = detail::canonical(rng) < out.thetas[j];
            if ((flip ? 1 - p.label : p.label) == 1) p.ones.push_back(j);
        }
        for (std::uint64_t j = 0; j < cfg.d2; ++j)
            if (detail::canonical(rng) < cfg.q) p.ones.push_back(cfg.d1 + j);
        out.points.push_back(std::move(p));
    }
    return out;
}

// Header lines describing a generated dataset (written as comments).
inline std::vector<std::string> describe(const GenConfig& cfg) {
    return {
        "generator: sparse(n=" + std::to_string(cfg.n) +
            ", d1=" + std::to_string(cfg.d1) + ", d2=" + std::to_string(cfg.d2) +
            ", q=" + std::to_string(cfg.q) + ")",
        "seed: " + std::to_string(cfg.seed),
        "rng: mt19937_64, uniform = (x >> 11) * 2^-53",
    };
}

} // namespace sparsesplit
