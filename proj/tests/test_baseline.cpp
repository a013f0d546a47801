#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>

#include "sparsesplit/baseline.hpp"
#include "sparsesplit/datagen.hpp"

using namespace sparsesplit;
using Catch::Approx;

namespace {

// Independent reference: recounts the prefix from scratch and scores with the
// two-point-mass formulation H = (n1/n) h(p1) + (n0/n) h(p0) instead of the
// library's count-based sums, so errors in either route cannot cancel.
struct Recount {
    std::uint64_t n = 0, c0 = 0, c1 = 0;
    std::map<FeatureId, std::pair<std::uint64_t, std::uint64_t>> sides; // (c10, c11)

    void add(const SparsePoint& p) {
        ++n;
        (p.label == 0 ? c0 : c1)++;
        for (FeatureId j : p.ones)
            (p.label == 0 ? sides[j].first : sides[j].second)++;
    }

    static double h_ent(double p) {
        double out = 0.0;
        if (p > 0.0) out -= p * std::log(p);
        if (p < 1.0) out -= (1.0 - p) * std::log(1.0 - p);
        return out;
    }
    static double h_gini(double p) { return 2.0 * p * (1.0 - p); }

    double score(FeatureId j, Measure m) const {
        const auto& [c10, c11] = sides.at(j);
        const double n1 = double(c10 + c11);
        const double n0 = double(n) - n1;
        const double p1 = double(c11) / n1;
        double out = (m == Measure::entropy ? h_ent(p1) : h_gini(p1)) * n1 / double(n);
        if (n0 > 0) {
            const double p0 = double(c1 - c11) / n0;
            out += (m == Measure::entropy ? h_ent(p0) : h_gini(p0)) * n0 / double(n);
        }
        return out;
    }

    std::optional<FeatureId> best(Measure m, double& best_score) const {
        std::optional<FeatureId> arg;
        for (const auto& [j, side] : sides) {
            const double sc = score(j, m);
            if (!arg || sc < best_score) {
                arg = j;
                best_score = sc;
            }
        }
        return arg;
    }
};

} // namespace

TEST_CASE("baseline follows the reference stream", "[baseline]") {
    Baseline ent(Measure::entropy);
    Baseline gin(Measure::gini);

    SplitDecision d = ent.process({{1}, 1});
    REQUIRE(d.feature == FeatureId{1});
    REQUIRE(d.score == 0.0); // single pure branch
    gin.process({{1}, 1});

    d = ent.process({{}, 0});
    REQUIRE(d.score == 0.0); // both branches still pure
    gin.process({{}, 0});

    d = ent.process({{1}, 1});
    REQUIRE(d.score == 0.0);
    gin.process({{1}, 1});

    d = ent.process({{}, 1});
    REQUIRE(d.feature == FeatureId{1});
    REQUIRE(d.score == Approx(std::log(2.0) / 2.0).epsilon(1e-12));
    REQUIRE(d.candidates == 1);
    d = gin.process({{}, 1});
    REQUIRE(d.score == Approx(0.25).epsilon(1e-12));
}

TEST_CASE("baseline breaks ties toward the smallest id", "[baseline]") {
    Baseline b(Measure::entropy);
    b.process({{0, 1}, 1});
    const SplitDecision d = b.process({{0, 1}, 0});
    // identical counters, identical scores
    REQUIRE(d.feature == FeatureId{0});
}

TEST_CASE("baseline on an empty store", "[baseline]") {
    Baseline b(Measure::gini);
    REQUIRE_FALSE(b.current_best().feature.has_value());
    const SplitDecision d = b.process({{}, 1}); // labels only, nothing tracked
    REQUIRE_FALSE(d.feature.has_value());
    REQUIRE(d.candidates == 0);
}

TEST_CASE("baseline agrees with a from-scratch recount", "[baseline]") {
    GenConfig cfg;
    cfg.n = 300;
    cfg.d1 = 6;
    cfg.d2 = 100;
    cfg.q = 0.03;
    cfg.seed = 11;
    const Generated data = generate(cfg);

    Baseline ent(Measure::entropy);
    Baseline gin(Measure::gini);
    Recount ref;
    std::size_t mismatches = 0;
    for (const SparsePoint& p : data.points) {
        ref.add(p);
        for (Measure m : {Measure::entropy, Measure::gini}) {
            const SplitDecision d =
                (m == Measure::entropy ? ent : gin).process(p);
            double ref_score = 0.0;
            const auto ref_arg = ref.best(m, ref_score);
            if (d.feature.has_value() != ref_arg.has_value()) {
                ++mismatches;
                continue;
            }
            if (!d.feature) continue;
            const double tol = 1e-12 * std::max(1.0, std::abs(ref_score));
            if (std::abs(d.score - ref_score) > tol) ++mismatches;
            // the argmin may differ only on a sub-tolerance tie
            if (*d.feature != *ref_arg &&
                std::abs(ref.score(*d.feature, m) - ref_score) > tol)
                ++mismatches;
        }
    }
    REQUIRE(mismatches == 0);
}
