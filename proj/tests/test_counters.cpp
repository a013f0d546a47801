#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "sparsesplit/counters.hpp"

using namespace sparsesplit;
using Catch::Approx;

namespace {

// Reference stream used throughout: two points with feature 1 set and label
// 1, one empty point each of label 0 and label 1. Final counters:
//   n = 4, c0 = 1, c1 = 3; feature 1: n1 = 2, c10 = 0, c11 = 2.
CounterStore fixture_store() {
    CounterStore s;
    s.ingest({{1}, 1});
    s.ingest({{}, 0});
    s.ingest({{1}, 1});
    s.ingest({{}, 1});
    return s;
}

} // namespace

TEST_CASE("counter accumulation over the reference stream", "[counters]") {
    CounterStore s = fixture_store();
    REQUIRE(s.globals().n == 4);
    REQUIRE(s.globals().c0 == 1);
    REQUIRE(s.globals().c1 == 3);
    REQUIRE(s.tracked_count() == 1);
    const FeatureOneSide& f = s.at(1);
    REQUIRE(f.n1 == 2);
    REQUIRE(f.c10 == 0);
    REQUIRE(f.c11 == 2);
    REQUIRE(s.find(99) == nullptr);
    REQUIRE_THROWS_AS(s.at(99), std::out_of_range);
}

TEST_CASE("rho of the reference feature is 1/2", "[counters]") {
    CounterStore s = fixture_store();
    // c_101 = c1 - c11 = 1, n_10 = n - n1 = 2
    REQUIRE(rho(s, 1) == 0.5);
}

TEST_CASE("rho is 0 when every point is on the one side", "[counters]") {
    CounterStore s;
    s.ingest({{3}, 1});
    s.ingest({{3}, 0});
    REQUIRE(rho(s, 3) == 0.0);
}

TEST_CASE("impurity on the reference stream", "[counters]") {
    CounterStore s = fixture_store();
    // entropy: (1/4) ln 4 + (3/4) ln(4/3)
    REQUIRE(impurity(s, Measure::entropy) == Approx(0.5623351446188083).epsilon(1e-12));
    // gini: 2 * (1/4) * (3/4)
    REQUIRE(impurity(s, Measure::gini) == Approx(0.375).epsilon(1e-12));
    CounterStore empty;
    REQUIRE_THROWS_AS(impurity(empty, Measure::entropy), std::domain_error);
}

TEST_CASE("conditional impurity on the reference stream", "[counters]") {
    CounterStore s = fixture_store();
    // one side (0,2) is pure; zero side (1,1) costs 2 ln 2
    REQUIRE(cond_impurity(s, 1, Measure::entropy) ==
            Approx(std::log(2.0) / 2.0).epsilon(1e-12));
    // 2*(0/4)*(2/2) + 2*(1/4)*(1/2)
    REQUIRE(cond_impurity(s, 1, Measure::gini) == Approx(0.25).epsilon(1e-12));
    REQUIRE(info_gain(s, 1) == Approx(0.2157615543388356).epsilon(1e-12));
}

TEST_CASE("one_branch_cost values and error", "[counters]") {
    REQUIRE(one_branch_cost(1, 1) == Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    REQUIRE(one_branch_cost(0, 5) == 0.0);
    REQUIRE(one_branch_cost(3, 0) == 0.0);
    REQUIRE_THROWS_AS(one_branch_cost(0, 0), std::invalid_argument);
}

TEST_CASE("one_branch_cost matches n * conditional entropy on pure zero sides",
          "[counters]") {
    // rho = 0: the zero branch holds only label-0 points.
    CounterStore a;
    a.ingest({{7}, 1});
    a.ingest({{7}, 0});
    a.ingest({{}, 0});
    REQUIRE(one_branch_cost(a.at(7).c10, a.at(7).c11) ==
            Approx(3.0 * cond_impurity(a, 7, Measure::entropy)).margin(1e-15));
    // rho = 1: the zero branch holds only label-1 points.
    CounterStore b;
    b.ingest({{7}, 1});
    b.ingest({{7}, 0});
    b.ingest({{}, 1});
    REQUIRE(one_branch_cost(b.at(7).c10, b.at(7).c11) ==
            Approx(3.0 * cond_impurity(b, 7, Measure::entropy)).margin(1e-15));
    // n_j0 = 0: everything sits on the one side.
    CounterStore c;
    c.ingest({{7}, 1});
    c.ingest({{7}, 0});
    REQUIRE(one_branch_cost(c.at(7).c10, c.at(7).c11) ==
            Approx(2.0 * cond_impurity(c, 7, Measure::entropy)).margin(1e-15));
}

TEST_CASE("cond_impurity_at on the reference stream", "[counters]") {
    CounterStore s = fixture_store();
    // at theta = rho = 1/2 it coincides with the empirical value
    REQUIRE(cond_impurity_at(s, 1, 0.5, Measure::entropy) ==
            Approx(cond_impurity(s, 1, Measure::entropy)).epsilon(1e-12));
    REQUIRE(cond_impurity_at(s, 1, 0.5, Measure::gini) ==
            Approx(0.25).epsilon(1e-12));
    // c_101 = 1 > 0 against theta = 0 diverges; c_100 = 1 > 0 against theta = 1
    REQUIRE(std::isinf(cond_impurity_at(s, 1, 0.0, Measure::entropy)));
    REQUIRE(std::isinf(cond_impurity_at(s, 1, 1.0, Measure::entropy)));
    // gini never diverges
    REQUIRE(std::isfinite(cond_impurity_at(s, 1, 0.0, Measure::gini)));
    REQUIRE(std::isfinite(cond_impurity_at(s, 1, 1.0, Measure::gini)));
    REQUIRE_THROWS_AS(cond_impurity_at(s, 1, -0.1, Measure::gini), std::domain_error);
    REQUIRE_THROWS_AS(cond_impurity_at(s, 1, 1.1, Measure::entropy), std::domain_error);
}

TEST_CASE("decomposition terms on the reference counters", "[counters]") {
    // entropy at theta = 1/2: C = 4 ln 2, K = -2 ln 2
    auto [ce, ke] = decomp_terms(1, 3, 0, 2, 0.5, Measure::entropy);
    REQUIRE(ce == Approx(4.0 * std::log(2.0)).epsilon(1e-12));
    REQUIRE(ke == Approx(-2.0 * std::log(2.0)).epsilon(1e-12));
    // gini at theta = 1/2: C = 2 c0 theta = 1, K = 0
    auto [cg, kg] = decomp_terms(1, 3, 0, 2, 0.5, Measure::gini);
    REQUIRE(cg == Approx(1.0).epsilon(1e-12));
    REQUIRE(kg == Approx(0.0).margin(1e-15));
    // empty one side contributes nothing to gini K
    auto [cg0, kg0] = decomp_terms(1, 3, 0, 0, 0.5, Measure::gini);
    REQUIRE(kg0 == 0.0);
    REQUIRE(cg0 == Approx(1.0).epsilon(1e-12));
    REQUIRE_THROWS_AS(decomp_terms(1, 3, 0, 2, 0.0, Measure::entropy),
                      std::domain_error);
    REQUIRE_THROWS_AS(decomp_terms(1, 3, 0, 2, 1.0, Measure::entropy),
                      std::domain_error);
}

TEST_CASE("decomposition identity holds on random counters", "[counters]") {
    std::mt19937_64 rng(20240811);
    auto draw = [&](std::uint64_t lo, std::uint64_t hi) {
        return lo + rng() % (hi - lo + 1);
    };
    std::size_t failures = 0;
    for (int iter = 0; iter < 20000; ++iter) {
        const std::uint64_t c0 = draw(0, 100000);
        const std::uint64_t c1 = draw(c0 == 0 ? 1 : 0, 100000);
        const std::uint64_t n = c0 + c1;
        std::uint64_t c10 = draw(0, c0);
        std::uint64_t c11 = draw(0, c1);
        if (c10 + c11 == 0) c11 = c1 > 0 ? 1 : (c10 = 1, 0);
        const GlobalCounts g{n, c0, c1};
        const FeatureOneSide f{c10 + c11, c10, c11};
        const double tol = 1e-9 * std::max<double>(1.0, double(n));

        const double te = 0.01 + 0.98 * double(rng() >> 11) * 0x1.0p-53;
        auto [ce, ke] = decomp_terms(c0, c1, c10, c11, te, Measure::entropy);
        if (std::abs(double(n) * cond_impurity_at(g, f, te, Measure::entropy) -
                     (ce + ke)) > tol)
            ++failures;

        const double tg = double(rng() >> 11) * 0x1.0p-53;
        auto [cg, kg] = decomp_terms(c0, c1, c10, c11, tg, Measure::gini);
        if (std::abs(double(n) * cond_impurity_at(g, f, tg, Measure::gini) -
                     (cg + kg)) > tol)
            ++failures;
    }
    REQUIRE(failures == 0);
}

TEST_CASE("conditioning never increases impurity", "[counters]") {
    std::mt19937_64 rng(7);
    std::size_t failures = 0;
    for (int iter = 0; iter < 5000; ++iter) {
        const std::uint64_t c0 = rng() % 1000;
        const std::uint64_t c1 = 1 + rng() % 1000;
        std::uint64_t c10 = rng() % (c0 + 1);
        std::uint64_t c11 = rng() % (c1 + 1);
        if (c10 + c11 == 0) c11 = 1;
        const GlobalCounts g{c0 + c1, c0, c1};
        const FeatureOneSide f{c10 + c11, c10, c11};
        if (cond_impurity(g, f, Measure::entropy) >
            impurity(g, Measure::entropy) + 1e-12)
            ++failures;
        if (cond_impurity(g, f, Measure::gini) >
            impurity(g, Measure::gini) + 1e-12)
            ++failures;
    }
    REQUIRE(failures == 0);
}

TEST_CASE("from_counts validates consistency", "[counters]") {
    const GlobalCounts g{4, 1, 3};
    CounterStore s = CounterStore::from_counts(g, {{1, {2, 0, 2}}});
    REQUIRE(rho(s, 1) == 0.5);
    REQUIRE_THROWS_AS(CounterStore::from_counts({4, 1, 2}, {}),
                      std::invalid_argument); // n != c0 + c1
    REQUIRE_THROWS_AS(CounterStore::from_counts(g, {{1, {3, 0, 2}}}),
                      std::invalid_argument); // n1 != c10 + c11
    REQUIRE_THROWS_AS(CounterStore::from_counts(g, {{1, {0, 0, 0}}}),
                      std::invalid_argument); // untracked feature
    REQUIRE_THROWS_AS(CounterStore::from_counts(g, {{1, {5, 1, 4}}}),
                      std::invalid_argument); // c11 > c1
    REQUIRE_THROWS_AS(
        CounterStore::from_counts(g, {{1, {2, 0, 2}}, {1, {2, 0, 2}}}),
        std::invalid_argument); // duplicate id
}

TEST_CASE("well-formedness of sparse points", "[counters]") {
    REQUIRE(is_well_formed({{1, 2, 9}, 0}));
    REQUIRE(is_well_formed({{}, 1}));
    REQUIRE_FALSE(is_well_formed({{2, 2}, 1}));
    REQUIRE_FALSE(is_well_formed({{3, 1}, 1}));
    REQUIRE_FALSE(is_well_formed({{1}, 2}));
}
