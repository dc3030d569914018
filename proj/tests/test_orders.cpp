#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "nlmc/orders.hpp"

#include "helpers.hpp"

using namespace nlmc;
using test::dist_on_indices;
using test::random_probs;
using test::thrown_code;

namespace {

double expectation(const Dist& d, const std::vector<double>& f) {
    double e = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) e += d[i] * f[i];
    return e;
}

/// Relation implied by a family of test functions: p >= q iff every test
/// expectation under p dominates the one under q.
OrderRelation oracle_relation(const Dist& p, const Dist& q,
                              const std::vector<std::vector<double>>& tests) {
    bool ge = true, le = true;
    for (const auto& f : tests) {
        const double ep = expectation(p, f), eq = expectation(q, f);
        if (ep < eq - kOrderTol) ge = false;
        if (eq < ep - kOrderTol) le = false;
    }
    if (ge && le) return OrderRelation::equal;
    if (ge) return OrderRelation::greater_eq;
    if (le) return OrderRelation::less_eq;
    return OrderRelation::incomparable;
}

/// Indicator steps 1{x >= v_k} at every grid value plus random nondecreasing
/// functions. The indicators alone decide first-order dominance exactly; the
/// random functions guard the implication in the other direction.
std::vector<std::vector<double>> increasing_tests(std::mt19937_64& rng, std::size_t n,
                                                  std::size_t extra) {
    std::vector<std::vector<double>> tests;
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<double> f(n, 0.0);
        for (std::size_t i = k; i < n; ++i) f[i] = 1.0;
        tests.push_back(std::move(f));
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t t = 0; t < extra; ++t) {
        std::vector<double> f(n);
        double acc = unit(rng);
        for (auto& v : f) {
            v = acc;
            acc += unit(rng);
        }
        tests.push_back(std::move(f));
    }
    return tests;
}

/// Hinges max(0, x - t) at every grid knot plus random increasing convex
/// functions (nonnegative mixes of hinges). On a finite grid the knot hinges
/// together with the constant decide increasing-convex dominance exactly.
std::vector<std::vector<double>> icx_tests(std::mt19937_64& rng, const std::vector<double>& grid,
                                           std::size_t extra) {
    const std::size_t n = grid.size();
    std::vector<std::vector<double>> tests;
    auto hinge = [&](double t) {
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::max(0.0, grid[i] - t);
        return f;
    };
    for (double t : grid) tests.push_back(hinge(t));
    tests.push_back(hinge(grid.front() - 1.0)); // covers the mean
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> knot(grid.front() - 1.0, grid.back());
    for (std::size_t t = 0; t < extra; ++t) {
        std::vector<double> f(n, 0.0);
        for (int j = 0; j < 4; ++j) {
            const double w = unit(rng);
            const auto h = hinge(knot(rng));
            for (std::size_t i = 0; i < n; ++i) f[i] += w * h[i];
        }
        tests.push_back(std::move(f));
    }
    return tests;
}

} // namespace

TEST_CASE("upper tails accumulate from the top") {
    const auto tails = upper_tails({0.1, 0.2, 0.7});
    REQUIRE(tails.size() == 3);
    CHECK(tails[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(tails[1] == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(tails[2] == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("first-order dominance on hand-picked pairs") {
    const Dist low = dist_on_indices(2, {0.5, 0.5});
    const Dist high = dist_on_indices(2, {0.2, 0.8});
    CHECK(compare_fosd(high, low) == OrderRelation::greater_eq);
    CHECK(compare_fosd(low, high) == OrderRelation::less_eq);
    CHECK(compare_fosd(low, low) == OrderRelation::equal);

    const Dist spread = dist_on_indices(3, {0.5, 0.0, 0.5});
    const Dist middle = dist_on_indices(3, {0.0, 1.0, 0.0});
    CHECK(compare_fosd(spread, middle) == OrderRelation::incomparable);
}

TEST_CASE("first-order dominance matches the increasing-function oracle") {
    std::mt19937_64 rng(20240817);
    for (std::size_t trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + trial % 6;
        SpacePtr space = share(StateSpace::indices(n));
        Dist p = make_dist(space, random_probs(rng, n));
        Dist q = make_dist(space, random_probs(rng, n));
        if (trial % 5 == 0) {
            auto pair = gen_comparable_pair(rng(), n);
            p = pair.first;
            q = pair.second;
        }
        if (trial % 7 == 0) q = p;
        const auto tests = increasing_tests(rng, n, 50);
        CHECK(compare_fosd(p, q) == oracle_relation(p, q, tests));
    }
}

TEST_CASE("increasing-convex dominance matches the hinge oracle") {
    std::mt19937_64 rng(77001);
    for (std::size_t trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 5;
        std::vector<double> grid(n);
        std::uniform_real_distribution<double> step(0.1, 1.0);
        grid[0] = step(rng);
        for (std::size_t i = 1; i < n; ++i) grid[i] = grid[i - 1] + step(rng);
        SpacePtr space = share(StateSpace::line(grid));
        const Dist p = make_dist(space, random_probs(rng, n));
        const Dist q = make_dist(space, random_probs(rng, n));
        const auto tests = icx_tests(rng, grid, 30);
        CHECK(compare_icx(p, q) == oracle_relation(p, q, tests));
    }
}

TEST_CASE("convex order demands equal means") {
    const Dist spread = dist_on_indices(3, {0.5, 0.0, 0.5});
    const Dist middle = dist_on_indices(3, {0.0, 1.0, 0.0});
    CHECK(compare_cx(spread, middle) == OrderRelation::greater_eq);
    CHECK(compare_cx(middle, spread) == OrderRelation::less_eq);
    CHECK(compare_cx(middle, middle) == OrderRelation::equal);

    const Dist shifted = dist_on_indices(3, {0.0, 0.0, 1.0});
    CHECK(compare_cx(shifted, middle) == OrderRelation::incomparable);
    CHECK(compare_icx(shifted, middle) == OrderRelation::greater_eq);
}

TEST_CASE("positional majorization coincides with dominance on probability vectors") {
    std::mt19937_64 rng(555);
    for (std::size_t trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 5;
        SpacePtr space = share(StateSpace::indices(n));
        const Dist p = make_dist(space, random_probs(rng, n));
        const Dist q = trial % 6 == 0 ? p : make_dist(space, random_probs(rng, n));
        CHECK(compare_majorization(p.probs(), q.probs()) == compare_fosd(p, q));
    }

    CHECK(compare_majorization({0.2, 0.2, 0.6}, {0.3, 0.3, 0.4}) == OrderRelation::greater_eq);
    CHECK(compare_majorization({1.0, 2.0}, {1.0, 1.0}) == OrderRelation::incomparable);
    CHECK(thrown_code([] { compare_majorization({1.0}, {0.5, 0.5}); }) == Errc::length_mismatch);
}

TEST_CASE("cone comparison evaluates generator expectations") {
    SpacePtr space = share(StateSpace::product({{0.0, 1.0}, {0.0, 1.0}}));
    // States enumerate as (0,0), (0,1), (1,0), (1,1).
    const Dist p = make_dist(space, {0.0, 0.0, 0.0, 1.0});
    const Dist q = make_dist(space, {1.0, 0.0, 0.0, 0.0});
    const Dist r = make_dist(space, {0.0, 1.0, 0.0, 0.0});

    const OrderFamily axes = OrderFamily::linear_cone({{1.0, 0.0}, {0.0, 1.0}});
    CHECK(compare_cone(axes, p, q) == OrderRelation::greater_eq);
    CHECK(compare_cone(axes, q, p) == OrderRelation::less_eq);
    CHECK(compare_cone(axes, p, p) == OrderRelation::equal);

    const OrderFamily alt = OrderFamily::alternating_cone(2);
    CHECK(compare_cone(alt, r, q) == OrderRelation::less_eq);
    CHECK(compare_cone(alt, p, r) == OrderRelation::greater_eq);

    CHECK(thrown_code([&] { compare_cone(OrderFamily::sd(), p, q); }) == Errc::unsupported_family);
    CHECK(thrown_code([&] {
              compare_cone(OrderFamily::linear_cone({{1.0}}), p, q);
          }) == Errc::length_mismatch);
}

TEST_CASE("family dispatch routes to the right comparison") {
    const Dist spread = dist_on_indices(3, {0.5, 0.0, 0.5});
    const Dist middle = dist_on_indices(3, {0.0, 1.0, 0.0});
    CHECK(compare_in(OrderFamily::sd(), spread, middle) == OrderRelation::incomparable);
    CHECK(compare_in(OrderFamily::cx(), spread, middle) == OrderRelation::greater_eq);
    CHECK(compare_in(OrderFamily::icx(), spread, middle) == OrderRelation::greater_eq);
}

TEST_CASE("lattice bounds obey idempotence, absorption, and consistency") {
    std::mt19937_64 rng(909090);
    for (std::size_t trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 5;
        SpacePtr space = share(StateSpace::indices(n));
        const Dist p = make_dist(space, random_probs(rng, n));
        const Dist q = make_dist(space, random_probs(rng, n));
        const Dist r = make_dist(space, random_probs(rng, n));

        const Dist sup = sd_sup(p, q);
        const Dist inf = sd_inf(p, q);
        CHECK(dominates_or_equal(compare_fosd(sup, p)));
        CHECK(dominates_or_equal(compare_fosd(sup, q)));
        CHECK(dominates_or_equal(compare_fosd(p, inf)));
        CHECK(dominates_or_equal(compare_fosd(q, inf)));

        CHECK(l1_distance(sd_sup(p, p), p) <= 1e-15);
        CHECK(l1_distance(sd_inf(p, p), p) <= 1e-15);
        CHECK(l1_distance(sd_sup(q, p), sup) <= 1e-15);
        CHECK(l1_distance(sd_inf(q, p), inf) <= 1e-15);
        CHECK(l1_distance(sd_sup(p, sd_inf(p, q)), p) <= 1e-12);
        CHECK(l1_distance(sd_inf(p, sd_sup(p, q)), p) <= 1e-12);
        CHECK(l1_distance(sd_sup(p, sd_sup(q, r)), sd_sup(sd_sup(p, q), r)) <= 1e-12);
        CHECK(l1_distance(sd_inf(p, sd_inf(q, r)), sd_inf(sd_inf(p, q), r)) <= 1e-12);

        // Least upper bound: anything above both inputs is above the supremum.
        if (dominates_or_equal(compare_fosd(r, p)) && dominates_or_equal(compare_fosd(r, q)))
            CHECK(dominates_or_equal(compare_fosd(r, sup)));
    }
}

TEST_CASE("generated pairs are ordered by construction") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto [p, q] = gen_comparable_pair(seed, 5);
        CHECK(dominates_or_equal(compare_fosd(p, q)));
    }
    SpacePtr grid = share(StateSpace::line({0.0, 0.3, 1.1, 2.0}));
    const auto [p, q] = gen_comparable_pair(7, grid);
    CHECK(p.space().same_as(*grid));
    CHECK(dominates_or_equal(compare_fosd(p, q)));
}
