#include <doctest.h>

#include <cmath>
#include <string>

#include "nlmc/core.hpp"
#include "nlmc/format.hpp"

#include "helpers.hpp"

using namespace nlmc;
using test::dist_on;
using test::dist_on_indices;
using test::thrown_code;

TEST_CASE("state spaces validate and enumerate") {
    const StateSpace g = StateSpace::line({-1.0, 0.5, 2.0});
    CHECK(g.size() == 3);
    CHECK(g.one_dimensional());
    CHECK(g.value(1) == 0.5);

    CHECK(thrown_code([] { StateSpace::line({0.0, 0.0, 1.0}); }) == Errc::validation_error);
    CHECK(thrown_code([] { StateSpace::line({1.0, 0.0}); }) == Errc::validation_error);
    CHECK(thrown_code([] { StateSpace::line({}); }) == Errc::validation_error);
    CHECK(thrown_code([&] { g.value(3); }) == Errc::bad_state_index);

    const StateSpace idx = StateSpace::indices(4);
    CHECK(idx.values() == std::vector<double>{0.0, 1.0, 2.0, 3.0});

    const StateSpace lin = StateSpace::linspace(0.0, 1.5, 31);
    CHECK(lin.size() == 31);
    CHECK(lin.values().front() == 0.0);
    CHECK(lin.values().back() == 1.5);
    CHECK(thrown_code([] { StateSpace::linspace(1.0, 0.0, 5); }) == Errc::validation_error);
    CHECK(thrown_code([] { StateSpace::linspace(0.0, 1.0, 0); }) == Errc::validation_error);
}

TEST_CASE("product spaces enumerate row-major with the last axis fastest") {
    const StateSpace s = StateSpace::product({{0.0, 1.0}, {10.0, 20.0, 30.0}});
    CHECK(s.size() == 6);
    CHECK(s.dim() == 2);
    CHECK_FALSE(s.one_dimensional());
    CHECK(s.point(0) == std::vector<double>{0.0, 10.0});
    CHECK(s.point(1) == std::vector<double>{0.0, 20.0});
    CHECK(s.point(4) == std::vector<double>{1.0, 20.0});
    CHECK(s.point(5) == std::vector<double>{1.0, 30.0});
    CHECK(thrown_code([&] { s.values(); }) == Errc::product_space_unsupported);
}

TEST_CASE("make_dist validates, clamps dust, and renormalizes") {
    const Dist d = dist_on_indices(3, {0.25, 0.5, 0.25});
    CHECK(d.size() == 3);
    CHECK(d[1] == 0.5);

    const Dist dusty = dist_on_indices(2, {1.0, -1e-10});
    CHECK(dusty[1] == 0.0);
    CHECK(dusty[0] == 1.0);

    CHECK(thrown_code([] { dist_on_indices(2, {1.1, -0.1}); }) == Errc::negative_mass);
    CHECK(thrown_code([] { dist_on_indices(2, {0.4, 0.4}); }) == Errc::mass_not_one);
    CHECK(thrown_code([] { dist_on_indices(3, {0.5, 0.5}); }) == Errc::length_mismatch);

    const Dist jittered = dist_on_indices(2, {0.5 + 3e-10, 0.5 + 3e-10});
    double total = 0.0;
    for (double p : jittered.probs()) total += p;
    CHECK(std::abs(total - 1.0) <= 1e-15);
}

TEST_CASE("distribution moments on a one-dimensional grid") {
    const Dist d = dist_on({0.0, 1.0, 2.0}, {0.25, 0.5, 0.25});
    CHECK(d.mean() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.variance() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("l1 distance needs a common space") {
    const Dist a = dist_on_indices(2, {0.3, 0.7});
    const Dist b = dist_on_indices(2, {0.5, 0.5});
    CHECK(l1_distance(a, b) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(l1_distance(a, a) == 0.0);

    const Dist c = dist_on_indices(3, {0.5, 0.25, 0.25});
    CHECK(thrown_code([&] { l1_distance(a, c); }) == Errc::dimension_mismatch);
}

TEST_CASE("alternating cone generators carry the sign pattern") {
    const OrderFamily cone = OrderFamily::alternating_cone(3);
    REQUIRE(cone.tag() == OrderTag::linear_cone);
    REQUIRE(cone.generators().size() == 3);
    CHECK(cone.generators()[0] == std::vector<double>{1.0, 0.0, 0.0});
    CHECK(cone.generators()[1] == std::vector<double>{0.0, -1.0, 0.0});
    CHECK(cone.generators()[2] == std::vector<double>{0.0, 0.0, 1.0});

    CHECK(thrown_code([] { OrderFamily::alternating_cone(0); }) == Errc::validation_error);
    CHECK(thrown_code([] { OrderFamily::linear_cone({{1.0, 0.0}, {1.0}}); }) ==
          Errc::length_mismatch);
}

TEST_CASE("linear aggregators evaluate dot products with an exact range") {
    SpacePtr space = share(StateSpace::indices(3));
    const Aggregator h = Aggregator::linear(space, {0.0, 1.0, 4.0});
    CHECK(h.is_linear());
    CHECK(h.has_exact_range());
    const auto [lo, hi] = h.range();
    CHECK(lo == 0.0);
    CHECK(hi == 4.0);
    CHECK(h(make_dist(space, {0.5, 0.25, 0.25})) == doctest::Approx(1.25).epsilon(1e-14));

    CHECK(thrown_code([&] { Aggregator::linear(space, {0.0, 1.0}); }) == Errc::length_mismatch);
    CHECK(thrown_code([&] { h(dist_on_indices(2, {0.5, 0.5})); }) == Errc::dimension_mismatch);
}

TEST_CASE("callback aggregators have no exact range") {
    SpacePtr space = share(StateSpace::indices(2));
    const Aggregator h = Aggregator::callback(space, [](const Dist& mu) { return mu[0]; });
    CHECK_FALSE(h.is_linear());
    CHECK_FALSE(h.has_exact_range());
    CHECK(h(make_dist(space, {0.3, 0.7})) == 0.3);
    CHECK(thrown_code([&] { h.range(); }) == Errc::validation_error);
}

TEST_CASE("seventeen-digit rendering round-trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, std::sqrt(2.0), 5.0 / 12.0, 1e-300, 0.0, -2.5e17}) {
        const std::string s = fmt17(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(fmt17_join({0.5, 0.25}) == fmt17(0.5) + "," + fmt17(0.25));
}
