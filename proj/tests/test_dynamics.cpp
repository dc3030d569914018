#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "nlmc/builtins.hpp"
#include "nlmc/dynamics.hpp"

#include "helpers.hpp"

using namespace nlmc;
using test::dist_on_indices;
using test::thrown_code;

TEST_CASE("mirror dynamics alternate exactly from an asymmetric start") {
    const auto [kernel, h_fn] = builtins::flipflop2();
    const Dist mu0 = dist_on_indices(2, {0.7, 0.3});
    const Trajectory traj = iterate(kernel, h_fn, mu0, 6);
    REQUIRE(traj.length() == 7);
    CHECK(traj.aggregator_path[0] == doctest::Approx(0.3).epsilon(1e-14));
    for (std::size_t t = 0; t < traj.length(); ++t) {
        const double expected = t % 2 == 0 ? 0.7 : 0.3;
        CHECK(traj.dists[t][0] == doctest::Approx(expected).epsilon(1e-13));
        CHECK(traj.aggregator_path[t] ==
              doctest::Approx(1.0 - expected).epsilon(1e-13));
    }
}

TEST_CASE("cycle detection reports period and onset") {
    const auto [kernel, h_fn] = builtins::flipflop2();
    const Trajectory traj = iterate(kernel, h_fn, dist_on_indices(2, {0.7, 0.3}), 20);
    const auto cycle = detect_cycle(traj);
    REQUIRE(cycle.has_value());
    CHECK(cycle->period == 2);
    CHECK(cycle->onset == 0);

    const Trajectory settled = iterate(kernel, h_fn, dist_on_indices(2, {0.5, 0.5}), 10);
    const auto fixed = detect_cycle(settled);
    REQUIRE(fixed.has_value());
    CHECK(fixed->period == 1);
    CHECK(fixed->onset == 0);
}

TEST_CASE("cycle onset skips a transient prefix") {
    const Dist a = dist_on_indices(2, {0.1, 0.9});
    const Dist b = dist_on_indices(2, {0.7, 0.3});
    const Dist c = dist_on_indices(2, {0.3, 0.7});
    Trajectory traj;
    traj.dists = {a, b, c, b, c, b, c};
    traj.aggregator_path = {0.9, 0.3, 0.7, 0.3, 0.7, 0.3, 0.7};
    const auto cycle = detect_cycle(traj);
    REQUIRE(cycle.has_value());
    CHECK(cycle->period == 2);
    CHECK(cycle->onset == 1);

    Trajectory chaotic;
    chaotic.dists = {a, b, a, c, b, a};
    chaotic.aggregator_path = {0, 0, 0, 0, 0, 0};
    CHECK_FALSE(detect_cycle(chaotic).has_value());

    Trajectory tiny;
    tiny.dists = {a, b};
    tiny.aggregator_path = {0, 0};
    CHECK(thrown_code([&] { detect_cycle(tiny); }) == Errc::validation_error);
}

TEST_CASE("time averages of an alternating orbit are the midpoint") {
    const auto [kernel, h_fn] = builtins::pwl_oscillator2();
    const Trajectory traj = iterate(kernel, h_fn, dist_on_indices(2, {0.7, 0.3}), 100);
    const Dist avg = cesaro(traj, 1);
    CHECK(avg[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(avg[1] == doctest::Approx(0.5).epsilon(1e-12));

    const Dist all_in = cesaro(traj, 0);
    CHECK(all_in[0] == doctest::Approx(0.5 + 0.2 / 101.0).epsilon(1e-12));

    CHECK(thrown_code([&] { cesaro(traj, traj.length()); }) == Errc::validation_error);
}

TEST_CASE("iteration propagates domain escapes with the step index") {
    SpacePtr space = share(StateSpace::indices(2));
    auto row_fn = [space](std::size_t, double) { return make_dist(space, {0.0, 1.0}); };
    const NonlinearKernel kernel(space, row_fn, {0.0, 0.6});
    const Aggregator h_fn = Aggregator::linear(space, {0.0, 1.0});
    const Dist mu0 = dist_on_indices(2, {1.0, 0.0});

    try {
        iterate(kernel, h_fn, mu0, 10);
        FAIL("expected the aggregator to escape the domain");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::aggregator_out_of_domain);
        CHECK(std::string(e.what()).find("at step 2") != std::string::npos);
    }

    CHECK(thrown_code([&] { iterate(kernel, h_fn, mu0, 0); }) == Errc::validation_error);
}

TEST_CASE("trajectory export is stable to the last digit") {
    const auto [kernel, h_fn] = builtins::flipflop2();
    const Trajectory traj = iterate(kernel, h_fn, dist_on_indices(2, {0.75, 0.25}), 2);
    std::ostringstream out;
    write_trajectory_csv(traj, out);
    CHECK(out.str() ==
          "t,p0,p1,h\n"
          "0,0.75,0.25,0.25\n"
          "1,0.25,0.75,0.75\n"
          "2,0.75,0.25,0.25\n");
}
