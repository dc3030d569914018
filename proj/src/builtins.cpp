#include "nlmc/builtins.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "nlmc/core.hpp"
#include "nlmc/format.hpp"

namespace nlmc {
namespace builtins {
namespace {

SpacePtr line(std::vector<double> values) { return share(StateSpace::line(std::move(values))); }

Dist atoms(std::vector<double> values, std::vector<double> probs) {
    return make_dist(line(std::move(values)), std::move(probs));
}

/// Increasing piecewise-linear map with f(p) >= p on [0, 1], fixed exactly at
/// 0.3 and 0.7. Drives the period-2 orbit of pwl_oscillator2.
double pwl_lift(double p) {
    if (p <= 0.3) return p;
    if (p <= 0.5) return 1.2 * p - 0.06;
    if (p <= 0.7) return 0.8 * p + 0.14;
    return p;
}

} // namespace

KernelWithAggregator bandwagon2() {
    SpacePtr space = share(StateSpace::indices(2));
    auto row_fn = [space](std::size_t x, double h) {
        const double q = std::min(0.5, h);
        if (x == 0) return make_dist(space, {1.0 - q, q});
        return make_dist(space, {0.5, 0.5});
    };
    return {NonlinearKernel(space, std::move(row_fn), {0.0, 1.0}),
            Aggregator::linear(space, {0.0, 1.0})};
}

KernelWithAggregator antimonotone3() {
    SpacePtr space = share(StateSpace::indices(3));
    auto row_fn = [space](std::size_t x, double h) {
        if (x == 0) return make_dist(space, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        if (x == 1) return make_dist(space, {0.0, h, 1.0 - h});
        return make_dist(space, {h, 0.0, 1.0 - h});
    };
    return {NonlinearKernel(space, std::move(row_fn), {0.0, 1.0}),
            Aggregator::linear(space, {0.0, 1.0, 1.0})};
}

KernelWithAggregator flipflop2() {
    SpacePtr space = share(StateSpace::indices(2));
    auto row_fn = [space](std::size_t, double h) { return make_dist(space, {h, 1.0 - h}); };
    return {NonlinearKernel(space, std::move(row_fn), {0.0, 1.0}),
            Aggregator::linear(space, {0.0, 1.0})};
}

KernelWithAggregator pwl_oscillator2() {
    SpacePtr space = share(StateSpace::indices(2));
    auto row_fn = [space](std::size_t x, double h) {
        if (x == 0) return make_dist(space, {h, 1.0 - h});
        const double q = pwl_lift(1.0 - h);
        return make_dist(space, {1.0 - q, q});
    };
    return {NonlinearKernel(space, std::move(row_fn), {0.0, 1.0}),
            Aggregator::linear(space, {0.0, 1.0})};
}

KernelWithAggregator ar_linear() {
    SpacePtr grid = share(StateSpace::linspace(0.0, 1.5, 31));
    std::vector<double> m(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) m[i] = 0.25 + grid->values()[i] / 3.0;
    return build_ar_kernel(0.5, Drift{DriftKind::linear, 0.0}, atoms({0.75, 1.0}, {0.5, 0.5}),
                           std::move(m), grid);
}

AffineChainSpec ar_affine_spec() { return {{0.5, 0.5}, {1.0, -1.0}, {2.0, -3.0}}; }

KernelWithAggregator ar_logistic() {
    SpacePtr grid = share(StateSpace::linspace(0.0, 1.0, 21));
    const double third = 1.0 / 3.0;
    return build_ar_kernel(0.5, Drift{DriftKind::logistic, 1.0},
                           atoms({0.0, 0.05, 0.1}, {third, third, third}), grid->values(), grid);
}

double ar_logistic_restrict_lo() { return 0.5; }

QueueSpec mm1_queue(double mu_rate) {
    if (!(mu_rate > 0.0))
        fail(Errc::validation_error, "service rate must be positive, got " + fmt17(mu_rate));
    const double s = 2.0 / mu_rate;
    return {atoms({0.0, s}, {0.5, 0.5}),
            [s](double m) { return atoms({s + m}, {1.0}); },
            share(StateSpace::linspace(0.0, 2.0 * s, 41))};
}

QueueSpec deterministic_queue() {
    return {atoms({1.0}, {1.0}),
            [](double m) { return atoms({1.0 + m}, {1.0}); },
            share(StateSpace::linspace(0.0, 4.0, 41))};
}

QueueSpec lindley_fixture() {
    return {atoms({0.2, 1.0}, {0.9, 0.1}),
            [](double m) { return atoms({0.25 + m, 1.1 + m}, {0.05, 0.95}); },
            share(StateSpace::linspace(0.0, 3.0, 61))};
}

Cor1System two_state_system() {
    return {2,
            [](double a) {
                return std::vector<std::vector<double>>{{0.5 + 0.4 * a, 0.5 - 0.4 * a},
                                                        {0.3 + 0.4 * a, 0.7 - 0.4 * a}};
            },
            [](const std::vector<double>& x) { return x[1]; },
            {0.0, 1.0}};
}

WealthSpec wealth_fixture() {
    WealthSpec spec{
        {[](const std::vector<double>&, double x) { return 0.3 * x; }},
        {[](double h) { return atoms({0.5, 1.5}, {0.4 + 0.5 * h, 0.6 - 0.5 * h}); }},
        atoms({0.0, 0.2}, {0.5, 0.5}),
        share(StateSpace::linspace(0.0, 2.0, 21)),
        [](double x) { return 0.3 * x; }};
    return spec;
}

std::vector<std::string> ids() {
    return {"bandwagon2", "antimonotone3",  "flipflop2",    "pwl-oscillator2",
            "ar-linear",  "ar-logistic",    "mm1",          "mg1-det",
            "lindley-fixture", "two-state-eq", "wealth-fixture"};
}

KernelWithAggregator by_id(const std::string& id) {
    if (id == "bandwagon2") return bandwagon2();
    if (id == "antimonotone3") return antimonotone3();
    if (id == "flipflop2") return flipflop2();
    if (id == "pwl-oscillator2") return pwl_oscillator2();
    if (id == "ar-linear") return ar_linear();
    if (id == "ar-logistic") return ar_logistic();
    if (id == "mm1") return build_lindley_kernel(mm1_queue(1.0));
    if (id == "mg1-det") return build_lindley_kernel(deterministic_queue());
    if (id == "lindley-fixture") return build_lindley_kernel(lindley_fixture());
    if (id == "two-state-eq") {
        SpacePtr space = share(StateSpace::indices(2));
        Cor1System sys = two_state_system();
        auto row_fn = [space, sys](std::size_t x, double a) {
            return make_dist(space, sys.p_family(a)[x]);
        };
        return {NonlinearKernel(space, std::move(row_fn), sys.a_domain),
                Aggregator::linear(space, {0.0, 1.0})};
    }
    if (id == "wealth-fixture") return build_wealth_kernel(wealth_fixture());

    std::string known;
    for (const auto& name : ids()) {
        if (!known.empty()) known += ", ";
        known += name;
    }
    fail(Errc::validation_error, "unknown builtin '" + id + "'; known ids: " + known);
}

} // namespace builtins
} // namespace nlmc
