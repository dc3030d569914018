#pragma once

#include <functional>
#include <random>
#include <vector>

#include "nlmc/core.hpp"
#include "nlmc/errors.hpp"

namespace nlmc::test {

/// Runs fn, which must throw nlmc::Error, and returns its code.
inline Errc thrown_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    throw std::logic_error("expected an nlmc::Error but nothing was thrown");
}

inline Dist dist_on_indices(std::size_t n, std::vector<double> probs) {
    return make_dist(share(StateSpace::indices(n)), std::move(probs));
}

inline Dist dist_on(std::vector<double> grid, std::vector<double> probs) {
    return make_dist(share(StateSpace::line(std::move(grid))), std::move(probs));
}

/// Random point of the probability simplex, uniform enough for fuzzing.
inline std::vector<double> random_probs(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> p(n);
    double total = 0.0;
    for (auto& v : p) {
        v = unit(rng) + 1e-6;
        total += v;
    }
    for (auto& v : p) v /= total;
    return p;
}

inline double l1(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

} // namespace nlmc::test
