#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nlmc/errors.hpp"

namespace nlmc {

/// Absolute tolerance for probability-vector validation (entry positivity and
/// total mass). Fixed project-wide.
inline constexpr double kSimplexTol = 1e-9;

/// Absolute tolerance for order comparisons on partial sums. Ties count as
/// satisfying the inequality.
inline constexpr double kOrderTol = 1e-12;

/// Finite ordered state space: either a single strictly increasing grid of
/// real values, or a product of such grids with the componentwise order.
/// States of a product space are enumerated row-major (last coordinate
/// fastest).
class StateSpace {
public:
    static StateSpace line(std::vector<double> values);
    static StateSpace product(std::vector<std::vector<double>> coords);
    /// Equispaced 1-d grid [lo, hi] with `count` points.
    static StateSpace linspace(double lo, double hi, std::size_t count);
    /// The grid {0, 1, ..., n-1}.
    static StateSpace indices(std::size_t n);

    std::size_t size() const noexcept { return size_; }
    std::size_t dim() const noexcept { return coords_.size(); }
    bool one_dimensional() const noexcept { return coords_.size() == 1; }

    /// 1-d only: the grid values.
    const std::vector<double>& values() const;
    /// 1-d only: value of state `i`.
    double value(std::size_t i) const;
    /// Coordinates of the state with flat index `i` (any dimension).
    std::vector<double> point(std::size_t i) const;
    const std::vector<std::vector<double>>& coords() const noexcept { return coords_; }

    bool same_as(const StateSpace& other) const noexcept;

private:
    explicit StateSpace(std::vector<std::vector<double>> coords);

    std::vector<std::vector<double>> coords_;
    std::size_t size_ = 0;
};

using SpacePtr = std::shared_ptr<const StateSpace>;

inline SpacePtr share(StateSpace s) { return std::make_shared<const StateSpace>(std::move(s)); }

class Dist;
Dist make_dist(SpacePtr space, std::vector<double> probs);

/// Probability vector over a StateSpace. Valid by construction: entries are
/// nonnegative and sum to one within kSimplexTol (see make_dist).
class Dist {
public:
    const std::vector<double>& probs() const noexcept { return probs_; }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::size_t size() const noexcept { return probs_.size(); }

    const StateSpace& space() const noexcept { return *space_; }
    const SpacePtr& space_ptr() const noexcept { return space_; }

    /// 1-d only.
    double mean() const;
    double variance() const;

private:
    friend Dist make_dist(SpacePtr space, std::vector<double> probs);
    Dist(SpacePtr space, std::vector<double> probs)
        : space_(std::move(space)), probs_(std::move(probs)) {}

    SpacePtr space_;
    std::vector<double> probs_;
};

/// l1 distance between two probability vectors on the same space.
double l1_distance(const Dist& a, const Dist& b);

/// Validating constructor for Dist. Entries below -kSimplexTol raise
/// NegativeMass; smaller negative dust is clamped to zero. A total mass
/// farther than kSimplexTol from one raises MassNotOne; otherwise the vector
/// is renormalized exactly.
Dist make_dist(SpacePtr space, std::vector<double> probs);

enum class OrderTag { sd, cx, icx, linear_cone };

const char* to_string(OrderTag t) noexcept;

/// Selects the function class D driving a stochastic order: increasing (sd),
/// convex (cx), increasing-convex (icx), or the linear cone spanned by a list
/// of generator vectors on a product space.
class OrderFamily {
public:
    static OrderFamily sd() { return OrderFamily(OrderTag::sd, {}); }
    static OrderFamily cx() { return OrderFamily(OrderTag::cx, {}); }
    static OrderFamily icx() { return OrderFamily(OrderTag::icx, {}); }
    static OrderFamily linear_cone(std::vector<std::vector<double>> generators);
    /// Sign-alternating orthant in dimension n: coordinate i (1-based) is
    /// positive for odd i and negative for even i; generators are the signed
    /// axes.
    static OrderFamily alternating_cone(std::size_t n);

    OrderTag tag() const noexcept { return tag_; }
    const std::vector<std::vector<double>>& generators() const noexcept { return generators_; }

private:
    OrderFamily(OrderTag tag, std::vector<std::vector<double>> generators)
        : tag_(tag), generators_(std::move(generators)) {}

    OrderTag tag_;
    std::vector<std::vector<double>> generators_;
};

/// Real-valued functional of a distribution. Either a linear form
/// H(mu) = sum_x m(x) mu(x) or an opaque callback. A linear form with
/// nondecreasing weights is monotone w.r.t. first-order stochastic dominance
/// by construction.
class Aggregator {
public:
    static Aggregator linear(SpacePtr space, std::vector<double> weights);
    static Aggregator callback(SpacePtr space, std::function<double(const Dist&)> fn,
                               OrderTag declared_monotone_in = OrderTag::sd);

    bool is_linear() const noexcept { return !weights_.empty(); }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const SpacePtr& space_ptr() const noexcept { return space_; }
    OrderTag declared_monotone_in() const noexcept { return declared_; }

    /// Range of the aggregator over the simplex; exact for linear forms
    /// ([min m, max m]), unavailable for callbacks.
    bool has_exact_range() const noexcept { return is_linear(); }
    std::pair<double, double> range() const;

    double operator()(const Dist& mu) const;

private:
    Aggregator(SpacePtr space, std::vector<double> weights,
               std::function<double(const Dist&)> fn, OrderTag declared)
        : space_(std::move(space)), weights_(std::move(weights)), fn_(std::move(fn)),
          declared_(declared) {}

    SpacePtr space_;
    std::vector<double> weights_;
    std::function<double(const Dist&)> fn_;
    OrderTag declared_;
};

double eval_aggregator(const Aggregator& h, const Dist& mu);

} // namespace nlmc
