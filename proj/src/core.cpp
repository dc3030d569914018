#include "nlmc/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nlmc/format.hpp"

namespace nlmc {

const char* to_string(Errc c) noexcept {
    switch (c) {
        case Errc::negative_mass: return "NegativeMass";
        case Errc::mass_not_one: return "MassNotOne";
        case Errc::dimension_mismatch: return "DimensionMismatch";
        case Errc::product_space_unsupported: return "ProductSpaceUnsupported";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::aggregator_out_of_domain: return "AggregatorOutOfDomain";
        case Errc::bad_state_index: return "BadStateIndex";
        case Errc::multiple_stationary: return "MultipleStationary";
        case Errc::numerical_failure: return "NumericalFailure";
        case Errc::unsupported_family: return "UnsupportedFamily";
        case Errc::empty_interval: return "EmptyInterval";
        case Errc::unstable_queue: return "UnstableQueue";
        case Errc::bad_moments: return "BadMoments";
        case Errc::grid_overflow_excess: return "GridOverflowExcess";
        case Errc::infeasible_policy: return "InfeasiblePolicy";
        case Errc::condition_failed: return "ConditionFailed";
        case Errc::no_root: return "NoRoot";
        case Errc::parse_error: return "ParseError";
        case Errc::validation_error: return "ValidationError";
    }
    return "UnknownError";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt17_join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt17(v[i]);
    }
    return out;
}

StateSpace::StateSpace(std::vector<std::vector<double>> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) fail(Errc::validation_error, "state space needs at least one axis");
    size_ = 1;
    for (const auto& axis : coords_) {
        if (axis.empty()) fail(Errc::validation_error, "state space axis is empty");
        for (std::size_t i = 1; i < axis.size(); ++i)
            if (!(axis[i] > axis[i - 1]))
                fail(Errc::validation_error, "state space axis values must be strictly increasing");
        size_ *= axis.size();
    }
}

StateSpace StateSpace::line(std::vector<double> values) {
    return StateSpace({std::move(values)});
}

StateSpace StateSpace::product(std::vector<std::vector<double>> coords) {
    return StateSpace(std::move(coords));
}

StateSpace StateSpace::linspace(double lo, double hi, std::size_t count) {
    if (count == 0) fail(Errc::validation_error, "linspace needs at least one point");
    std::vector<double> values(count);
    if (count == 1) {
        values[0] = lo;
    } else {
        if (!(hi > lo)) fail(Errc::validation_error, "linspace needs hi > lo");
        for (std::size_t i = 0; i < count; ++i)
            values[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        values.back() = hi;
    }
    return line(std::move(values));
}

StateSpace StateSpace::indices(std::size_t n) {
    if (n == 0) fail(Errc::validation_error, "index space needs at least one state");
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = static_cast<double>(i);
    return line(std::move(values));
}

const std::vector<double>& StateSpace::values() const {
    if (!one_dimensional())
        fail(Errc::product_space_unsupported, "values() needs a one-dimensional space");
    return coords_[0];
}

double StateSpace::value(std::size_t i) const {
    const auto& v = values();
    if (i >= v.size()) fail(Errc::bad_state_index, "state index " + std::to_string(i));
    return v[i];
}

std::vector<double> StateSpace::point(std::size_t i) const {
    if (i >= size_) fail(Errc::bad_state_index, "state index " + std::to_string(i));
    std::vector<double> p(coords_.size());
    std::size_t rest = i;
    for (std::size_t d = coords_.size(); d-- > 0;) {
        const auto& axis = coords_[d];
        p[d] = axis[rest % axis.size()];
        rest /= axis.size();
    }
    return p;
}

bool StateSpace::same_as(const StateSpace& other) const noexcept {
    return coords_ == other.coords_;
}

double Dist::mean() const {
    const auto& v = space_->values();
    double m = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) m += probs_[i] * v[i];
    return m;
}

double Dist::variance() const {
    const auto& v = space_->values();
    double m = mean(), s = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        const double d = v[i] - m;
        s += probs_[i] * d * d;
    }
    return s;
}

double l1_distance(const Dist& a, const Dist& b) {
    if (a.size() != b.size())
        fail(Errc::dimension_mismatch, "distributions live on different spaces");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

Dist make_dist(SpacePtr space, std::vector<double> probs) {
    if (!space) fail(Errc::validation_error, "distribution needs a state space");
    if (probs.size() != space->size())
        fail(Errc::length_mismatch, "probability vector has " + std::to_string(probs.size()) +
                                        " entries for " + std::to_string(space->size()) +
                                        " states");
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!std::isfinite(probs[i]))
            fail(Errc::validation_error, "probability at state " + std::to_string(i) +
                                             " is not finite");
        if (probs[i] < -kSimplexTol)
            fail(Errc::negative_mass,
                 "probability " + fmt17(probs[i]) + " at state " + std::to_string(i));
        if (probs[i] < 0.0) probs[i] = 0.0;
        total += probs[i];
    }
    if (std::abs(total - 1.0) > kSimplexTol)
        fail(Errc::mass_not_one, "total mass " + fmt17(total));
    for (auto& p : probs) p /= total;
    return Dist(std::move(space), std::move(probs));
}

const char* to_string(OrderTag t) noexcept {
    switch (t) {
        case OrderTag::sd: return "sd";
        case OrderTag::cx: return "cx";
        case OrderTag::icx: return "icx";
        case OrderTag::linear_cone: return "linear_cone";
    }
    return "unknown";
}

OrderFamily OrderFamily::linear_cone(std::vector<std::vector<double>> generators) {
    if (generators.empty())
        fail(Errc::validation_error, "cone family needs at least one generator");
    const std::size_t dim = generators[0].size();
    if (dim == 0) fail(Errc::validation_error, "cone generator is empty");
    for (const auto& g : generators)
        if (g.size() != dim) fail(Errc::length_mismatch, "cone generators differ in length");
    return OrderFamily(OrderTag::linear_cone, std::move(generators));
}

OrderFamily OrderFamily::alternating_cone(std::size_t n) {
    if (n == 0) fail(Errc::validation_error, "cone dimension must be positive");
    std::vector<std::vector<double>> gens(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) gens[i][i] = (i % 2 == 0) ? 1.0 : -1.0;
    return linear_cone(std::move(gens));
}

Aggregator Aggregator::linear(SpacePtr space, std::vector<double> weights) {
    if (!space) fail(Errc::validation_error, "aggregator needs a state space");
    if (weights.size() != space->size())
        fail(Errc::length_mismatch, "aggregator has " + std::to_string(weights.size()) +
                                        " weights for " + std::to_string(space->size()) +
                                        " states");
    if (weights.empty()) fail(Errc::validation_error, "aggregator weights are empty");
    return Aggregator(std::move(space), std::move(weights), nullptr, OrderTag::sd);
}

Aggregator Aggregator::callback(SpacePtr space, std::function<double(const Dist&)> fn,
                                OrderTag declared_monotone_in) {
    if (!space) fail(Errc::validation_error, "aggregator needs a state space");
    if (!fn) fail(Errc::validation_error, "aggregator callback is empty");
    return Aggregator(std::move(space), {}, std::move(fn), declared_monotone_in);
}

std::pair<double, double> Aggregator::range() const {
    if (!is_linear())
        fail(Errc::validation_error, "exact range is only known for linear aggregators");
    const auto [lo, hi] = std::minmax_element(weights_.begin(), weights_.end());
    return {*lo, *hi};
}

double Aggregator::operator()(const Dist& mu) const {
    if (mu.size() != space_->size())
        fail(Errc::dimension_mismatch, "distribution does not match the aggregator's space");
    if (is_linear()) {
        double h = 0.0;
        for (std::size_t i = 0; i < weights_.size(); ++i) h += weights_[i] * mu[i];
        return h;
    }
    return fn_(mu);
}

double eval_aggregator(const Aggregator& h, const Dist& mu) { return h(mu); }

} // namespace nlmc
