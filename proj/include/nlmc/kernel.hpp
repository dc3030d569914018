#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "nlmc/core.hpp"

namespace nlmc {

/// Closed interval of admissible aggregator values.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double h, double tol = 1e-12) const noexcept {
        return h >= lo - tol && h <= hi + tol;
    }
    double width() const noexcept { return hi - lo; }
};

/// Transition edges below this threshold are treated as structural zeros when
/// building the communication graph.
inline constexpr double kEdgeTol = 1e-12;

/// Nonlinear Markov kernel Q: maps (state index, aggregator value h) to a
/// transition row. The noise law and the update map are pre-integrated into
/// the row function. Immutable after construction.
class NonlinearKernel {
public:
    using RowFn = std::function<Dist(std::size_t x, double h)>;

    NonlinearKernel(SpacePtr space, RowFn row_fn, Interval h_domain);

    std::size_t n_states() const noexcept { return space_->size(); }
    const SpacePtr& space_ptr() const noexcept { return space_; }
    const StateSpace& space() const noexcept { return *space_; }
    const Interval& h_domain() const noexcept { return h_domain_; }

    /// Evaluate a transition row. Errors: AggregatorOutOfDomain, BadStateIndex.
    Dist row(std::size_t x, double h) const;

    /// Same kernel with a narrowed admissible-aggregator interval.
    NonlinearKernel with_h_domain(Interval narrowed) const;

private:
    SpacePtr space_;
    RowFn row_fn_;
    Interval h_domain_;
};

/// Row-stochastic matrix: the kernel frozen at a fixed aggregator value.
class LinearChain {
public:
    LinearChain(SpacePtr space, std::vector<double> row_major);

    std::size_t n() const noexcept { return n_; }
    double at(std::size_t i, std::size_t j) const { return p_[i * n_ + j]; }
    const std::vector<double>& data() const noexcept { return p_; }
    const SpacePtr& space_ptr() const noexcept { return space_; }

    std::vector<double> row(std::size_t i) const;

private:
    SpacePtr space_;
    std::vector<double> p_;
    std::size_t n_;
};

struct PropertyWitness {
    double h;
    std::string reason;
};

/// Grid certificate for Property (U) or (C). `holds` is true iff no witness
/// was found on the sampled aggregator grid; the grid is recorded so callers
/// can refine.
struct PropertyReport {
    enum class Which { U, C };
    Which property;
    bool holds = false;
    std::vector<PropertyWitness> witnesses;
    std::vector<double> h_grid;
};

/// Structural summary of a frozen chain's communication graph.
struct ChainStructure {
    std::size_t recurrent_classes = 0;
    /// Period of the recurrent class (gcd of cycle lengths); meaningful only
    /// when recurrent_classes == 1.
    std::size_t period = 0;
};

ChainStructure analyze_chain(const LinearChain& chain);

LinearChain freeze(const NonlinearKernel& q, double h);

/// One step of the nonlinear operator: (T mu)_j = sum_i mu_i row(i, H(mu))_j.
Dist apply_T(const NonlinearKernel& q, const Aggregator& h, const Dist& mu);

/// One step of the linearized operator M_h: theta -> theta * freeze(q, h).
Dist apply_M(const NonlinearKernel& q, double h, const Dist& theta);

Dist apply_M(const LinearChain& chain, const Dist& theta);

/// Unique stationary distribution of the frozen chain. Solved directly via
/// (P^T - I) with one row replaced by the normalization; falls back to lazy
/// power iteration when the system is ill-conditioned. Errors:
/// MultipleStationary when the chain has more than one recurrent class,
/// NumericalFailure if neither route converges.
Dist stationary_of_M(const NonlinearKernel& q, double h);

Dist stationary(const LinearChain& chain);

/// Default certification grid: equispaced points covering the interval.
std::vector<double> default_h_grid(const Interval& domain, std::size_t points = 101);

/// Property (U) on a grid: every frozen chain has a single recurrent
/// communicating class, hence a unique stationary distribution.
PropertyReport check_property_U(const NonlinearKernel& q, const std::vector<double>& h_grid);

/// Property (C): Property (U) plus aperiodicity of the recurrent class, so
/// iterates of M_h converge to the stationary distribution from anywhere.
PropertyReport check_property_C(const NonlinearKernel& q, const std::vector<double>& h_grid);

} // namespace nlmc
