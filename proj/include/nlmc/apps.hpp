#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "nlmc/certify.hpp"
#include "nlmc/kernel.hpp"

namespace nlmc {

/// A kernel paired with the aggregator it was built for.
struct KernelWithAggregator {
    NonlinearKernel kernel;
    Aggregator aggregator;
};

// --- Strategic single-server queue ------------------------------------------

/// Strategic queue primitives: the service-time law, the family of
/// inter-arrival laws indexed by the mean wait m (FOSD-increasing in m: longer
/// expected waits stochastically thin out arrivals), and the waiting-time grid
/// the Lindley recursion is projected onto.
struct QueueSpec {
    Dist service;
    std::function<Dist(double m)> arrival_family;
    SpacePtr wait_grid;

    double es() const;  // mean service time
    double es2() const; // second moment
};

/// Equilibrium arrival rate of the M/G/1 queue whose mean inter-arrival time
/// equals the stationary mean wait:
/// lambda = (sqrt(ES^2 + 2 ES2) - ES) / ES2. Errors: BadMoments (ES <= 0 or
/// ES2 < ES^2), UnstableQueue if lambda * ES >= 1.
double mg1_equilibrium_rate(double es, double es2);

/// Pollaczek-Khinchin stationary mean wait lambda*ES2 / (2(1 - lambda*ES)).
double pk_wait(double lambda, double es, double es2);

/// Waiting-time kernel of the Lindley recursion X' = max(0, X + S - T(m)),
/// projected onto the wait grid by proportional split with boundary lumping;
/// aggregator H(mu) = E[X]. Rows whose lumped boundary mass exceeds 1% raise
/// GridOverflowExcess (the grid is too short).
KernelWithAggregator build_lindley_kernel(const QueueSpec& spec);

// --- Nonlinear equations on the simplex --------------------------------------

/// x = x P(G(x)) with a stochastic matrix family P(a) and a majorization-
/// monotone functional G on the simplex.
struct Cor1System {
    std::size_t n = 0;
    std::function<std::vector<std::vector<double>>(double a)> p_family;
    std::function<double(const std::vector<double>& x)> g;
    Interval a_domain{0, 0};
};

struct Cor1Solution {
    std::vector<double> x;
    double a = 0.0;
    std::array<Certificate, 3> conditions;
    double residual = 0.0; // |G(x*) - a*|
};

/// Check the three uniqueness conditions (rows majorization-increasing in the
/// row index, majorization-decreasing in a, unique stationary vector per a) on
/// a 101-point grid of the parameter interval, then solve a = G(stationary(P(a)))
/// by scan plus bisection. Throws ConditionFailed with a witness if any
/// condition fails, NoRoot if the scan finds no solution.
Cor1Solution solve_cor1(const Cor1System& sys, double grid_step = 0.0, double tol = 1e-10);

// --- Autoregressive chains ----------------------------------------------------

enum class DriftKind { linear, logistic };

/// Aggregator feedback term: linear is -h, logistic(c) is h - c h^2.
struct Drift {
    DriftKind kind = DriftKind::linear;
    double c = 0.0;
};

/// Kernel of X' = a X + drift(h) + noise on a 1-d grid, with the linear
/// aggregator H(mu) = sum m(x) mu(x) for an increasing weight vector m.
/// Off-grid values are split proportionally between neighboring cells;
/// boundary-lumped mass beyond 1% raises GridOverflowExcess.
KernelWithAggregator build_ar_kernel(double a, Drift drift, const Dist& noise,
                                     std::vector<double> m, SpacePtr grid);

// --- Wealth dynamics -----------------------------------------------------------

/// Wealth recursion X' = sum_i g_i(returns, X) R_i + Y on a wealth grid.
/// Policies observe the realized return vector; per-asset returns are
/// independent laws indexed by the aggregator. The aggregator is the total
/// savings H(mu) = sum_x savings(x) mu(x), with savings the policy's
/// wealth-to-total-allocation map.
struct WealthSpec {
    using Policy = std::function<double(const std::vector<double>& returns, double x)>;

    std::vector<Policy> policies;
    std::vector<std::function<Dist(double h)>> returns;
    Dist income;
    SpacePtr grid;
    std::function<double(double x)> savings;
};

/// Errors: InfeasiblePolicy when an allocation is negative or total
/// allocation exceeds wealth; GridOverflowExcess as for the other builders.
KernelWithAggregator build_wealth_kernel(const WealthSpec& spec);

} // namespace nlmc
