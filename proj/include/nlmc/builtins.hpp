#pragma once

#include <string>
#include <vector>

#include "nlmc/apps.hpp"
#include "nlmc/certify.hpp"
#include "nlmc/kernel.hpp"

namespace nlmc {

/// Named model library. Each builder returns a kernel together with its
/// aggregator so callers can certify, solve, and simulate without wiring up
/// the parts by hand. Identifiers match the scenario files shipped with the
/// command-line tool.
namespace builtins {

/// Two-state chain where the high state attracts mass in proportion to its
/// own popularity, capped at a coin flip: rows (1 - min(0.5, h), min(0.5, h))
/// and (0.5, 0.5) under H(mu) = mu({1}). Order-preserving but not
/// order-decreasing in h, and two equilibria coexist.
KernelWithAggregator bandwagon2();

/// Three-state chain with rows (1/3, 1/3, 1/3), (0, h, 1-h), (h, 0, 1-h)
/// under H(mu) = mu({1}) + mu({2}). Order-decreasing in h but not
/// order-preserving in the state. Two equilibria.
KernelWithAggregator antimonotone3();

/// Two-state chain with both rows (h, 1 - h) under H(mu) = mu({1}):
/// the self-consistency map is h -> 1 - h, so the unique equilibrium
/// (0.5, 0.5) coexists with a period-2 orbit from any asymmetric start.
KernelWithAggregator flipflop2();

/// Two-state chain under H(mu) = mu({1}) with row 0 = (h, 1-h) and row 1 =
/// (1 - f(1-h), f(1-h)) for an increasing piecewise-linear f with f(p) >= p.
/// Every stochastic-order certificate passes, yet the orbit from
/// mu({0}) = 0.7 cycles with period 2 and its time average (0.5, 0.5) is
/// not invariant.
KernelWithAggregator pwl_oscillator2();

/// Linear autoregression X' = 0.5 X - h + noise on a 31-point grid over
/// [0, 1.5], noise uniform on {0.75, 1.0}, aggregator weights
/// m(x) = 0.25 + x/3. Unique equilibrium h* = 0.5.
KernelWithAggregator ar_linear();

/// Coefficients of the alternating-sign linearization used by the affine
/// certificate demo: diagonal a, forcing beta, offset gamma.
AffineChainSpec ar_affine_spec();

/// Logistic autoregression X' = 0.5 X + h - h^2 + noise on a 21-point grid
/// over [0, 1], noise uniform on {0, 0.05, 0.1}. Order-decreasing fails on
/// the full aggregator range but holds on [0.5, 1].
KernelWithAggregator ar_logistic();

/// Left endpoint of the restriction that repairs ar_logistic (1/(2c) = 0.5).
double ar_logistic_restrict_lo();

/// Strategic M/M/1 fixture: exponential service with rate mu discretized on
/// a wait grid; the equilibrium arrival rate is (sqrt(5) - 1) mu / 2.
QueueSpec mm1_queue(double mu_rate);

/// Deterministic-service fixture (ES = 1, ES2 = 1): equilibrium arrival rate
/// sqrt(3) - 1.
QueueSpec deterministic_queue();

/// Lindley fixture small enough to iterate in tests: two-point service law,
/// geometric-like arrival family on a short wait grid.
QueueSpec lindley_fixture();

/// Two-state nonlinear equation x = x P(G(x)) with
/// P(a) = ((0.5 + 0.4a, 0.5 - 0.4a), (0.3 + 0.4a, 0.7 - 0.4a)) on a in
/// [0, 1] and G(x) = x_2. Closed form: a* = 5/12, x* = (7/12, 5/12).
Cor1System two_state_system();

/// Wealth fixture: one risky asset, two-point returns shifting with total
/// savings, linear consumption policy on a short wealth grid.
WealthSpec wealth_fixture();

/// Identifiers accepted by the scenario loader, in a stable order.
std::vector<std::string> ids();

/// Build the kernel + aggregator for any identifier in ids().
/// Throws ValidationError for unknown names.
KernelWithAggregator by_id(const std::string& id);

} // namespace builtins
} // namespace nlmc
