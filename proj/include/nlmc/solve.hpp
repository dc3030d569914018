#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlmc/certify.hpp"
#include "nlmc/kernel.hpp"

namespace nlmc {

struct Equilibrium {
    double h;
    Dist dist;
    double residual; // l1 norm of T(mu) - mu
};

struct PhiSample {
    double h;
    double phi = 0.0;
    bool ok = false;      // false when Property (U) failed at this sample
    std::string note;
};

enum class Verdict { unique_certified, multiple_found, none_found, uncertified_unique };

const char* to_string(Verdict v) noexcept;

/// Outcome of the invariant-distribution scan: the SD certificates, the
/// sampled self-consistency map, every equilibrium found with its residual,
/// and a verdict consistent with both.
struct EquilibriumReport {
    std::vector<Certificate> certificates; // d_preserving, d_decreasing, h_monotone (SD)
    std::vector<Equilibrium> equilibria;
    std::vector<PhiSample> phi_samples;
    Verdict verdict = Verdict::none_found;
    bool all_certified = false;
    /// Whether phi is nonincreasing across valid samples (within 1e-9).
    /// Implied by the certificates; recorded so violations surface.
    bool phi_nonincreasing = false;
};

/// The self-consistency map phi(h) = H(stationary of M_h). Fixed points of
/// phi are exactly the aggregator values of invariant distributions.
double self_consistency(const NonlinearKernel& q, const Aggregator& h_fn, double h);

/// l1 residual of the invariance equation at mu.
double verify_invariant(const NonlinearKernel& q, const Aggregator& h_fn, const Dist& mu);

/// Scan phi(h) - h over the admissible interval, refine every sign change by
/// bisection (with secant polish), pick up boundary roots and tangential
/// double roots, and validate each root as an invariant distribution.
/// grid_step <= 0 selects the default (interval width / 1000).
EquilibriumReport find_equilibria(const NonlinearKernel& q, const Aggregator& h_fn,
                                  double grid_step = 0.0, double tol = 1e-10);

} // namespace nlmc
