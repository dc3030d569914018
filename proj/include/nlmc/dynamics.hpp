#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "nlmc/kernel.hpp"

namespace nlmc {

/// Distribution flow mu_{t+1} = T mu_t together with the aggregator path
/// H(mu_t). Entry 0 is the initial distribution.
struct Trajectory {
    std::vector<Dist> dists;
    std::vector<double> aggregator_path;

    std::size_t length() const noexcept { return dists.size(); }
};

/// Iterate the flow for `steps` steps (trajectory has steps + 1 entries).
/// If the aggregator leaves the kernel's domain mid-flight, the error message
/// reports the step index.
Trajectory iterate(const NonlinearKernel& q, const Aggregator& h, const Dist& mu0,
                   std::size_t steps);

struct Cycle {
    std::size_t period; // period 1 means convergence to a fixed point
    std::size_t onset;
};

/// Smallest period p >= 1 and earliest onset t such that
/// ||mu_{s+p} - mu_s||_1 <= tol for every s from t to the trajectory end.
/// The sustained-match requirement guards against slow spirals.
std::optional<Cycle> detect_cycle(const Trajectory& traj, double tol = 1e-8);

/// Arithmetic mean of the recorded distributions from `burn_in` on. The
/// initial distribution is included when burn_in == 0.
Dist cesaro(const Trajectory& traj, std::size_t burn_in = 0);

/// CSV export: one row per step with t, the probabilities, and H(mu_t).
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

} // namespace nlmc
