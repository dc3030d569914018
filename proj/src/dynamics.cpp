#include "nlmc/dynamics.hpp"

#include <ostream>

#include "nlmc/format.hpp"

namespace nlmc {

Trajectory iterate(const NonlinearKernel& q, const Aggregator& h, const Dist& mu0,
                   std::size_t steps) {
    if (steps == 0) fail(Errc::validation_error, "iteration needs at least one step");
    Trajectory traj;
    traj.dists.reserve(steps + 1);
    traj.aggregator_path.reserve(steps + 1);
    traj.dists.push_back(mu0);
    traj.aggregator_path.push_back(h(mu0));
    for (std::size_t t = 0; t < steps; ++t) {
        try {
            traj.dists.push_back(apply_T(q, h, traj.dists.back()));
        } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + " at step " + std::to_string(t + 1));
        }
        traj.aggregator_path.push_back(h(traj.dists.back()));
    }
    return traj;
}

std::optional<Cycle> detect_cycle(const Trajectory& traj, double tol) {
    const std::size_t len = traj.length();
    if (len < 3) fail(Errc::validation_error, "cycle detection needs at least three entries");
    for (std::size_t period = 1; period <= (len - 1) / 2; ++period) {
        // Earliest onset from which mu_{s+period} matches mu_s all the way to
        // the end; the match must cover at least two full periods.
        std::size_t onset = len - period; // sentinel: no matching suffix yet
        for (std::size_t s = len - period; s-- > 0;) {
            if (l1_distance(traj.dists[s + period], traj.dists[s]) <= tol)
                onset = s;
            else
                break;
        }
        if (onset + 2 * period <= len && onset < len - period) return Cycle{period, onset};
    }
    return std::nullopt;
}

Dist cesaro(const Trajectory& traj, std::size_t burn_in) {
    if (traj.length() == 0) fail(Errc::validation_error, "trajectory is empty");
    if (burn_in >= traj.length())
        fail(Errc::validation_error, "burn-in swallows the whole trajectory");
    const std::size_t n = traj.dists.front().size();
    const auto count = static_cast<double>(traj.length() - burn_in);
    std::vector<double> avg(n, 0.0);
    for (std::size_t t = burn_in; t < traj.length(); ++t)
        for (std::size_t j = 0; j < n; ++j) avg[j] += traj.dists[t][j] / count;
    return make_dist(traj.dists.front().space_ptr(), std::move(avg));
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    if (traj.length() == 0) fail(Errc::validation_error, "trajectory is empty");
    const std::size_t n = traj.dists.front().size();
    out << "t";
    for (std::size_t j = 0; j < n; ++j) out << ",p" << j;
    out << ",h\n";
    for (std::size_t t = 0; t < traj.length(); ++t) {
        out << t;
        for (std::size_t j = 0; j < n; ++j) out << ',' << fmt17(traj.dists[t][j]);
        out << ',' << fmt17(traj.aggregator_path[t]) << '\n';
    }
}

} // namespace nlmc
