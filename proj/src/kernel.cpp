#include "nlmc/kernel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "nlmc/format.hpp"

namespace nlmc {

NonlinearKernel::NonlinearKernel(SpacePtr space, RowFn row_fn, Interval h_domain)
    : space_(std::move(space)), row_fn_(std::move(row_fn)), h_domain_(h_domain) {
    if (!space_) fail(Errc::validation_error, "kernel needs a state space");
    if (!row_fn_) fail(Errc::validation_error, "kernel needs a row function");
    if (!(h_domain_.lo <= h_domain_.hi))
        fail(Errc::empty_interval, "aggregator domain [" + fmt17(h_domain_.lo) + ", " +
                                       fmt17(h_domain_.hi) + "]");
}

Dist NonlinearKernel::row(std::size_t x, double h) const {
    if (x >= n_states()) fail(Errc::bad_state_index, "state index " + std::to_string(x));
    if (!h_domain_.contains(h, kEdgeTol))
        fail(Errc::aggregator_out_of_domain,
             "h = " + fmt17(h) + " outside [" + fmt17(h_domain_.lo) + ", " +
                 fmt17(h_domain_.hi) + "]");
    Dist r = row_fn_(x, h);
    if (r.size() != n_states())
        fail(Errc::dimension_mismatch, "row function returned a row of wrong length");
    return r;
}

NonlinearKernel NonlinearKernel::with_h_domain(Interval narrowed) const {
    if (!(narrowed.lo <= narrowed.hi))
        fail(Errc::empty_interval, "restriction [" + fmt17(narrowed.lo) + ", " +
                                       fmt17(narrowed.hi) + "]");
    if (!h_domain_.contains(narrowed.lo, kEdgeTol) || !h_domain_.contains(narrowed.hi, kEdgeTol))
        fail(Errc::aggregator_out_of_domain,
             "restriction [" + fmt17(narrowed.lo) + ", " + fmt17(narrowed.hi) +
                 "] leaves the domain [" + fmt17(h_domain_.lo) + ", " + fmt17(h_domain_.hi) +
                 "]");
    NonlinearKernel out = *this;
    out.h_domain_ = narrowed;
    return out;
}

LinearChain::LinearChain(SpacePtr space, std::vector<double> row_major)
    : space_(std::move(space)) {
    if (!space_) fail(Errc::validation_error, "chain needs a state space");
    n_ = space_->size();
    if (row_major.size() != n_ * n_)
        fail(Errc::length_mismatch, "transition matrix has " + std::to_string(row_major.size()) +
                                        " entries for " + std::to_string(n_) + " states");
    p_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
        std::vector<double> r(row_major.begin() + static_cast<std::ptrdiff_t>(i * n_),
                              row_major.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_));
        Dist valid = make_dist(space_, std::move(r));
        std::copy(valid.probs().begin(), valid.probs().end(), p_.begin() + static_cast<std::ptrdiff_t>(i * n_));
    }
}

std::vector<double> LinearChain::row(std::size_t i) const {
    if (i >= n_) fail(Errc::bad_state_index, "state index " + std::to_string(i));
    return {p_.begin() + static_cast<std::ptrdiff_t>(i * n_),
            p_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_)};
}

LinearChain freeze(const NonlinearKernel& q, double h) {
    const std::size_t n = q.n_states();
    std::vector<double> p(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const Dist r = q.row(i, h);
        for (std::size_t j = 0; j < n; ++j) p[i * n + j] = r[j];
    }
    return LinearChain(q.space_ptr(), std::move(p));
}

Dist apply_T(const NonlinearKernel& q, const Aggregator& h, const Dist& mu) {
    if (mu.size() != q.n_states())
        fail(Errc::dimension_mismatch, "distribution does not match the kernel's space");
    const double hv = h(mu);
    const std::size_t n = q.n_states();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (mu[i] == 0.0) continue;
        const Dist r = q.row(i, hv);
        for (std::size_t j = 0; j < n; ++j) out[j] += mu[i] * r[j];
    }
    return make_dist(q.space_ptr(), std::move(out));
}

Dist apply_M(const NonlinearKernel& q, double h, const Dist& theta) {
    if (theta.size() != q.n_states())
        fail(Errc::dimension_mismatch, "distribution does not match the kernel's space");
    const std::size_t n = q.n_states();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (theta[i] == 0.0) continue;
        const Dist r = q.row(i, h);
        for (std::size_t j = 0; j < n; ++j) out[j] += theta[i] * r[j];
    }
    return make_dist(q.space_ptr(), std::move(out));
}

Dist apply_M(const LinearChain& chain, const Dist& theta) {
    if (theta.size() != chain.n())
        fail(Errc::dimension_mismatch, "distribution does not match the chain's space");
    const std::size_t n = chain.n();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j] += theta[i] * chain.at(i, j);
    return make_dist(chain.space_ptr(), std::move(out));
}

namespace {

/// Strongly connected components by Tarjan's algorithm, iterative to keep
/// stack depth independent of the state count. Returns the component id per
/// state; ids are assigned in reverse topological order.
std::vector<std::size_t> scc_ids(const std::vector<std::vector<std::size_t>>& adj,
                                 std::size_t& n_components) {
    const std::size_t n = adj.size();
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, none), low(n, none), comp(n, none);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t next_index = 0;
    n_components = 0;

    struct Frame {
        std::size_t v;
        std::size_t edge;
    };
    std::vector<Frame> call;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != none) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            auto& [v, edge] = call.back();
            if (edge == 0) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            if (edge < adj[v].size()) {
                const std::size_t w = adj[v][edge++];
                if (index[w] == none) {
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
            } else {
                if (low[v] == index[v]) {
                    while (true) {
                        const std::size_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = n_components;
                        if (w == v) break;
                    }
                    ++n_components;
                }
                const std::size_t finished = v;
                call.pop_back();
                if (!call.empty())
                    low[call.back().v] = std::min(low[call.back().v], low[finished]);
            }
        }
    }
    return comp;
}

/// gcd of cycle lengths within one strongly connected component, via BFS
/// levels: every edge (u, v) inside the class contributes level(u)+1-level(v).
std::size_t class_period(const std::vector<std::vector<std::size_t>>& adj,
                         const std::vector<std::size_t>& members) {
    const std::size_t n = adj.size();
    std::vector<long long> level(n, -1);
    std::vector<bool> in_class(n, false);
    for (auto m : members) in_class[m] = true;
    std::vector<std::size_t> queue{members[0]};
    level[members[0]] = 0;
    std::size_t head = 0;
    long long g = 0;
    while (head < queue.size()) {
        const std::size_t u = queue[head++];
        for (auto v : adj[u]) {
            if (!in_class[v]) continue;
            if (level[v] < 0) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
            }
        }
    }
    return g == 0 ? 1 : static_cast<std::size_t>(g);
}

} // namespace

ChainStructure analyze_chain(const LinearChain& chain) {
    const std::size_t n = chain.n();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (chain.at(i, j) > kEdgeTol) adj[i].push_back(j);

    std::size_t n_components = 0;
    const auto comp = scc_ids(adj, n_components);

    std::vector<bool> has_exit(n_components, false);
    for (std::size_t i = 0; i < n; ++i)
        for (auto j : adj[i])
            if (comp[i] != comp[j]) has_exit[comp[i]] = true;

    ChainStructure out;
    std::size_t recurrent = static_cast<std::size_t>(-1);
    for (std::size_t c = 0; c < n_components; ++c) {
        if (!has_exit[c]) {
            ++out.recurrent_classes;
            recurrent = c;
        }
    }
    if (out.recurrent_classes == 1) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (comp[i] == recurrent) members.push_back(i);
        out.period = class_period(adj, members);
    }
    return out;
}

namespace {

double stationary_residual(const LinearChain& chain, const std::vector<double>& pi) {
    const std::size_t n = chain.n();
    double res = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = -pi[j];
        for (std::size_t i = 0; i < n; ++i) s += pi[i] * chain.at(i, j);
        res += std::abs(s);
    }
    return res;
}

/// Power iteration on the lazy chain (P + I)/2, which shares P's stationary
/// vector and converges even for periodic chains.
bool lazy_power_iteration(const LinearChain& chain, std::vector<double>& pi) {
    const std::size_t n = chain.n();
    pi.assign(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n);
    for (std::size_t it = 0; it < 200000; ++it) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.5 * pi[j];
            for (std::size_t i = 0; i < n; ++i) s += 0.5 * pi[i] * chain.at(i, j);
            next[j] = s;
        }
        double delta = 0.0, total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            delta += std::abs(next[j] - pi[j]);
            total += next[j];
        }
        for (std::size_t j = 0; j < n; ++j) pi[j] = next[j] / total;
        if (delta < 1e-15) break;
    }
    return stationary_residual(chain, pi) <= 1e-9;
}

} // namespace

Dist stationary(const LinearChain& chain) {
    const ChainStructure structure = analyze_chain(chain);
    if (structure.recurrent_classes != 1)
        fail(Errc::multiple_stationary,
             std::to_string(structure.recurrent_classes) + " recurrent classes");

    const std::size_t n = chain.n();
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd a(ni, ni);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                chain.at(i, j) - (i == j ? 1.0 : 0.0);
    a.row(ni - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(ni);
    b(ni - 1) = 1.0;

    Eigen::VectorXd x = a.fullPivLu().solve(b);
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = x(static_cast<Eigen::Index>(i));

    bool good = true;
    for (double v : pi)
        if (!std::isfinite(v) || v < -kSimplexTol) good = false;
    if (good) {
        double total = std::accumulate(pi.begin(), pi.end(), 0.0);
        good = std::abs(total - 1.0) <= 1e-6;
        if (good) {
            for (auto& v : pi) v = std::max(v, 0.0) / total;
            good = stationary_residual(chain, pi) <= 1e-9;
        }
    }
    if (!good && !lazy_power_iteration(chain, pi))
        fail(Errc::numerical_failure, "stationary solve did not converge");
    for (auto& v : pi) v = std::max(v, 0.0);
    return make_dist(chain.space_ptr(), std::move(pi));
}

Dist stationary_of_M(const NonlinearKernel& q, double h) { return stationary(freeze(q, h)); }

std::vector<double> default_h_grid(const Interval& domain, std::size_t points) {
    if (points == 0) fail(Errc::validation_error, "grid needs at least one point");
    if (domain.width() <= 0.0 || points == 1) return {domain.lo};
    std::vector<double> grid(points);
    for (std::size_t k = 0; k < points; ++k)
        grid[k] = domain.lo +
                  domain.width() * static_cast<double>(k) / static_cast<double>(points - 1);
    grid.back() = domain.hi;
    return grid;
}

namespace {

PropertyReport check_property(const NonlinearKernel& q, const std::vector<double>& h_grid,
                              PropertyReport::Which which) {
    PropertyReport report;
    report.property = which;
    report.h_grid = h_grid;
    for (double h : h_grid) {
        const ChainStructure s = analyze_chain(freeze(q, h));
        if (s.recurrent_classes != 1) {
            report.witnesses.push_back(
                {h, std::to_string(s.recurrent_classes) + " recurrent classes"});
        } else if (which == PropertyReport::Which::C && s.period != 1) {
            report.witnesses.push_back({h, "recurrent class has period " +
                                               std::to_string(s.period)});
        }
    }
    report.holds = report.witnesses.empty();
    return report;
}

} // namespace

PropertyReport check_property_U(const NonlinearKernel& q, const std::vector<double>& h_grid) {
    return check_property(q, h_grid, PropertyReport::Which::U);
}

PropertyReport check_property_C(const NonlinearKernel& q, const std::vector<double>& h_grid) {
    return check_property(q, h_grid, PropertyReport::Which::C);
}

} // namespace nlmc
