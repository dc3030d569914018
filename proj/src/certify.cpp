#include "nlmc/certify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "nlmc/format.hpp"
#include "nlmc/rng.hpp"

namespace nlmc {
namespace {

void require_grid(const std::vector<double>& h_grid) {
    if (h_grid.empty()) fail(Errc::validation_error, "certification grid is empty");
    for (std::size_t k = 1; k < h_grid.size(); ++k)
        if (!(h_grid[k] > h_grid[k - 1]))
            fail(Errc::validation_error, "certification grid must be strictly increasing");
}

Interval grid_interval(const std::vector<double>& h_grid) {
    return {h_grid.front(), h_grid.back()};
}

/// Least-squares fit target ~ c0 + sum_d c_d x_d over all states; returns the
/// coefficients (c0 first) and writes the max absolute residual.
std::vector<double> fit_affine(const StateSpace& space, const std::vector<double>& target,
                               double& max_residual) {
    const auto n = static_cast<Eigen::Index>(space.size());
    const auto d = static_cast<Eigen::Index>(space.dim());
    Eigen::MatrixXd design(n, d + 1);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        const auto x = space.point(static_cast<std::size_t>(i));
        for (Eigen::Index k = 0; k < d; ++k) design(i, k + 1) = x[static_cast<std::size_t>(k)];
        rhs(i) = target[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd c = design.colPivHouseholderQr().solve(rhs);
    max_residual = (design * c - rhs).cwiseAbs().maxCoeff();
    std::vector<double> out(static_cast<std::size_t>(d) + 1);
    for (Eigen::Index k = 0; k <= d; ++k) out[static_cast<std::size_t>(k)] = c(k);
    return out;
}

/// Per-coordinate sign pattern of an axis-aligned generator cone:
/// +1 / -1 for a covered coordinate, 0 for both directions, and a list of
/// uncovered coordinates that must carry zero coefficient.
struct AxisCone {
    std::vector<int> sign;     // +1, -1, 0 (free)
    std::vector<bool> covered;
};

AxisCone axis_cone(const OrderFamily& family, std::size_t dim) {
    AxisCone cone{std::vector<int>(dim, 0), std::vector<bool>(dim, false)};
    for (const auto& g : family.generators()) {
        if (g.size() != dim)
            fail(Errc::length_mismatch, "cone generator does not match the space dimension");
        std::size_t nonzero = dim;
        for (std::size_t d = 0; d < dim; ++d) {
            if (g[d] == 0.0) continue;
            if (nonzero != dim)
                fail(Errc::unsupported_family,
                     "cone membership is only decided for axis-aligned generators");
            nonzero = d;
        }
        if (nonzero == dim)
            fail(Errc::unsupported_family, "cone generator is the zero vector");
        const int s = g[nonzero] > 0.0 ? 1 : -1;
        if (cone.covered[nonzero] && cone.sign[nonzero] != s) cone.sign[nonzero] = 0;
        if (!cone.covered[nonzero]) cone.sign[nonzero] = s;
        cone.covered[nonzero] = true;
    }
    return cone;
}

/// Whether coefficient c at coordinate d is admissible under the cone.
bool coeff_in_cone(const AxisCone& cone, std::size_t d, double c) {
    if (!cone.covered[d]) return std::abs(c) <= 1e-9;
    if (cone.sign[d] == 0) return true;
    return cone.sign[d] > 0 ? c >= -1e-9 : c <= 1e-9;
}

Certificate base_cert(CertName name, OrderFamily family) {
    return Certificate{name, std::move(family), false, {}, "", {0, 0}, false, 0};
}

/// E[f_y(X') | X = x] for the generator functional f_y over one kernel row.
double generator_mean(const StateSpace& space, const Dist& row, const std::vector<double>& y) {
    double m = 0.0;
    for (std::size_t j = 0; j < space.size(); ++j) {
        const auto x = space.point(j);
        double fy = 0.0;
        for (std::size_t d = 0; d < y.size(); ++d) fy += y[d] * x[d];
        m += row[j] * fy;
    }
    return m;
}

Certificate cone_preserving(const NonlinearKernel& q, const OrderFamily& family,
                            const std::vector<double>& h_grid) {
    Certificate cert = base_cert(CertName::d_preserving, family);
    cert.h_interval = grid_interval(h_grid);
    const StateSpace& space = q.space();
    const AxisCone cone = axis_cone(family, space.dim());
    for (double h : h_grid) {
        std::vector<Dist> rows;
        rows.reserve(q.n_states());
        for (std::size_t x = 0; x < q.n_states(); ++x) rows.push_back(q.row(x, h));
        for (std::size_t gi = 0; gi < family.generators().size(); ++gi) {
            const auto& y = family.generators()[gi];
            std::vector<double> target(q.n_states());
            for (std::size_t x = 0; x < q.n_states(); ++x)
                target[x] = generator_mean(space, rows[x], y);
            double residual = 0.0;
            const auto coeff = fit_affine(space, target, residual);
            if (residual > 1e-9)
                fail(Errc::unsupported_family,
                     "conditional generator mean is not affine in the state (residual " +
                         fmt17(residual) + " at h = " + fmt17(h) + ")");
            for (std::size_t d = 0; d < space.dim(); ++d) {
                if (!coeff_in_cone(cone, d, coeff[d + 1])) {
                    cert.counterexample = ConeCoeffWitness{h, gi, d, coeff[d + 1]};
                    return cert;
                }
            }
        }
    }
    cert.holds = true;
    cert.detail = "generator means stay affine with cone coefficients across " +
                  std::to_string(h_grid.size()) + " aggregator samples";
    return cert;
}

/// Mean-preserving spread pair (p, q) with p dominating q in the convex
/// order, built by pushing mass from interior atoms onto their neighbors.
std::pair<Dist, Dist> gen_spread_pair(std::uint64_t seed, const SpacePtr& space) {
    if (!space->one_dimensional())
        fail(Errc::product_space_unsupported, "spread pairs need a 1-d space");
    const std::size_t n = space->size();
    Rng rng(seed);
    std::vector<double> q(n);
    double total = 0.0;
    for (auto& v : q) {
        v = rng.uniform() + 1e-3;
        total += v;
    }
    for (auto& v : q) v /= total;
    auto p = q;
    const auto& vals = space->values();
    if (n >= 3) {
        for (std::size_t t = 0; t < n; ++t) {
            const std::size_t i = 1 + static_cast<std::size_t>(rng.below(n - 2));
            const double lam = (vals[i + 1] - vals[i]) / (vals[i + 1] - vals[i - 1]);
            const double eps = 0.9 * rng.uniform() * p[i];
            p[i] -= eps;
            p[i - 1] += eps * lam;
            p[i + 1] += eps * (1.0 - lam);
        }
    }
    return {make_dist(space, std::move(p)), make_dist(space, std::move(q))};
}

} // namespace

const char* to_string(CertName n) noexcept {
    switch (n) {
        case CertName::d_preserving: return "d_preserving";
        case CertName::d_decreasing: return "d_decreasing";
        case CertName::h_monotone: return "h_monotone";
        case CertName::affine_cone: return "affine_cone";
        case CertName::unique_stationary: return "unique_stationary";
    }
    return "unknown";
}

Certificate certify_d_preserving(const NonlinearKernel& q, const OrderFamily& family,
                                 const std::vector<double>& h_grid) {
    require_grid(h_grid);
    if (family.tag() == OrderTag::linear_cone) return cone_preserving(q, family, h_grid);

    Certificate cert = base_cert(CertName::d_preserving, family);
    cert.h_interval = grid_interval(h_grid);
    for (double h : h_grid) {
        for (std::size_t x = 0; x + 1 < q.n_states(); ++x) {
            const OrderRelation rel = compare_in(family, q.row(x + 1, h), q.row(x, h));
            if (!dominates_or_equal(rel)) {
                cert.counterexample = PreserveWitness{h, x, x + 1, rel};
                return cert;
            }
        }
    }
    cert.holds = true;
    cert.detail = "rows nondecreasing in the state across " + std::to_string(h_grid.size()) +
                  " aggregator samples";
    return cert;
}

Certificate certify_d_decreasing(const NonlinearKernel& q, const OrderFamily& family,
                                 const std::vector<double>& h_grid) {
    require_grid(h_grid);
    Certificate cert = base_cert(CertName::d_decreasing, family);
    cert.h_interval = grid_interval(h_grid);
    for (std::size_t x = 0; x < q.n_states(); ++x) {
        for (std::size_t k = 0; k + 1 < h_grid.size(); ++k) {
            const OrderRelation rel =
                compare_in(family, q.row(x, h_grid[k]), q.row(x, h_grid[k + 1]));
            if (!dominates_or_equal(rel)) {
                cert.counterexample = DecreaseWitness{x, h_grid[k], h_grid[k + 1], rel};
                return cert;
            }
        }
    }
    cert.holds = true;
    cert.detail = "rows nonincreasing in the aggregator across " +
                  std::to_string(h_grid.size()) + " samples";
    return cert;
}

namespace {

Certificate linear_h_monotone(const Aggregator& h, const OrderFamily& family) {
    Certificate cert = base_cert(CertName::h_monotone, family);
    const StateSpace& space = *h.space_ptr();
    const auto& w = h.weights();

    auto dirac = [&](std::size_t j) {
        std::vector<double> probs(space.size(), 0.0);
        probs[j] = 1.0;
        return probs;
    };

    switch (family.tag()) {
        case OrderTag::sd: {
            // Componentwise neighbors cover the product order by transitivity.
            std::vector<std::size_t> sizes(space.dim()), strides(space.dim());
            std::size_t stride = 1;
            for (std::size_t d = space.dim(); d-- > 0;) {
                sizes[d] = space.coords()[d].size();
                strides[d] = stride;
                stride *= sizes[d];
            }
            for (std::size_t j = 0; j < space.size(); ++j) {
                for (std::size_t d = 0; d < space.dim(); ++d) {
                    const std::size_t digit = (j / strides[d]) % sizes[d];
                    if (digit + 1 >= sizes[d]) continue;
                    const std::size_t j2 = j + strides[d];
                    if (w[j2] < w[j] - kOrderTol) {
                        cert.counterexample = MonotoneWitness{dirac(j), dirac(j2), w[j], w[j2]};
                        return cert;
                    }
                }
            }
            cert.holds = true;
            cert.detail = "weights nondecreasing in the state order";
            return cert;
        }
        case OrderTag::cx:
        case OrderTag::icx: {
            const auto& v = space.values();
            if (family.tag() == OrderTag::icx) {
                for (std::size_t i = 0; i + 1 < w.size(); ++i) {
                    if (w[i + 1] < w[i] - kOrderTol) {
                        cert.counterexample =
                            MonotoneWitness{dirac(i), dirac(i + 1), w[i], w[i + 1]};
                        return cert;
                    }
                }
            }
            for (std::size_t i = 0; i + 2 < w.size(); ++i) {
                const double s1 = (w[i + 1] - w[i]) / (v[i + 1] - v[i]);
                const double s2 = (w[i + 2] - w[i + 1]) / (v[i + 2] - v[i + 1]);
                if (s2 < s1 - kOrderTol) {
                    // The mean-preserving spread of the middle atom onto its
                    // neighbors lowers the aggregator exactly when the weight
                    // function is locally concave there.
                    const double lam = (v[i + 2] - v[i + 1]) / (v[i + 2] - v[i]);
                    std::vector<double> upper(space.size(), 0.0);
                    upper[i] = lam;
                    upper[i + 2] = 1.0 - lam;
                    const double h_upper = lam * w[i] + (1.0 - lam) * w[i + 2];
                    cert.counterexample =
                        MonotoneWitness{dirac(i + 1), upper, w[i + 1], h_upper};
                    return cert;
                }
            }
            cert.holds = true;
            cert.detail = family.tag() == OrderTag::icx
                              ? "weights nondecreasing and convex on the grid"
                              : "weights convex on the grid";
            return cert;
        }
        case OrderTag::linear_cone: {
            const AxisCone cone = axis_cone(family, space.dim());
            double residual = 0.0;
            const auto coeff = fit_affine(space, w, residual);
            if (residual > 1e-9)
                fail(Errc::unsupported_family,
                     "aggregator weights are not affine in the state (residual " +
                         fmt17(residual) + ")");
            for (std::size_t d = 0; d < space.dim(); ++d) {
                if (!coeff_in_cone(cone, d, coeff[d + 1])) {
                    // A unit step along coordinate d moves the aggregator by
                    // the offending coefficient.
                    cert.counterexample = ConeCoeffWitness{0.0, 0, d, coeff[d + 1]};
                    return cert;
                }
            }
            cert.holds = true;
            cert.detail = "weights affine in the state with cone coefficients";
            return cert;
        }
    }
    fail(Errc::unsupported_family, "unknown order family");
}

} // namespace

Certificate certify_h_monotone(const Aggregator& h, const OrderFamily& family,
                               std::size_t trials, std::uint64_t seed) {
    if (h.is_linear()) return linear_h_monotone(h, family);
    if (family.tag() == OrderTag::linear_cone)
        fail(Errc::unsupported_family,
             "cone monotonicity of a callback aggregator cannot be certified");

    Certificate cert = base_cert(CertName::h_monotone, family);
    cert.sampled = true;
    cert.trials = trials;
    Rng rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        const bool spread = family.tag() == OrderTag::cx ||
                            (family.tag() == OrderTag::icx && t % 2 == 1);
        const auto [p, q] = spread ? gen_spread_pair(rng.next_u64(), h.space_ptr())
                                   : gen_comparable_pair(rng.next_u64(), h.space_ptr());
        const double hp = h(p), hq = h(q);
        if (hp < hq - kOrderTol) {
            cert.counterexample = MonotoneWitness{q.probs(), p.probs(), hq, hp};
            return cert;
        }
    }
    cert.holds = true;
    cert.detail = "no counterexample in " + std::to_string(trials) + " sampled pairs";
    return cert;
}

Certificate certify_affine_cone(const AffineChainSpec& spec) {
    const std::size_t n = spec.a.size();
    if (n == 0) fail(Errc::validation_error, "affine chain has no coordinates");
    if (spec.beta.size() != n || spec.gamma.size() != n)
        fail(Errc::length_mismatch, "affine chain coefficient lengths differ");

    Certificate cert = base_cert(CertName::affine_cone, OrderFamily::alternating_cone(n));
    auto sign_of = [](std::size_t i) { return i % 2 == 0 ? 1.0 : -1.0; };

    for (std::size_t i = 0; i < n; ++i) {
        if (spec.a[i] < 0.0) {
            cert.counterexample = ConeWitness{'a', i + 1, spec.a[i], spec.a[i]};
            return cert;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double signed_beta = sign_of(i) * spec.beta[i];
        if (signed_beta < 0.0) {
            cert.counterexample = ConeWitness{'b', i + 1, spec.beta[i], signed_beta};
            return cert;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double signed_gamma = sign_of(i) * spec.gamma[i];
        if (signed_gamma < 0.0) {
            cert.counterexample = ConeWitness{'g', i + 1, spec.gamma[i], signed_gamma};
            return cert;
        }
    }
    cert.holds = true;
    cert.detail = "multipliers nonnegative; feedback and aggregator weights lie in the cone";
    return cert;
}

NonlinearKernel restrict_h(const NonlinearKernel& q, Interval interval) {
    return q.with_h_domain(interval);
}

std::string describe(const Witness& w) {
    struct Visitor {
        std::string operator()(const PreserveWitness& v) const {
            return "row at state " + std::to_string(v.x_hi) + " compares " +
                   to_string(v.observed) + " against the row at state " +
                   std::to_string(v.x_lo) + " at h = " + fmt17(v.h) +
                   " (want greater_eq)";
        }
        std::string operator()(const DecreaseWitness& v) const {
            return "row at state " + std::to_string(v.x) + " compares " +
                   to_string(v.observed) + " between h = " + fmt17(v.h_lo) + " and h = " +
                   fmt17(v.h_hi) + " (want the lower-h row to dominate)";
        }
        std::string operator()(const MonotoneWitness& v) const {
            return "aggregator falls from " + fmt17(v.h_lower) + " to " + fmt17(v.h_upper) +
                   " on a dominating pair (lower = [" + fmt17_join(v.lower) + "], upper = [" +
                   fmt17_join(v.upper) + "])";
        }
        std::string operator()(const ConeWitness& v) const {
            const char* what = v.part == 'a'   ? "state multiplier a"
                               : v.part == 'b' ? "feedback coefficient beta"
                                               : "aggregator weight gamma";
            return std::string(what) + "[" + std::to_string(v.index) + "] = " +
                   fmt17(v.coefficient) + " violates the cone sign rule (signed value " +
                   fmt17(v.product) + ")";
        }
        std::string operator()(const ConeCoeffWitness& v) const {
            return "generator " + std::to_string(v.generator) + " maps to slope " +
                   fmt17(v.fitted) + " at coordinate " + std::to_string(v.coord) +
                   ", outside the cone, at h = " + fmt17(v.h);
        }
        std::string operator()(const StationaryWitness& v) const {
            return "chain frozen at h = " + fmt17(v.h) + " has " +
                   std::to_string(v.recurrent_classes) + " recurrent classes";
        }
    };
    return std::visit(Visitor{}, w);
}

} // namespace nlmc
