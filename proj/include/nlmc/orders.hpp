#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nlmc/core.hpp"

namespace nlmc {

/// Outcome of a stochastic-order comparison. Equal is reported when both
/// directions of the defining inequalities hold.
enum class OrderRelation { greater_eq, less_eq, equal, incomparable };

const char* to_string(OrderRelation r) noexcept;

inline bool dominates_or_equal(OrderRelation r) noexcept {
    return r == OrderRelation::greater_eq || r == OrderRelation::equal;
}

/// First-order stochastic dominance on a 1-d space: p >= q iff every
/// upper-tail sum of p is at least that of q (ties within kOrderTol).
OrderRelation compare_fosd(const Dist& p, const Dist& q);

/// Majorization order on raw vectors: upper partial sums dominate and the
/// totals agree within kOrderTol. Differing totals yield Incomparable.
OrderRelation compare_majorization(const std::vector<double>& x, const std::vector<double>& y);

/// Increasing-convex order on a 1-d support: p >= q iff
/// E_p[(X-t)+] >= E_q[(X-t)+] at every support point t. On a finite support
/// the kinks of t -> E[(X-t)+] all lie on the grid, so this is sufficient.
OrderRelation compare_icx(const Dist& p, const Dist& q);

/// Convex order: increasing-convex dominance with equal means. Differing
/// means yield Incomparable.
OrderRelation compare_cx(const Dist& p, const Dist& q);

/// Cone order induced by the linear functionals f_y(x) = y.x over the
/// family's generators y: p >= q iff E_p[f_y] >= E_q[f_y] for every
/// generator. Generators must match the space dimension.
OrderRelation compare_cone(const OrderFamily& family, const Dist& p, const Dist& q);

/// Dispatch on the family tag (sd, cx, icx, linear_cone).
OrderRelation compare_in(const OrderFamily& family, const Dist& p, const Dist& q);

/// Supremum of {p, q} in the SD lattice: the distribution whose upper-tail
/// sums are the pointwise maxima of the inputs'. FOSD-dominates both inputs.
Dist sd_sup(const Dist& p, const Dist& q);

/// Infimum: pointwise minima of upper-tail sums; dominated by both inputs.
Dist sd_inf(const Dist& p, const Dist& q);

/// Deterministic test utility: a pair (p, q) on the given space with
/// compare_fosd(p, q) in {GreaterEq, Equal}, built by sampling q and moving
/// random mass upward.
std::pair<Dist, Dist> gen_comparable_pair(std::uint64_t seed, const SpacePtr& space);

/// Same, on the index grid {0, ..., n-1}.
std::pair<Dist, Dist> gen_comparable_pair(std::uint64_t seed, std::size_t n);

/// Upper-tail sums tails[k] = sum_{j >= k} probs[j]; tails[0] is the total.
std::vector<double> upper_tails(const std::vector<double>& probs);

} // namespace nlmc
