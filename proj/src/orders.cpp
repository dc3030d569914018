#include "nlmc/orders.hpp"

#include <algorithm>
#include <cmath>

#include "nlmc/rng.hpp"

namespace nlmc {
namespace {

/// Combine the two one-sided checks into a relation.
OrderRelation relate(bool p_ge, bool q_ge) noexcept {
    if (p_ge && q_ge) return OrderRelation::equal;
    if (p_ge) return OrderRelation::greater_eq;
    if (q_ge) return OrderRelation::less_eq;
    return OrderRelation::incomparable;
}

bool pointwise_ge(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] < b[i] - kOrderTol) return false;
    return true;
}

void require_same_1d(const Dist& p, const Dist& q, const char* what) {
    if (!p.space().one_dimensional())
        fail(Errc::product_space_unsupported, std::string(what) + " needs a 1-d space");
    if (!p.space().same_as(q.space()))
        fail(Errc::dimension_mismatch, std::string(what) + " needs a common space");
}

/// E[(X - t)+] for every t on the support grid.
std::vector<double> stoploss_profile(const Dist& p) {
    const auto& v = p.space().values();
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) {
        double e = 0.0;
        for (std::size_t j = k + 1; j < v.size(); ++j) e += p[j] * (v[j] - v[k]);
        out[k] = e;
    }
    return out;
}

} // namespace

const char* to_string(OrderRelation r) noexcept {
    switch (r) {
        case OrderRelation::greater_eq: return "greater_eq";
        case OrderRelation::less_eq: return "less_eq";
        case OrderRelation::equal: return "equal";
        case OrderRelation::incomparable: return "incomparable";
    }
    return "unknown";
}

std::vector<double> upper_tails(const std::vector<double>& probs) {
    std::vector<double> tails(probs.size(), 0.0);
    double acc = 0.0;
    for (std::size_t k = probs.size(); k-- > 0;) {
        acc += probs[k];
        tails[k] = acc;
    }
    return tails;
}

OrderRelation compare_fosd(const Dist& p, const Dist& q) {
    require_same_1d(p, q, "stochastic dominance");
    const auto tp = upper_tails(p.probs());
    const auto tq = upper_tails(q.probs());
    return relate(pointwise_ge(tp, tq), pointwise_ge(tq, tp));
}

OrderRelation compare_majorization(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        fail(Errc::length_mismatch, "majorization needs vectors of equal length");
    const auto tx = upper_tails(x);
    const auto ty = upper_tails(y);
    if (std::abs(tx[0] - ty[0]) > kOrderTol) return OrderRelation::incomparable;
    return relate(pointwise_ge(tx, ty), pointwise_ge(ty, tx));
}

OrderRelation compare_icx(const Dist& p, const Dist& q) {
    require_same_1d(p, q, "increasing-convex order");
    // t -> E[(X-t)+] is piecewise linear with kinks only on the support grid,
    // slope -1 for both inputs left of it and zero beyond it, so grid points
    // decide the order (the bottom point carries the mean difference).
    const auto sp = stoploss_profile(p);
    const auto sq = stoploss_profile(q);
    return relate(pointwise_ge(sp, sq), pointwise_ge(sq, sp));
}

OrderRelation compare_cx(const Dist& p, const Dist& q) {
    require_same_1d(p, q, "convex order");
    if (std::abs(p.mean() - q.mean()) > kOrderTol) return OrderRelation::incomparable;
    return compare_icx(p, q);
}

OrderRelation compare_cone(const OrderFamily& family, const Dist& p, const Dist& q) {
    if (family.tag() != OrderTag::linear_cone)
        fail(Errc::unsupported_family, "cone comparison needs a linear_cone family");
    if (!p.space().same_as(q.space()))
        fail(Errc::dimension_mismatch, "cone comparison needs a common space");
    const auto& space = p.space();
    bool p_ge = true, q_ge = true;
    for (const auto& y : family.generators()) {
        if (y.size() != space.dim())
            fail(Errc::length_mismatch, "cone generator does not match the space dimension");
        double diff = 0.0;
        for (std::size_t j = 0; j < space.size(); ++j) {
            const auto x = space.point(j);
            double fy = 0.0;
            for (std::size_t d = 0; d < y.size(); ++d) fy += y[d] * x[d];
            diff += (p[j] - q[j]) * fy;
        }
        if (diff < -kOrderTol) p_ge = false;
        if (diff > kOrderTol) q_ge = false;
    }
    return relate(p_ge, q_ge);
}

OrderRelation compare_in(const OrderFamily& family, const Dist& p, const Dist& q) {
    switch (family.tag()) {
        case OrderTag::sd: return compare_fosd(p, q);
        case OrderTag::cx: return compare_cx(p, q);
        case OrderTag::icx: return compare_icx(p, q);
        case OrderTag::linear_cone: return compare_cone(family, p, q);
    }
    fail(Errc::unsupported_family, "unknown order family");
}

namespace {

Dist from_tails(const SpacePtr& space, const std::vector<double>& tails) {
    std::vector<double> probs(tails.size());
    for (std::size_t k = 0; k < tails.size(); ++k) {
        const double next = (k + 1 < tails.size()) ? tails[k + 1] : 0.0;
        probs[k] = tails[k] - next;
    }
    return make_dist(space, std::move(probs));
}

} // namespace

Dist sd_sup(const Dist& p, const Dist& q) {
    require_same_1d(p, q, "lattice supremum");
    auto tp = upper_tails(p.probs());
    const auto tq = upper_tails(q.probs());
    for (std::size_t k = 0; k < tp.size(); ++k) tp[k] = std::max(tp[k], tq[k]);
    return from_tails(p.space_ptr(), tp);
}

Dist sd_inf(const Dist& p, const Dist& q) {
    require_same_1d(p, q, "lattice infimum");
    auto tp = upper_tails(p.probs());
    const auto tq = upper_tails(q.probs());
    for (std::size_t k = 0; k < tp.size(); ++k) tp[k] = std::min(tp[k], tq[k]);
    return from_tails(p.space_ptr(), tp);
}

std::pair<Dist, Dist> gen_comparable_pair(std::uint64_t seed, const SpacePtr& space) {
    if (!space->one_dimensional())
        fail(Errc::product_space_unsupported, "comparable pairs need a 1-d space");
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
    if (n > 1) {
        for (std::size_t t = 0; t < n; ++t) {
            const std::size_t i = static_cast<std::size_t>(rng.below(n - 1));
            const std::size_t j = i + 1 + static_cast<std::size_t>(rng.below(n - 1 - i));
            const double amount = 0.5 * rng.uniform() * p[i];
            p[i] -= amount;
            p[j] += amount;
        }
    }
    return {make_dist(space, std::move(p)), make_dist(space, std::move(q))};
}

std::pair<Dist, Dist> gen_comparable_pair(std::uint64_t seed, std::size_t n) {
    return gen_comparable_pair(seed, share(StateSpace::indices(n)));
}

} // namespace nlmc
