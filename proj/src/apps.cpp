#include "nlmc/apps.hpp"

#include <algorithm>
#include <cmath>

#include "nlmc/format.hpp"
#include "nlmc/orders.hpp"
#include "nlmc/solve.hpp"

namespace nlmc {
namespace {

constexpr double kLumpBudget = 0.01;

/// Drop mass p at value v onto the grid: exact cell hits stay put, interior
/// values split proportionally between the bracketing cells, values beyond an
/// end lump into the end cell and count against the caller's budget.
void deposit(const std::vector<double>& grid, double v, double p, std::vector<double>& out,
             double& lumped) {
    if (v <= grid.front()) {
        out.front() += p;
        if (v < grid.front() - 1e-12) lumped += p;
        return;
    }
    if (v >= grid.back()) {
        out.back() += p;
        if (v > grid.back() + 1e-12) lumped += p;
        return;
    }
    const auto it = std::upper_bound(grid.begin(), grid.end(), v);
    const auto hi = static_cast<std::size_t>(it - grid.begin());
    const std::size_t lo = hi - 1;
    const double w = (v - grid[lo]) / (grid[hi] - grid[lo]);
    out[lo] += p * (1.0 - w);
    out[hi] += p * w;
}

[[noreturn]] void overflow(const char* builder, std::size_t x, double h, double lumped) {
    fail(Errc::grid_overflow_excess, std::string(builder) + " row at state " +
                                         std::to_string(x) + ", h = " + fmt17(h) +
                                         " lumps mass " + fmt17(lumped) +
                                         " at the grid boundary; extend the grid");
}

/// P(a > t) >= P(b > t) at every atom of either support: stochastic
/// dominance for laws living on different grids.
bool atoms_fosd_ge(const Dist& a, const Dist& b) {
    std::vector<double> cuts;
    cuts.insert(cuts.end(), a.space().values().begin(), a.space().values().end());
    cuts.insert(cuts.end(), b.space().values().begin(), b.space().values().end());
    std::sort(cuts.begin(), cuts.end());
    auto survival = [](const Dist& d, double t) {
        const auto& v = d.space().values();
        double s = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (v[i] > t + kOrderTol) s += d[i];
        return s;
    };
    for (double t : cuts)
        if (survival(a, t) < survival(b, t) - kOrderTol) return false;
    return true;
}

} // namespace

double QueueSpec::es() const { return service.mean(); }

double QueueSpec::es2() const {
    const auto& v = service.space().values();
    double m2 = 0.0;
    for (std::size_t i = 0; i < service.size(); ++i) m2 += service[i] * v[i] * v[i];
    return m2;
}

double mg1_equilibrium_rate(double es, double es2) {
    if (!(es > 0.0)) fail(Errc::bad_moments, "mean service time must be positive");
    if (es2 < es * es - 1e-12)
        fail(Errc::bad_moments, "second moment " + fmt17(es2) + " below the squared mean " +
                                    fmt17(es * es));
    if (!(es2 > 0.0)) fail(Errc::bad_moments, "second moment must be positive");
    const double lambda = (std::sqrt(es * es + 2.0 * es2) - es) / es2;
    if (!(lambda * es < 1.0))
        fail(Errc::unstable_queue, "utilization " + fmt17(lambda * es) + " is not below one");
    return lambda;
}

double pk_wait(double lambda, double es, double es2) {
    if (lambda < 0.0 || es < 0.0 || es2 < 0.0)
        fail(Errc::bad_moments, "rates and moments must be nonnegative");
    if (!(lambda * es < 1.0))
        fail(Errc::unstable_queue, "utilization " + fmt17(lambda * es) + " is not below one");
    return lambda * es2 / (2.0 * (1.0 - lambda * es));
}

KernelWithAggregator build_lindley_kernel(const QueueSpec& spec) {
    if (!spec.wait_grid) fail(Errc::validation_error, "queue needs a wait grid");
    if (!spec.wait_grid->one_dimensional())
        fail(Errc::product_space_unsupported, "wait grid must be one-dimensional");
    if (std::abs(spec.wait_grid->values().front()) > 1e-12)
        fail(Errc::validation_error, "wait grid must start at zero");
    if (!spec.service.space().one_dimensional())
        fail(Errc::product_space_unsupported, "service law must be one-dimensional");
    if (!spec.arrival_family) fail(Errc::validation_error, "queue needs an arrival family");

    SpacePtr grid = spec.wait_grid;
    Aggregator h = Aggregator::linear(grid, grid->values());
    const auto [m_lo, m_hi] = h.range();

    // Spot-check that longer expected waits stretch the inter-arrival law.
    const auto probe = default_h_grid({m_lo, m_hi}, 5);
    for (std::size_t k = 0; k + 1 < probe.size(); ++k) {
        if (probe[k + 1] <= probe[k]) continue;
        if (!atoms_fosd_ge(spec.arrival_family(probe[k + 1]), spec.arrival_family(probe[k])))
            fail(Errc::validation_error,
                 "arrival family is not stochastically increasing between m = " +
                     fmt17(probe[k]) + " and m = " + fmt17(probe[k + 1]));
    }

    QueueSpec captured = spec;
    auto row_fn = [captured, grid](std::size_t x, double m) {
        const auto& waits = grid->values();
        const Dist arrival = captured.arrival_family(m);
        const auto& sv = captured.service.space().values();
        const auto& tv = arrival.space().values();
        std::vector<double> out(waits.size(), 0.0);
        double lumped = 0.0;
        for (std::size_t j = 0; j < captured.service.size(); ++j)
            for (std::size_t k = 0; k < arrival.size(); ++k)
                deposit(waits, std::max(0.0, waits[x] + sv[j] - tv[k]),
                        captured.service[j] * arrival[k], out, lumped);
        if (lumped > kLumpBudget) overflow("queue", x, m, lumped);
        return make_dist(grid, std::move(out));
    };
    return {NonlinearKernel(grid, std::move(row_fn), {m_lo, m_hi}), std::move(h)};
}

namespace {

LinearChain cor1_chain(const Cor1System& sys, double a) {
    const auto rows = sys.p_family(a);
    if (rows.size() != sys.n)
        fail(Errc::length_mismatch, "matrix family returned " + std::to_string(rows.size()) +
                                        " rows for " + std::to_string(sys.n) + " states");
    std::vector<double> flat;
    flat.reserve(sys.n * sys.n);
    for (const auto& r : rows) {
        if (r.size() != sys.n)
            fail(Errc::length_mismatch, "matrix family returned a row of wrong length");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return LinearChain(share(StateSpace::indices(sys.n)), std::move(flat));
}

[[noreturn]] void condition_failed(const char* which, const Witness& w) {
    fail(Errc::condition_failed, std::string(which) + ": " + describe(w));
}

/// The three uniqueness conditions over a sorted list of parameter samples.
std::array<Certificate, 3> check_cor1_conditions(const Cor1System& sys,
                                                 const std::vector<double>& samples) {
    std::array<Certificate, 3> certs{
        Certificate{CertName::d_preserving, OrderFamily::sd(), true, {}, "", {}, false, 0},
        Certificate{CertName::d_decreasing, OrderFamily::sd(), true, {}, "", {}, false, 0},
        Certificate{CertName::unique_stationary, OrderFamily::sd(), true, {}, "", {}, false, 0}};
    const Interval covered{samples.front(), samples.back()};
    for (auto& c : certs) c.h_interval = covered;

    std::vector<std::vector<std::vector<double>>> rows;
    rows.reserve(samples.size());
    for (double a : samples) {
        const LinearChain chain = cor1_chain(sys, a);
        std::vector<std::vector<double>> r(sys.n);
        for (std::size_t i = 0; i < sys.n; ++i) r[i] = chain.row(i);
        rows.push_back(std::move(r));

        const ChainStructure s = analyze_chain(chain);
        if (s.recurrent_classes != 1) {
            Witness w = StationaryWitness{a, s.recurrent_classes};
            certs[2].holds = false;
            certs[2].counterexample = w;
            certs[2].detail = describe(w);
            condition_failed("(iii)", w);
        }
    }
    for (std::size_t k = 0; k < samples.size(); ++k) {
        for (std::size_t i = 0; i + 1 < sys.n; ++i) {
            const OrderRelation rel = compare_majorization(rows[k][i + 1], rows[k][i]);
            if (!dominates_or_equal(rel)) {
                Witness w = PreserveWitness{samples[k], i, i + 1, rel};
                certs[0].holds = false;
                certs[0].counterexample = w;
                certs[0].detail = describe(w);
                condition_failed("(i)", w);
            }
        }
    }
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        if (samples[k + 1] <= samples[k]) continue;
        for (std::size_t i = 0; i < sys.n; ++i) {
            const OrderRelation rel = compare_majorization(rows[k][i], rows[k + 1][i]);
            if (!dominates_or_equal(rel)) {
                Witness w = DecreaseWitness{i, samples[k], samples[k + 1], rel};
                certs[1].holds = false;
                certs[1].counterexample = w;
                certs[1].detail = describe(w);
                condition_failed("(ii)", w);
            }
        }
    }
    const std::string scope = " across " + std::to_string(samples.size()) + " parameter samples";
    certs[0].detail = "rows rise with the row index in the upper-tail order" + scope;
    certs[1].detail = "rows fall in the parameter in the upper-tail order" + scope;
    certs[2].detail = "one recurrent class at every sample" + scope;
    return certs;
}

} // namespace

Cor1Solution solve_cor1(const Cor1System& sys, double grid_step, double tol) {
    if (sys.n == 0) fail(Errc::validation_error, "system needs at least one state");
    if (!sys.p_family) fail(Errc::validation_error, "system needs a matrix family");
    if (!sys.g) fail(Errc::validation_error, "system needs an aggregation map");
    if (!(sys.a_domain.lo <= sys.a_domain.hi))
        fail(Errc::empty_interval, "parameter domain");
    if (tol <= 0.0) fail(Errc::validation_error, "tolerance must be positive");

    auto psi = [&](double a) {
        const LinearChain chain = cor1_chain(sys, a);
        const ChainStructure s = analyze_chain(chain);
        if (s.recurrent_classes != 1)
            condition_failed("(iii)", StationaryWitness{a, s.recurrent_classes});
        return sys.g(stationary(chain).probs()) - a;
    };

    std::vector<double> visited;
    const double width = sys.a_domain.width();
    if (grid_step <= 0.0) grid_step = width / 1000.0;

    std::vector<double> scan;
    if (width <= 0.0 || grid_step >= width) {
        scan = {sys.a_domain.lo, sys.a_domain.hi};
        if (width <= 0.0) scan = {sys.a_domain.lo};
    } else {
        const auto count = static_cast<std::size_t>(std::ceil(width / grid_step));
        for (std::size_t k = 0; k <= count; ++k)
            scan.push_back(
                std::min(sys.a_domain.lo + static_cast<double>(k) * grid_step, sys.a_domain.hi));
        scan.back() = sys.a_domain.hi;
    }

    std::vector<double> gaps(scan.size());
    for (std::size_t k = 0; k < scan.size(); ++k) gaps[k] = psi(scan[k]);

    std::vector<double> roots;
    for (std::size_t k = 0; k < scan.size();) {
        if (std::abs(gaps[k]) > tol) {
            ++k;
            continue;
        }
        std::size_t best = k, end = k + 1;
        while (end < scan.size() && std::abs(gaps[end]) <= tol) {
            if (std::abs(gaps[end]) < std::abs(gaps[best])) best = end;
            ++end;
        }
        roots.push_back(scan[best]);
        k = end;
    }
    for (std::size_t k = 0; k + 1 < scan.size(); ++k) {
        if (std::abs(gaps[k]) <= tol || std::abs(gaps[k + 1]) <= tol) continue;
        if ((gaps[k] < 0.0) == (gaps[k + 1] < 0.0)) continue;
        double lo = scan[k], hi = scan[k + 1], g_lo = gaps[k];
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            const double g_mid = psi(mid);
            visited.push_back(mid);
            if (std::abs(g_mid) <= tol) {
                lo = hi = mid;
                break;
            }
            if ((g_lo < 0.0) == (g_mid < 0.0)) {
                lo = mid;
                g_lo = g_mid;
            } else {
                hi = mid;
            }
        }
        roots.push_back(0.5 * (lo + hi));
    }

    std::sort(roots.begin(), roots.end());
    const double near = std::max(grid_step, 10.0 * tol);
    std::vector<double> unique_roots;
    for (double r : roots)
        if (unique_roots.empty() || r - unique_roots.back() > near) unique_roots.push_back(r);

    // Conditions hold on the fixed grid plus every parameter the refinement
    // actually touched.
    std::vector<double> samples = default_h_grid(sys.a_domain, 101);
    samples.insert(samples.end(), visited.begin(), visited.end());
    samples.insert(samples.end(), unique_roots.begin(), unique_roots.end());
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
    auto conditions = check_cor1_conditions(sys, samples);

    if (unique_roots.empty())
        fail(Errc::no_root, "no solution of a = G(stationary(P(a))) in [" +
                                fmt17(sys.a_domain.lo) + ", " + fmt17(sys.a_domain.hi) + "]");
    if (unique_roots.size() > 1)
        fail(Errc::numerical_failure,
             "found " + std::to_string(unique_roots.size()) +
                 " solutions although the uniqueness conditions are certified");

    Cor1Solution sol{stationary(cor1_chain(sys, unique_roots[0])).probs(), unique_roots[0],
                     std::move(conditions), 0.0};
    sol.residual = std::abs(sys.g(sol.x) - sol.a);
    return sol;
}

KernelWithAggregator build_ar_kernel(double a, Drift drift, const Dist& noise,
                                     std::vector<double> m, SpacePtr grid) {
    if (!grid) fail(Errc::validation_error, "autoregression needs a grid");
    if (!grid->one_dimensional())
        fail(Errc::product_space_unsupported, "autoregression grid must be one-dimensional");
    if (!(a > 0.0 && a < 1.0))
        fail(Errc::validation_error, "state multiplier must lie in (0, 1), got " + fmt17(a));
    if (!noise.space().one_dimensional())
        fail(Errc::product_space_unsupported, "noise law must be one-dimensional");
    if (m.size() != grid->size())
        fail(Errc::length_mismatch, "aggregator weights do not match the grid");

    Aggregator h = Aggregator::linear(grid, std::move(m));
    const auto [h_lo, h_hi] = h.range();

    auto row_fn = [a, drift, noise, grid](std::size_t x, double h_val) {
        const auto& values = grid->values();
        const double term = drift.kind == DriftKind::linear
                                ? -h_val
                                : h_val - drift.c * h_val * h_val;
        const auto& ev = noise.space().values();
        std::vector<double> out(values.size(), 0.0);
        double lumped = 0.0;
        for (std::size_t j = 0; j < noise.size(); ++j)
            deposit(values, a * values[x] + term + ev[j], noise[j], out, lumped);
        if (lumped > kLumpBudget) overflow("autoregression", x, h_val, lumped);
        return make_dist(grid, std::move(out));
    };
    return {NonlinearKernel(grid, std::move(row_fn), {h_lo, h_hi}), std::move(h)};
}

KernelWithAggregator build_wealth_kernel(const WealthSpec& spec) {
    if (!spec.grid) fail(Errc::validation_error, "wealth model needs a grid");
    if (!spec.grid->one_dimensional())
        fail(Errc::product_space_unsupported, "wealth grid must be one-dimensional");
    if (spec.policies.empty()) fail(Errc::validation_error, "wealth model needs a policy");
    if (spec.returns.size() != spec.policies.size())
        fail(Errc::length_mismatch, "one return law per asset is required");
    if (!spec.income.space().one_dimensional())
        fail(Errc::product_space_unsupported, "income law must be one-dimensional");
    if (!spec.savings) fail(Errc::validation_error, "wealth model needs a savings map");
    for (const auto& p : spec.policies)
        if (!p) fail(Errc::validation_error, "empty policy");
    for (const auto& r : spec.returns)
        if (!r) fail(Errc::validation_error, "empty return law");

    SpacePtr grid = spec.grid;
    std::vector<double> weights(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) weights[i] = spec.savings(grid->values()[i]);
    Aggregator h = Aggregator::linear(grid, std::move(weights));
    const auto [h_lo, h_hi] = h.range();

    // Spot-check that higher aggregate savings depress every return law.
    const auto probe = default_h_grid({h_lo, h_hi}, 5);
    for (std::size_t i = 0; i < spec.returns.size(); ++i)
        for (std::size_t k = 0; k + 1 < probe.size(); ++k) {
            if (probe[k + 1] <= probe[k]) continue;
            if (!atoms_fosd_ge(spec.returns[i](probe[k]), spec.returns[i](probe[k + 1])))
                fail(Errc::validation_error,
                     "return law " + std::to_string(i) +
                         " is not stochastically decreasing between h = " + fmt17(probe[k]) +
                         " and h = " + fmt17(probe[k + 1]));
        }

    WealthSpec captured = spec;
    auto row_fn = [captured, grid](std::size_t x, double h_val) {
        const double wealth = grid->values()[x];
        const std::size_t assets = captured.policies.size();
        std::vector<Dist> laws;
        laws.reserve(assets);
        for (const auto& r : captured.returns) {
            Dist law = r(h_val);
            if (!law.space().one_dimensional())
                fail(Errc::product_space_unsupported, "return law must be one-dimensional");
            laws.push_back(std::move(law));
        }

        std::vector<double> out(grid->size(), 0.0);
        double lumped = 0.0;
        std::vector<std::size_t> odo(assets, 0);
        std::vector<double> realized(assets);
        bool more = true;
        while (more) {
            double pr = 1.0;
            for (std::size_t i = 0; i < assets; ++i) {
                realized[i] = laws[i].space().values()[odo[i]];
                pr *= laws[i][odo[i]];
            }
            double invested = 0.0, total_alloc = 0.0;
            for (std::size_t i = 0; i < assets; ++i) {
                const double alloc = captured.policies[i](realized, wealth);
                if (alloc < -1e-12)
                    fail(Errc::infeasible_policy, "negative allocation " + fmt17(alloc) +
                                                      " at wealth " + fmt17(wealth));
                total_alloc += alloc;
                invested += alloc * realized[i];
            }
            if (total_alloc > wealth + 1e-9)
                fail(Errc::infeasible_policy, "allocation " + fmt17(total_alloc) +
                                                  " exceeds wealth " + fmt17(wealth));
            if (pr > 0.0) {
                const auto& yv = captured.income.space().values();
                for (std::size_t k = 0; k < captured.income.size(); ++k)
                    deposit(grid->values(), invested + yv[k], pr * captured.income[k], out,
                            lumped);
            }
            more = false;
            for (std::size_t d = assets; d-- > 0;) {
                if (++odo[d] < laws[d].size()) {
                    more = true;
                    break;
                }
                odo[d] = 0;
            }
        }
        if (lumped > kLumpBudget) overflow("wealth", x, h_val, lumped);
        return make_dist(grid, std::move(out));
    };
    return {NonlinearKernel(grid, std::move(row_fn), {h_lo, h_hi}), std::move(h)};
}

} // namespace nlmc
