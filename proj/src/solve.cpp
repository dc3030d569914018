#include "nlmc/solve.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "nlmc/format.hpp"

namespace nlmc {

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::unique_certified: return "unique_certified";
        case Verdict::multiple_found: return "multiple_found";
        case Verdict::none_found: return "none_found";
        case Verdict::uncertified_unique: return "uncertified_unique";
    }
    return "unknown";
}

double self_consistency(const NonlinearKernel& q, const Aggregator& h_fn, double h) {
    return h_fn(stationary_of_M(q, h));
}

double verify_invariant(const NonlinearKernel& q, const Aggregator& h_fn, const Dist& mu) {
    return l1_distance(apply_T(q, h_fn, mu), mu);
}

namespace {

constexpr std::uint64_t kMonotoneSeed = 0x9d2c5680u;
constexpr std::size_t kMonotoneTrials = 200;

/// phi(h) - h, or nothing when the frozen chain has no unique stationary
/// distribution (the note explains why).
std::optional<double> gap_at(const NonlinearKernel& q, const Aggregator& h_fn, double h,
                             std::string* note) {
    try {
        return self_consistency(q, h_fn, h) - h;
    } catch (const Error& e) {
        if (e.code() != Errc::multiple_stationary && e.code() != Errc::numerical_failure) throw;
        if (note) *note = e.what();
        return std::nullopt;
    }
}

/// Bisection on a sign-changing bracket, followed by a secant polish.
/// Returns nothing if the map stops being evaluable inside the bracket.
std::optional<double> refine_bracket(const NonlinearKernel& q, const Aggregator& h_fn,
                                     double lo, double hi, double g_lo, double g_hi,
                                     double tol) {
    for (std::size_t it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto g_mid = gap_at(q, h_fn, mid, nullptr);
        if (!g_mid) return std::nullopt;
        if (std::abs(*g_mid) <= tol) return mid;
        if ((g_lo < 0.0) == (*g_mid < 0.0)) {
            lo = mid;
            g_lo = *g_mid;
        } else {
            hi = mid;
            g_hi = *g_mid;
        }
    }
    if (g_hi != g_lo) {
        const double secant = lo - g_lo * (hi - lo) / (g_hi - g_lo);
        if (secant >= lo && secant <= hi) return secant;
    }
    return 0.5 * (lo + hi);
}

/// Golden-section minimization of |phi(h) - h| for tangential roots.
std::optional<double> refine_minimum(const NonlinearKernel& q, const Aggregator& h_fn,
                                     double lo, double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    auto value = [&](double h) -> std::optional<double> {
        const auto g = gap_at(q, h_fn, h, nullptr);
        if (!g) return std::nullopt;
        return std::abs(*g);
    };
    auto fc = value(c), fd = value(d);
    if (!fc || !fd) return std::nullopt;
    for (std::size_t it = 0; it < 200 && b - a > tol; ++it) {
        if (*fc < *fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = value(c);
            if (!fc) return std::nullopt;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = value(d);
            if (!fd) return std::nullopt;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

EquilibriumReport find_equilibria(const NonlinearKernel& q, const Aggregator& h_fn,
                                  double grid_step, double tol) {
    if (tol <= 0.0) fail(Errc::validation_error, "tolerance must be positive");
    const Interval domain = q.h_domain();
    if (grid_step <= 0.0) grid_step = domain.width() / 1000.0;

    EquilibriumReport report;
    const auto cert_grid = default_h_grid(domain);
    report.certificates.push_back(certify_d_preserving(q, OrderFamily::sd(), cert_grid));
    report.certificates.push_back(certify_d_decreasing(q, OrderFamily::sd(), cert_grid));
    report.certificates.push_back(
        certify_h_monotone(h_fn, OrderFamily::sd(), kMonotoneTrials, kMonotoneSeed));

    // Sample phi over the admissible interval.
    std::vector<double> grid;
    if (domain.width() <= 0.0 || grid_step >= domain.width()) {
        grid = {domain.lo, domain.hi};
        if (domain.width() <= 0.0) grid = {domain.lo};
    } else {
        const auto count = static_cast<std::size_t>(std::ceil(domain.width() / grid_step));
        grid.reserve(count + 1);
        for (std::size_t k = 0; k <= count; ++k)
            grid.push_back(std::min(domain.lo + static_cast<double>(k) * grid_step, domain.hi));
        grid.back() = domain.hi;
    }

    report.phi_samples.reserve(grid.size());
    bool all_samples_ok = true;
    for (double h : grid) {
        PhiSample sample;
        sample.h = h;
        std::string note;
        const auto g = gap_at(q, h_fn, h, &note);
        if (g) {
            sample.phi = *g + h;
            sample.ok = true;
        } else {
            sample.note = note;
            all_samples_ok = false;
        }
        report.phi_samples.push_back(std::move(sample));
    }

    report.phi_nonincreasing = true;
    const PhiSample* prev = nullptr;
    for (const auto& s : report.phi_samples) {
        if (!s.ok) continue;
        if (prev && s.phi > prev->phi + 1e-9) report.phi_nonincreasing = false;
        prev = &s;
    }

    // Roots on the sample grid itself: |phi(h) - h| <= tol. Runs of adjacent
    // grid roots collapse to their best sample.
    std::vector<double> roots;
    auto gap_of = [](const PhiSample& s) { return s.phi - s.h; };
    for (std::size_t k = 0; k < report.phi_samples.size();) {
        const auto& s = report.phi_samples[k];
        if (!s.ok || std::abs(gap_of(s)) > tol) {
            ++k;
            continue;
        }
        std::size_t best = k;
        std::size_t end = k + 1;
        while (end < report.phi_samples.size() && report.phi_samples[end].ok &&
               std::abs(gap_of(report.phi_samples[end])) <= tol) {
            if (std::abs(gap_of(report.phi_samples[end])) < std::abs(gap_of(report.phi_samples[best])))
                best = end;
            ++end;
        }
        roots.push_back(report.phi_samples[best].h);
        k = end;
    }

    // Strict sign changes between adjacent valid samples.
    for (std::size_t k = 0; k + 1 < report.phi_samples.size(); ++k) {
        const auto& a = report.phi_samples[k];
        const auto& b = report.phi_samples[k + 1];
        if (!a.ok || !b.ok) continue;
        const double ga = gap_of(a), gb = gap_of(b);
        if (std::abs(ga) <= tol || std::abs(gb) <= tol) continue;
        if ((ga < 0.0) == (gb < 0.0)) continue;
        if (const auto root = refine_bracket(q, h_fn, a.h, b.h, ga, gb, tol))
            roots.push_back(*root);
    }

    // Tangential roots: local minima of |phi - h| below sqrt(tol) that no
    // detected root explains.
    const double near = std::max(grid_step, 10.0 * tol);
    for (std::size_t k = 0; k + 2 < report.phi_samples.size(); ++k) {
        const auto& a = report.phi_samples[k];
        const auto& b = report.phi_samples[k + 1];
        const auto& c = report.phi_samples[k + 2];
        if (!a.ok || !b.ok || !c.ok) continue;
        const double fa = std::abs(gap_of(a)), fb = std::abs(gap_of(b)),
                     fc = std::abs(gap_of(c));
        if (fb > std::sqrt(tol) || fb > fa || fb > fc || fb <= tol) continue;
        if (std::any_of(roots.begin(), roots.end(),
                        [&](double r) { return std::abs(r - b.h) <= near; }))
            continue;
        if (const auto h_min = refine_minimum(q, h_fn, a.h, c.h, tol)) {
            const auto g = gap_at(q, h_fn, *h_min, nullptr);
            if (g && std::abs(*g) <= tol) roots.push_back(*h_min);
        }
    }

    std::sort(roots.begin(), roots.end());
    std::vector<double> unique_roots;
    for (double r : roots) {
        if (unique_roots.empty() || r - unique_roots.back() > near) unique_roots.push_back(r);
    }

    for (double h : unique_roots) {
        Equilibrium eq{h, stationary_of_M(q, h), 0.0};
        eq.residual = verify_invariant(q, h_fn, eq.dist);
        report.equilibria.push_back(std::move(eq));
    }

    report.all_certified = all_samples_ok &&
                           std::all_of(report.certificates.begin(), report.certificates.end(),
                                       [](const Certificate& c) { return c.holds; });
    if (report.equilibria.empty())
        report.verdict = Verdict::none_found;
    else if (report.equilibria.size() > 1)
        report.verdict = Verdict::multiple_found;
    else
        report.verdict =
            report.all_certified ? Verdict::unique_certified : Verdict::uncertified_unique;
    return report;
}

} // namespace nlmc
