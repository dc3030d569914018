#include "nlmc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "nlmc/dynamics.hpp"
#include "nlmc/format.hpp"

namespace nlmc {
namespace {

using nlohmann::json;

constexpr std::size_t kMonotoneTrials = 200;
constexpr std::uint64_t kMonotoneSeed = 0x9d2c5680ull;
constexpr double kInvariantTol = 1e-8;

[[noreturn]] void bad(const std::string& message) { fail(Errc::validation_error, message); }

const json& need(const json& j, const char* field) {
    if (!j.contains(field)) bad(std::string("missing required field '") + field + "'");
    return j.at(field);
}

double as_num(const json& v, const std::string& what) {
    if (!v.is_number()) bad(what + " must be a number");
    return v.get<double>();
}

std::vector<double> as_num_vec(const json& v, const std::string& what) {
    if (!v.is_array()) bad(what + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(as_num(e, what + " entry"));
    return out;
}

Interval as_interval(const json& v, const std::string& what) {
    const auto pair = as_num_vec(v, what);
    if (pair.size() != 2) bad(what + " must be a [lo, hi] pair");
    if (!(pair[0] <= pair[1])) bad(what + " must satisfy lo <= hi");
    return {pair[0], pair[1]};
}

SpacePtr line_space(std::vector<double> values) {
    return share(StateSpace::line(std::move(values)));
}

Dist as_dist(const json& v, const std::string& what) {
    if (!v.is_object()) bad(what + " must be an object with 'values' and 'probs'");
    auto values = as_num_vec(need(v, "values"), what + ".values");
    auto probs = as_num_vec(need(v, "probs"), what + ".probs");
    if (values.size() != probs.size()) bad(what + ": values and probs differ in length");
    return make_dist(line_space(std::move(values)), std::move(probs));
}

std::vector<double> require_knots(const json& v, const std::string& what) {
    auto knots = as_num_vec(v, what);
    if (knots.empty()) bad(what + " must not be empty");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (!(knots[i] < knots[i + 1])) bad(what + " must be strictly increasing");
    return knots;
}

/// rows[k] is the n x n matrix at knot k; every row is validated onto the
/// simplex here so interpolation can only produce valid rows later.
std::vector<std::vector<std::vector<double>>> require_row_tables(const json& v, std::size_t knots,
                                                                 std::size_t n,
                                                                 const std::string& what) {
    if (!v.is_array() || v.size() != knots)
        bad(what + " must hold one matrix per knot (" + std::to_string(knots) + ")");
    std::vector<std::vector<std::vector<double>>> tables(knots);
    SpacePtr probe = share(StateSpace::indices(n));
    for (std::size_t k = 0; k < knots; ++k) {
        const json& mat = v.at(k);
        if (!mat.is_array() || mat.size() != n)
            bad(what + "[" + std::to_string(k) + "] must hold " + std::to_string(n) + " rows");
        tables[k].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto row = as_num_vec(mat.at(i), what + " row");
            if (row.size() != n)
                bad(what + "[" + std::to_string(k) + "][" + std::to_string(i) + "] must have " +
                    std::to_string(n) + " entries");
            make_dist(probe, row);
            tables[k][i] = std::move(row);
        }
    }
    return tables;
}

std::vector<double> interpolate_row(const std::vector<double>& knots,
                                    const std::vector<std::vector<std::vector<double>>>& tables,
                                    std::size_t x, double h) {
    if (knots.size() == 1 || h <= knots.front()) return tables.front()[x];
    if (h >= knots.back()) return tables.back()[x];
    const auto it = std::upper_bound(knots.begin(), knots.end(), h);
    const std::size_t k = static_cast<std::size_t>(it - knots.begin()) - 1;
    const double t = (h - knots[k]) / (knots[k + 1] - knots[k]);
    const auto& lo = tables[k][x];
    const auto& hi = tables[k + 1][x];
    std::vector<double> row(lo.size());
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = (1.0 - t) * lo[j] + t * hi[j];
    return row;
}

void parse_table_block(const json& root, Scenario& s) {
    const json& tb = need(root, "table");
    if (!tb.is_object()) bad("'table' must be an object");
    for (const auto& item : tb.items())
        if (item.key() != "states" && item.key() != "h_knots" && item.key() != "rows")
            bad("unknown table field '" + item.key() + "'");
    auto states = as_num_vec(need(tb, "states"), "table.states");
    SpacePtr space = line_space(std::move(states));
    auto knots = require_knots(need(tb, "h_knots"), "table.h_knots");
    auto tables = require_row_tables(need(tb, "rows"), knots.size(), space->size(), "table.rows");

    const json& agg = need(root, "aggregator");
    if (!agg.is_object()) bad("'aggregator' must be an object");
    auto weights = as_num_vec(need(agg, "weights"), "aggregator.weights");
    if (weights.size() != space->size()) bad("aggregator.weights must match the state count");

    const Interval domain = as_interval(need(root, "h_domain"), "h_domain");

    auto row_fn = [space, knots, tables](std::size_t x, double h) {
        return make_dist(space, interpolate_row(knots, tables, x, h));
    };
    s.model = KernelWithAggregator{NonlinearKernel(space, std::move(row_fn), domain),
                                   Aggregator::linear(space, std::move(weights))};
}

void parse_queue_block(const json& root, Scenario& s) {
    const json& qb = need(root, "queue");
    if (!qb.is_object()) bad("'queue' must be an object");
    for (const auto& item : qb.items())
        if (item.key() != "service" && item.key() != "arrival" && item.key() != "grid")
            bad("unknown queue field '" + item.key() + "'");

    Dist service = as_dist(need(qb, "service"), "queue.service");

    const json& ar = need(qb, "arrival");
    if (!ar.is_object()) bad("queue.arrival must be an object");
    auto values = as_num_vec(need(ar, "values"), "queue.arrival.values");
    const bool shift = ar.contains("shift") ? ar.at("shift").get<bool>() : true;
    std::function<Dist(double)> family;
    if (ar.contains("m_knots")) {
        auto knots = require_knots(ar.at("m_knots"), "queue.arrival.m_knots");
        const json& pk = need(ar, "probs_at_knots");
        if (!pk.is_array() || pk.size() != knots.size())
            bad("queue.arrival.probs_at_knots must hold one probability row per knot");
        std::vector<std::vector<double>> prob_rows(knots.size());
        SpacePtr probe = line_space(values);
        for (std::size_t k = 0; k < knots.size(); ++k) {
            prob_rows[k] = as_num_vec(pk.at(k), "queue.arrival.probs_at_knots row");
            if (prob_rows[k].size() != values.size())
                bad("queue.arrival.probs_at_knots rows must match values in length");
            make_dist(probe, prob_rows[k]);
        }
        family = [values, knots, prob_rows, shift](double m) {
            std::vector<double> probs;
            if (knots.size() == 1 || m <= knots.front()) {
                probs = prob_rows.front();
            } else if (m >= knots.back()) {
                probs = prob_rows.back();
            } else {
                const auto it = std::upper_bound(knots.begin(), knots.end(), m);
                const std::size_t k = static_cast<std::size_t>(it - knots.begin()) - 1;
                const double t = (m - knots[k]) / (knots[k + 1] - knots[k]);
                probs.resize(values.size());
                for (std::size_t j = 0; j < probs.size(); ++j)
                    probs[j] = (1.0 - t) * prob_rows[k][j] + t * prob_rows[k + 1][j];
            }
            std::vector<double> atoms = values;
            if (shift)
                for (auto& v : atoms) v += m;
            return make_dist(line_space(std::move(atoms)), std::move(probs));
        };
    } else {
        auto probs = as_num_vec(need(ar, "probs"), "queue.arrival.probs");
        make_dist(line_space(values), probs);
        family = [values, probs, shift](double m) {
            std::vector<double> atoms = values;
            if (shift)
                for (auto& v : atoms) v += m;
            return make_dist(line_space(std::move(atoms)), probs);
        };
    }

    const json& gr = need(qb, "grid");
    SpacePtr grid;
    if (gr.is_array()) {
        grid = line_space(as_num_vec(gr, "queue.grid"));
    } else if (gr.is_object()) {
        const double lo = as_num(need(gr, "lo"), "queue.grid.lo");
        const double hi = as_num(need(gr, "hi"), "queue.grid.hi");
        const double count = as_num(need(gr, "count"), "queue.grid.count");
        if (count < 2 || count != std::floor(count)) bad("queue.grid.count must be an integer >= 2");
        grid = share(StateSpace::linspace(lo, hi, static_cast<std::size_t>(count)));
    } else {
        bad("queue.grid must be an array of wait values or a {lo, hi, count} object");
    }

    s.queue = QueueSpec{std::move(service), std::move(family), std::move(grid)};
    s.model = build_lindley_kernel(*s.queue);
}

void parse_nleq_block(const json& root, Scenario& s) {
    const json& nb = need(root, "nleq");
    if (!nb.is_object()) bad("'nleq' must be an object");
    for (const auto& item : nb.items())
        if (item.key() != "a_knots" && item.key() != "rows" && item.key() != "g_weights" &&
            item.key() != "a_domain")
            bad("unknown nleq field '" + item.key() + "'");

    auto knots = require_knots(need(nb, "a_knots"), "nleq.a_knots");
    auto g_weights = as_num_vec(need(nb, "g_weights"), "nleq.g_weights");
    const std::size_t n = g_weights.size();
    if (n == 0) bad("nleq.g_weights must not be empty");
    auto tables = require_row_tables(need(nb, "rows"), knots.size(), n, "nleq.rows");
    const Interval domain = as_interval(need(nb, "a_domain"), "nleq.a_domain");

    auto p_family = [knots, tables, n](double a) {
        std::vector<std::vector<double>> rows(n);
        for (std::size_t x = 0; x < n; ++x) rows[x] = interpolate_row(knots, tables, x, a);
        return rows;
    };
    auto g = [g_weights](const std::vector<double>& x) {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size() && i < g_weights.size(); ++i)
            acc += g_weights[i] * x[i];
        return acc;
    };
    s.nleq = Cor1System{n, p_family, g, domain};

    SpacePtr space = share(StateSpace::indices(n));
    auto row_fn = [space, p_family](std::size_t x, double a) {
        return make_dist(space, p_family(a)[x]);
    };
    s.model = KernelWithAggregator{NonlinearKernel(space, std::move(row_fn), domain),
                                   Aggregator::linear(space, std::move(g_weights))};
}

void parse_affine_block(const json& root, Scenario& s) {
    const json& ab = need(root, "affine");
    if (!ab.is_object()) bad("'affine' must be an object");
    for (const auto& item : ab.items())
        if (item.key() != "a" && item.key() != "beta" && item.key() != "gamma")
            bad("unknown affine field '" + item.key() + "'");
    AffineChainSpec spec{as_num_vec(need(ab, "a"), "affine.a"),
                         as_num_vec(need(ab, "beta"), "affine.beta"),
                         as_num_vec(need(ab, "gamma"), "affine.gamma")};
    if (spec.a.empty() || spec.a.size() != spec.beta.size() || spec.a.size() != spec.gamma.size())
        bad("affine.a, affine.beta and affine.gamma must have the same nonzero length");
    s.affine = std::move(spec);
}

OrderFamily parse_family(const json& v) {
    if (v.is_string()) {
        const std::string tag = v.get<std::string>();
        if (tag == "sd") return OrderFamily::sd();
        if (tag == "cx") return OrderFamily::cx();
        if (tag == "icx") return OrderFamily::icx();
        bad("unknown order family '" + tag + "'; expected sd, cx, icx, or {\"alternating_cone\": n}");
    }
    if (v.is_object() && v.contains("alternating_cone")) {
        const double n = as_num(v.at("alternating_cone"), "family.alternating_cone");
        if (n < 1 || n != std::floor(n)) bad("family.alternating_cone must be a positive integer");
        return OrderFamily::alternating_cone(static_cast<std::size_t>(n));
    }
    bad("'family' must be sd, cx, icx, or {\"alternating_cone\": n}");
}

void check_scenario_name(const std::string& name) {
    if (name.empty()) bad("scenario name must not be empty");
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
        if (!ok) bad("scenario name may only contain letters, digits, '-', '_' and '.'");
    }
}

Scenario build_scenario(const json& j) {
    if (!j.is_object()) bad("scenario root must be a JSON object");
    static const char* allowed[] = {"name",   "builtin", "table", "aggregator", "h_domain",
                                    "queue",  "nleq",    "affine", "family",    "restrict",
                                    "grid_step", "tol",  "mu0",   "steps",      "pipeline"};
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || item.key() == k;
        if (!known) bad("unknown scenario field '" + item.key() + "'");
    }

    Scenario s;
    const json& name = need(j, "name");
    if (!name.is_string()) bad("'name' must be a string");
    s.name = name.get<std::string>();
    check_scenario_name(s.name);

    int blocks = 0;
    for (const char* k : {"builtin", "table", "queue", "nleq", "affine"})
        blocks += j.contains(k) ? 1 : 0;
    if (blocks != 1)
        bad("scenario must contain exactly one kernel block: builtin, table, queue, nleq, or affine");
    if ((j.contains("aggregator") || j.contains("h_domain")) && !j.contains("table"))
        bad("'aggregator' and 'h_domain' apply only to table scenarios");

    if (j.contains("builtin")) {
        const json& b = j.at("builtin");
        if (!b.is_string()) bad("'builtin' must be a string id");
        const std::string id = b.get<std::string>();
        s.model = builtins::by_id(id);
        if (id == "mm1") s.queue = builtins::mm1_queue(1.0);
        if (id == "mg1-det") s.queue = builtins::deterministic_queue();
        if (id == "lindley-fixture") s.queue = builtins::lindley_fixture();
        if (id == "two-state-eq") s.nleq = builtins::two_state_system();
    } else if (j.contains("table")) {
        parse_table_block(j, s);
    } else if (j.contains("queue")) {
        parse_queue_block(j, s);
    } else if (j.contains("nleq")) {
        parse_nleq_block(j, s);
    } else {
        parse_affine_block(j, s);
    }

    if (j.contains("family")) s.family = parse_family(j.at("family"));
    if (j.contains("restrict")) s.restrict_interval = as_interval(j.at("restrict"), "restrict");
    if (j.contains("grid_step")) {
        s.grid_step = as_num(j.at("grid_step"), "grid_step");
        if (s.grid_step < 0.0) bad("grid_step must be nonnegative");
    }
    if (j.contains("tol")) {
        s.tol = as_num(j.at("tol"), "tol");
        if (!(s.tol > 0.0)) bad("tol must be positive");
    }
    if (j.contains("mu0")) s.mu0 = as_num_vec(j.at("mu0"), "mu0");
    if (j.contains("steps")) {
        const double n = as_num(j.at("steps"), "steps");
        if (n < 1 || n != std::floor(n)) bad("steps must be a positive integer");
        s.steps = static_cast<std::size_t>(n);
    }
    if (j.contains("pipeline")) {
        if (!j.at("pipeline").is_boolean()) bad("'pipeline' must be a boolean");
        s.queue_pipeline = j.at("pipeline").get<bool>();
    }
    return s;
}

std::string family_label(const OrderFamily& f) {
    std::string s = to_string(f.tag());
    if (f.tag() == OrderTag::linear_cone)
        s += "[" + std::to_string(f.generators().size()) + " generators]";
    return s;
}

void write_certificate(std::ostream& out, const Certificate& c) {
    out << "[" << to_string(c.name) << "] family=" << family_label(c.family)
        << " holds=" << (c.holds ? "yes" : "no");
    if (c.h_interval.lo != 0.0 || c.h_interval.hi != 0.0)
        out << " h=[" << fmt17(c.h_interval.lo) << ", " << fmt17(c.h_interval.hi) << "]";
    if (c.sampled) out << " sampled trials=" << c.trials;
    out << "\n";
    if (!c.detail.empty()) out << "  note: " << c.detail << "\n";
    if (c.counterexample) out << "  counterexample: " << describe(*c.counterexample) << "\n";
}

void write_property(std::ostream& out, const PropertyReport& r) {
    out << "[property_" << (r.property == PropertyReport::Which::U ? "U" : "C")
        << "] holds=" << (r.holds ? "yes" : "no") << " grid=" << r.h_grid.size() << "\n";
    const std::size_t shown = std::min<std::size_t>(r.witnesses.size(), 3);
    for (std::size_t i = 0; i < shown; ++i)
        out << "  witness: h=" << fmt17(r.witnesses[i].h) << " " << r.witnesses[i].reason << "\n";
    if (r.witnesses.size() > shown)
        out << "  (" << r.witnesses.size() - shown << " more witnesses)\n";
}

std::ofstream open_report(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::validation_error, "cannot open output file " + path.string());
    return out;
}

NonlinearKernel scoped_kernel(const Scenario& s, const char* command) {
    if (!s.model)
        fail(Errc::validation_error,
             std::string("the ") + command + " command needs a kernel scenario");
    if (s.restrict_interval) return restrict_h(s.model->kernel, *s.restrict_interval);
    return s.model->kernel;
}

Dist initial_dist(const Scenario& s, const SpacePtr& space) {
    if (s.mu0.empty())
        return make_dist(space, std::vector<double>(space->size(), 1.0 / space->size()));
    return make_dist(space, s.mu0);
}

void write_solve_report(std::ostream& out, const EquilibriumReport& report) {
    out << "verdict: " << to_string(report.verdict) << "\n";
    out << "all_certified: " << (report.all_certified ? "yes" : "no") << "\n";
    out << "phi_nonincreasing: " << (report.phi_nonincreasing ? "yes" : "no") << "\n";
    for (const auto& c : report.certificates) write_certificate(out, c);
    out << "equilibria: " << report.equilibria.size() << "\n";
    for (const auto& eq : report.equilibria)
        out << "  h=" << fmt17(eq.h) << " residual=" << fmt17(eq.residual) << " dist=("
            << fmt17_join(eq.dist.probs()) << ")\n";
    std::size_t excluded = 0;
    for (const auto& ps : report.phi_samples) excluded += ps.ok ? 0 : 1;
    out << "excluded_samples: " << excluded << "\n";
    std::size_t shown = 0;
    for (const auto& ps : report.phi_samples) {
        if (ps.ok) continue;
        if (++shown > 5) {
            out << "  (" << excluded - 5 << " more)\n";
            break;
        }
        out << "  h=" << fmt17(ps.h) << " " << ps.note << "\n";
    }
}

int cmd_certify(const Scenario& s, const RunOptions& opt, std::ostream& log) {
    const std::filesystem::path path =
        std::filesystem::path(opt.out_dir) / (s.name + ".certify.txt");
    auto out = open_report(path);
    bool all = true;

    if (s.affine) {
        const Certificate cert = certify_affine_cone(*s.affine);
        write_certificate(out, cert);
        all = cert.holds;
    } else {
        const NonlinearKernel kernel = scoped_kernel(s, "certify");
        const auto grid = default_h_grid(kernel.h_domain());
        const Certificate certs[] = {
            certify_d_preserving(kernel, s.family, grid),
            certify_d_decreasing(kernel, s.family, grid),
            certify_h_monotone(s.model->aggregator, s.family, kMonotoneTrials,
                               opt.seed.value_or(kMonotoneSeed)),
        };
        for (const auto& c : certs) {
            write_certificate(out, c);
            all = all && c.holds;
        }
        const PropertyReport u = check_property_U(kernel, grid);
        const PropertyReport c = check_property_C(kernel, grid);
        write_property(out, u);
        write_property(out, c);
        all = all && u.holds;
    }
    out << "certified: " << (all ? "yes" : "no") << "\n";
    log << "wrote " << path.string() << "\n";
    return !all && opt.require_certified ? 2 : 0;
}

int cmd_solve(const Scenario& s, const RunOptions& opt, std::ostream& log) {
    const NonlinearKernel kernel = scoped_kernel(s, "solve");
    const EquilibriumReport report =
        find_equilibria(kernel, s.model->aggregator, opt.grid_step.value_or(s.grid_step),
                        opt.tol.value_or(s.tol));

    const std::filesystem::path dir(opt.out_dir);
    const auto summary_path = dir / (s.name + ".solve.txt");
    auto out = open_report(summary_path);
    write_solve_report(out, report);
    log << "wrote " << summary_path.string() << "\n";

    const auto phi_path = dir / (s.name + ".phi.csv");
    auto phi = open_report(phi_path);
    phi << "h,phi,ok\n";
    for (const auto& ps : report.phi_samples)
        phi << fmt17(ps.h) << "," << (ps.ok ? fmt17(ps.phi) : std::string()) << ","
            << (ps.ok ? 1 : 0) << "\n";
    log << "wrote " << phi_path.string() << "\n";

    const auto eq_path = dir / (s.name + ".equilibria.csv");
    auto eq = open_report(eq_path);
    eq << "h,residual";
    for (std::size_t i = 0; i < kernel.n_states(); ++i) eq << ",p" << i;
    eq << "\n";
    for (const auto& e : report.equilibria)
        eq << fmt17(e.h) << "," << fmt17(e.residual) << "," << fmt17_join(e.dist.probs()) << "\n";
    log << "wrote " << eq_path.string() << "\n";

    log << "verdict: " << to_string(report.verdict) << " (" << report.equilibria.size()
        << " equilibria)\n";
    return !report.all_certified && opt.require_certified ? 2 : 0;
}

int cmd_simulate(const Scenario& s, const RunOptions& opt, std::ostream& log) {
    const NonlinearKernel kernel = scoped_kernel(s, "simulate");
    const Dist mu0 = initial_dist(s, kernel.space_ptr());
    const std::size_t steps = opt.steps.value_or(s.steps);
    const Trajectory traj = iterate(kernel, s.model->aggregator, mu0, steps);

    const std::filesystem::path dir(opt.out_dir);
    const auto csv_path = dir / (s.name + ".trajectory.csv");
    auto csv = open_report(csv_path);
    write_trajectory_csv(traj, csv);
    log << "wrote " << csv_path.string() << "\n";

    const auto cycle = detect_cycle(traj);
    const Dist avg = cesaro(traj, 1);
    const double residual = verify_invariant(kernel, s.model->aggregator, avg);

    const auto sum_path = dir / (s.name + ".simulate.txt");
    auto out = open_report(sum_path);
    out << "steps: " << steps << "\n";
    out << "final_h: " << fmt17(traj.aggregator_path.back()) << "\n";
    if (cycle)
        out << "cycle: period=" << cycle->period << " onset=" << cycle->onset << "\n";
    else
        out << "cycle: none\n";
    out << "cesaro: (" << fmt17_join(avg.probs()) << ")\n";
    out << "cesaro_residual: " << fmt17(residual) << "\n";
    out << "cesaro_invariant: " << (residual <= kInvariantTol ? "yes" : "no") << "\n";
    log << "wrote " << sum_path.string() << "\n";
    return 0;
}

int cmd_queue(const Scenario& s, const RunOptions& opt, std::ostream& log) {
    if (!s.queue)
        fail(Errc::validation_error, "the queue command needs a queue scenario");
    const double es = s.queue->es();
    const double es2 = s.queue->es2();
    const double lambda = mg1_equilibrium_rate(es, es2);
    const double wait = pk_wait(lambda, es, es2);

    const std::filesystem::path path =
        std::filesystem::path(opt.out_dir) / (s.name + ".queue.txt");
    auto out = open_report(path);
    out << "es: " << fmt17(es) << "\n";
    out << "es2: " << fmt17(es2) << "\n";
    out << "lambda: " << fmt17(lambda) << "\n";
    out << "pk_wait: " << fmt17(wait) << "\n";
    out << "identity_residual: " << fmt17(std::abs(1.0 / lambda - wait)) << "\n";

    int code = 0;
    if (s.queue_pipeline) {
        const NonlinearKernel kernel = scoped_kernel(s, "queue");
        const EquilibriumReport report =
            find_equilibria(kernel, s.model->aggregator, opt.grid_step.value_or(s.grid_step),
                            opt.tol.value_or(s.tol));
        out << "pipeline:\n";
        write_solve_report(out, report);
        if (!report.all_certified && opt.require_certified) code = 2;
    }
    log << "wrote " << path.string() << "\n";
    log << "lambda: " << fmt17(lambda) << "\n";
    return code;
}

int cmd_nleq(const Scenario& s, const RunOptions& opt, std::ostream& log) {
    if (!s.nleq)
        fail(Errc::validation_error, "the nleq command needs an nleq scenario");
    const Cor1Solution sol =
        solve_cor1(*s.nleq, opt.grid_step.value_or(s.grid_step), opt.tol.value_or(s.tol));

    const std::filesystem::path path =
        std::filesystem::path(opt.out_dir) / (s.name + ".nleq.txt");
    auto out = open_report(path);
    out << "a: " << fmt17(sol.a) << "\n";
    out << "x: (" << fmt17_join(sol.x) << ")\n";
    out << "residual: " << fmt17(sol.residual) << "\n";
    for (const auto& c : sol.conditions) write_certificate(out, c);
    log << "wrote " << path.string() << "\n";
    log << "a: " << fmt17(sol.a) << "\n";
    return 0;
}

} // namespace

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(Errc::parse_error, std::string("scenario is not valid JSON: ") + e.what());
    }
    try {
        return build_scenario(j);
    } catch (const json::exception& e) {
        fail(Errc::validation_error, std::string("scenario schema violation: ") + e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::parse_error, "cannot read scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

Command parse_command(const std::string& word) {
    if (word == "certify") return Command::certify;
    if (word == "solve") return Command::solve;
    if (word == "simulate") return Command::simulate;
    if (word == "queue") return Command::queue;
    if (word == "nleq") return Command::nleq;
    fail(Errc::validation_error,
         "unknown command '" + word + "'; expected certify, solve, simulate, queue, or nleq");
}

int run(Command command, const Scenario& scenario, const RunOptions& options, std::ostream& log) {
    if (!options.out_dir.empty()) std::filesystem::create_directories(options.out_dir);
    switch (command) {
    case Command::certify: return cmd_certify(scenario, options, log);
    case Command::solve: return cmd_solve(scenario, options, log);
    case Command::simulate: return cmd_simulate(scenario, options, log);
    case Command::queue: return cmd_queue(scenario, options, log);
    case Command::nleq: return cmd_nleq(scenario, options, log);
    }
    fail(Errc::validation_error, "unhandled command");
}

} // namespace nlmc
