#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlmc/apps.hpp"
#include "nlmc/builtins.hpp"
#include "nlmc/certify.hpp"
#include "nlmc/solve.hpp"

namespace nlmc {

/// A fully constructed model description loaded from a JSON scenario file.
/// The kernel block (builtin id, row table, queue, or nleq) populates
/// `model`; queue and nleq blocks additionally keep their structured spec so
/// the corresponding commands can use the closed forms. An affine block
/// populates only `affine` (the cone certificate needs no kernel).
struct Scenario {
    std::string name;
    std::optional<KernelWithAggregator> model;
    std::optional<QueueSpec> queue;
    std::optional<Cor1System> nleq;
    std::optional<AffineChainSpec> affine;
    OrderFamily family = OrderFamily::sd();
    std::optional<Interval> restrict_interval;
    double grid_step = 0.0;
    double tol = 1e-10;
    std::vector<double> mu0;
    std::size_t steps = 200;
    /// Whether the queue command also certifies and solves the kernel built
    /// on the wait grid (off for fixtures whose grid chain is trivial).
    bool queue_pipeline = false;
};

/// Parse a scenario from JSON text. Throws ParseError on malformed JSON and
/// ValidationError on schema violations (missing fields, unknown builtin ids,
/// rows off the simplex, unsorted interpolation knots).
Scenario parse_scenario(const std::string& json_text);

/// Convenience: read the file then parse.
Scenario load_scenario(const std::string& path);

enum class Command { certify, solve, simulate, queue, nleq };

/// Throws ValidationError for unknown command words.
Command parse_command(const std::string& word);

/// Command-line overrides; unset fields keep the scenario's values.
struct RunOptions {
    std::string out_dir = ".";
    bool require_certified = false;
    std::optional<double> grid_step;
    std::optional<double> tol;
    std::optional<std::size_t> steps;
    std::optional<std::uint64_t> seed;
};

/// Execute one command against a scenario, writing report files into
/// options.out_dir (certificates and summaries as text, numeric series as
/// 17-significant-digit CSV) and a human-readable log to `log`. Returns the
/// process exit code: 0 on success, 2 when require_certified is set and a
/// certificate fails, 1 on error (also signalled by throwing Error, which
/// the CLI maps to 1).
int run(Command command, const Scenario& scenario, const RunOptions& options,
        std::ostream& log);

} // namespace nlmc
