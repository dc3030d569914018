#pragma once

#include <stdexcept>
#include <string>

namespace nlmc {

enum class Errc {
    negative_mass,
    mass_not_one,
    dimension_mismatch,
    product_space_unsupported,
    length_mismatch,
    aggregator_out_of_domain,
    bad_state_index,
    multiple_stationary,
    numerical_failure,
    unsupported_family,
    empty_interval,
    unstable_queue,
    bad_moments,
    grid_overflow_excess,
    infeasible_policy,
    condition_failed,
    no_root,
    parse_error,
    validation_error,
};

const char* to_string(Errc c) noexcept;

/// Library-wide exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

} // namespace nlmc
