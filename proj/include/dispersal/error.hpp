#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dispersal {

/// Failure categories raised across the library.
///
/// The CLI maps these onto exit statuses: configuration and precondition
/// failures exit with 2, numerical failures with 3.
enum class ErrorKind {
    invalid_argument,
    quadrature_failure,
    incompatible_spacing,
    grid_mismatch,
    support_unresolved,
    ghost_band_too_narrow,
    too_few_nodes,
    mismatched_operators,
    non_multiple_snapshot,
    shape_mismatch,
    config,
    blow_up,
    no_convergence,
    collapsed_to_zero,
    invasion_condition_failed,
};

std::string_view to_string(ErrorKind kind);

/// True for failures of the numerics themselves rather than of the inputs.
bool is_numerical_failure(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace dispersal
