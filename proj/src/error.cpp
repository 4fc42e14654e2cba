#include "dispersal/error.hpp"

namespace dispersal {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::quadrature_failure: return "quadrature-failure";
        case ErrorKind::incompatible_spacing: return "incompatible-spacing";
        case ErrorKind::grid_mismatch: return "grid-mismatch";
        case ErrorKind::support_unresolved: return "support-unresolved";
        case ErrorKind::ghost_band_too_narrow: return "ghost-band-too-narrow";
        case ErrorKind::too_few_nodes: return "too-few-nodes";
        case ErrorKind::mismatched_operators: return "mismatched-operators";
        case ErrorKind::non_multiple_snapshot: return "non-multiple-snapshot";
        case ErrorKind::shape_mismatch: return "shape-mismatch";
        case ErrorKind::config: return "config";
        case ErrorKind::blow_up: return "blow-up";
        case ErrorKind::no_convergence: return "no-convergence";
        case ErrorKind::collapsed_to_zero: return "collapsed-to-zero";
        case ErrorKind::invasion_condition_failed: return "invasion-condition-failed";
    }
    return "unknown";
}

bool is_numerical_failure(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::blow_up:
        case ErrorKind::no_convergence:
        case ErrorKind::collapsed_to_zero:
        case ErrorKind::invasion_condition_failed:
        case ErrorKind::quadrature_failure:
            return true;
        default:
            return false;
    }
}

}  // namespace dispersal
