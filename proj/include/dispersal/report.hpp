#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

namespace dispersal {

/// Errors against a decreasing dispersal-distance sequence.
struct ConvergenceReport {
    std::vector<double> deltas;
    std::vector<double> errors;

    /// p_k = log(e_k / e_{k+1}) / log(delta_k / delta_{k+1}); entry 0 is empty.
    std::vector<std::optional<double>> empirical_orders() const;
    /// Smallest empirical order over consecutive pairs.
    std::optional<double> min_order() const;
    bool strictly_decreasing() const;
    double max_error() const;
};

/// Columns delta, error, empirical_order (empty on the first row).
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

}  // namespace dispersal
