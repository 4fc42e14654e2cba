#pragma once

#include "dispersal/coefficients.hpp"
#include "dispersal/evolution.hpp"
#include "dispersal/spectral.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace dispersal {

/// u_t = A u + u f(t, x, u), T-periodic in t, with logistic f = a(t, x) - u.
struct KPPProblem {
    OperatorPtr op;
    GrowthRate growth;
    double dt = 0.0;
    /// Continuum kernel constant, for the principal-eigenvalue criterion.
    std::optional<double> moment_constant;
    IntegratorOptions integrator;

    double period() const noexcept { return growth.base.period; }
};

struct H2Check {
    bool holds = false;
    double lambda = 0.0;
    SpectrumResult spectrum;
};

/// Principal value of the linearization at zero, a(t, x) = f(t, x, 0).
H2Check verify_h2(const KPPProblem& problem, const PowerIterationOptions& options = {});

/// Smallest M in {1, 2, 4, ...} with f(t, x, M) < 0 on 64 times by all
/// non-ghost nodes. Throws Error(invalid_argument) past 2^40.
double super_solution_level(const KPPProblem& problem);

struct OrbitOptions {
    double tol = 1e-8;
    int max_periods = 2000;
    int snapshots = 32;
    double sub_amplitude = 1e-3;
    PowerIterationOptions spectrum;
};

/// Positive T-periodic solution sampled at t_k = k T / m, k = 0..m-1.
struct PeriodicOrbit {
    std::vector<Field> snapshots;
    double periodicity_residual = 0.0;
    double super_level = 0.0;
    int super_periods = 0;
    int sub_periods = 0;
    /// Largest increase of an iterate over its predecessor from the super start.
    double super_monotonicity_violation = 0.0;
    /// Largest decrease of an iterate below its predecessor from the sub start.
    double sub_monotonicity_violation = 0.0;
    /// sup |limit from super start - limit from sub start|.
    double start_gap = 0.0;
    double h2_lambda = 0.0;

    bool sandwich_holds(double tol = 1e-10) const {
        return super_monotonicity_violation <= tol && sub_monotonicity_violation <= tol;
    }
    bool starts_agree(double tol) const { return start_gap <= 10.0 * tol; }
};

/// Monotone iteration of the period map from the constant super-solution and
/// from eps times the principal eigenfunction of the linearization at zero.
///
/// Throws Error(invasion_condition_failed) if the linearization at zero has a
/// nonpositive principal value, Error(collapsed_to_zero) if an iterate
/// vanishes, and Error(no_convergence) after max_periods.
PeriodicOrbit positive_periodic_solution(const KPPProblem& problem, const OrbitOptions& options = {});

/// Largest sup distance from orbit.snapshots[0] after perturbing it by
/// factors (1 +/- fraction) and iterating `periods` periods.
double stability_deviation(const KPPProblem& problem, const PeriodicOrbit& orbit,
                           double fraction = 0.1, int periods = 20);

struct OrbitRow {
    double delta = 0.0;
    double sup_gap = 0.0;  ///< NaN when the nonlocal invasion condition fails
    double h2_delta_lambda = 0.0;
    bool h2_delta_ok = false;
    bool sandwich_holds = false;
    bool starts_agree = false;
};

struct OrbitReport {
    double h2_lambda = 0.0;
    bool local_sandwich_holds = false;
    bool local_starts_agree = false;
    std::vector<OrbitRow> rows;

    ConvergenceReport gaps() const;
};

/// u* from the Laplacian once and u*_delta per delta; E(delta) is the max over
/// the shared snapshot times of the sup distance.
OrbitReport theorem_c_experiment(const SweepSetup& setup, const GrowthSpec& growth, double period,
                                 const OrbitOptions& options = {});

/// Columns delta, sup_gap, h2_delta_lambda, h2_delta_ok.
void write_orbit_report_csv(std::ostream& out, const OrbitReport& report);

/// Columns t, x (or x, y), value over all snapshots.
void write_orbit_csv(std::ostream& out, const PeriodicOrbit& orbit);

}  // namespace dispersal
