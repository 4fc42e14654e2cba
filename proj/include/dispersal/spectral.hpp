#pragma once

#include "dispersal/coefficients.hpp"
#include "dispersal/evolution.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace dispersal {

/// One-period solution operator u0 -> u(T; 0, u0) of u_t = A u + a(t, x) u,
/// realized by time integration.
class PeriodMap {
public:
    /// `moment_constant` is the kernel's continuum C; it is only used by the
    /// principal-eigenvalue criterion of nonlocal maps.
    PeriodMap(OperatorPtr op, TimePeriodicCoefficient a, double dt,
              std::optional<double> moment_constant = std::nullopt,
              IntegratorOptions options = {});

    const DispersalOperator& op() const { return integrator_.op(); }
    const OperatorPtr& op_ptr() const noexcept { return op_; }
    const TimePeriodicCoefficient& coefficient() const noexcept { return a_; }
    double period() const noexcept { return a_.period; }
    double dt() const noexcept { return integrator_.dt(); }
    std::optional<double> moment_constant() const noexcept { return moment_constant_; }

    Field apply(const Field& u0) const;
    void apply_in_place(std::span<double> u) const;

private:
    OperatorPtr op_;
    TimePeriodicCoefficient a_;
    std::optional<double> moment_constant_;
    Integrator integrator_;
    long steps_;
};

struct SpectrumResult {
    double lambda = 0.0;
    Field eigenfunction;  ///< nonnegative, sup norm 1
    int iterations = 0;
    double residual = 0.0;  ///< ||Phi u - e^{lambda T} u||_inf
    /// Principal-eigenvalue criterion, evaluated for nonlocal maps only.
    std::optional<bool> is_principal_eigenvalue;
};

struct PowerIterationOptions {
    double tol = 1e-9;
    int max_iters = 20000;
    /// Start vector; defaults to 1 (Dirichlet: the first Laplacian mode).
    std::optional<Field> start;
};

/// Dominant eigenvalue of the period map by power iteration with sup-norm
/// normalization: rho_k = ||Phi u_k||_inf, lambda = ln(rho) / T. Stops when
/// successive ratios differ by less than tol and the eigen-residual is at
/// most tol. Throws Error(no_convergence) after max_iters.
SpectrumResult principal_value(const PeriodMap& map, const PowerIterationOptions& options = {});

/// lambda > max_x { -C / delta^2 + (1/T) int_0^T a(t, x) dt }, with the time
/// average by the 512-panel trapezoid rule.
bool pev_criterion(const PeriodMap& map, double lambda, double moment_constant, double delta);

/// Right-hand side of the criterion above.
double pev_threshold(const PeriodMap& map, double moment_constant, double delta);

struct PerturbationCheck {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double coefficient_distance = 0.0;  ///< sup |a1 - a2| on the (t, x) lattice
    bool holds = false;                 ///< |lambda1 - lambda2| <= distance + tol
};

/// Lipschitz bound of the principal value in the coefficient, on a lattice
/// of 512 times per period by all non-ghost nodes.
PerturbationCheck perturbation_check(const PeriodMap& map1, const PeriodMap& map2, double tol,
                                     const PowerIterationOptions& options = {});

/// Sup of |a1 - a2| over 512 time samples and all non-ghost nodes.
double coefficient_distance(const TimePeriodicCoefficient& a1, const TimePeriodicCoefficient& a2,
                            const Grid& grid);

struct SpectrumRow {
    double delta = 0.0;
    double lambda_delta = 0.0;
    double lambda_r = 0.0;
    double abs_gap = 0.0;
    bool pev_criterion = false;
};

struct SpectrumReport {
    double lambda_r = 0.0;
    std::vector<SpectrumRow> rows;

    ConvergenceReport gaps() const;
};

/// lambda^r from the Laplacian map and lambda^delta per delta on one grid.
SpectrumReport theorem_b_experiment(const SweepSetup& setup, const TimePeriodicCoefficient& a,
                                    const PowerIterationOptions& options = {});

/// Columns delta, lambda_delta, lambda_r, abs_gap, pev_criterion.
void write_spectrum_csv(std::ostream& out, const SpectrumReport& report);

}  // namespace dispersal
