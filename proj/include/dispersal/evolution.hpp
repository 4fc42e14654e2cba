#pragma once

#include "dispersal/coefficients.hpp"
#include "dispersal/grid.hpp"
#include "dispersal/kernels.hpp"
#include "dispersal/linear_solver.hpp"
#include "dispersal/operators.hpp"
#include "dispersal/report.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace dispersal {

using OperatorPtr = std::shared_ptr<const DispersalOperator>;

/// Reaction F(t, x, u) with its analytic u-derivative.
struct ReactionTerm {
    std::function<double(double, std::span<const double>, double)> value;
    std::function<double(double, std::span<const double>, double)> derivative;
    double period = 0.0;  ///< 0 for autonomous reactions

    bool is_zero() const noexcept { return !value; }

    static ReactionTerm none();
    /// F = a(t, x) u.
    static ReactionTerm linear(TimePeriodicCoefficient a);
    /// F = u f(t, x, u) with f = a(t, x) - u.
    static ReactionTerm kpp(GrowthRate f);
};

struct IntegratorOptions {
    /// Steps at the start of every call that are replaced by two implicit
    /// Euler half steps each, damping the stiff modes that the trapezoidal
    /// rule would otherwise leave oscillating.
    int smoothing_steps = 2;
    double blow_up_threshold = 1e12;
    double solver_tolerance = 1e-10;
};

/// Fixed-step IMEX integrator for u_t = A u + F(t, x, u).
///
/// The dispersal part is advanced by the trapezoidal rule and the reaction
/// by Heun's method (explicit predictor, trapezoidal corrector). Both implicit
/// stages share one factorization of I - (dt/2) A. Inactive nodes are held at
/// zero and see no reaction.
///
/// One integrator serves one thread at a time.
class Integrator {
public:
    Integrator(OperatorPtr op, ReactionTerm reaction, double dt, IntegratorOptions options = {});

    const DispersalOperator& op() const { return *op_; }
    double dt() const noexcept { return dt_; }

    /// Advances u in place from time t by `steps` steps. When `observer` is
    /// set it is called after every step with the new time and values.
    /// Throws Error(blow_up) when ||u||_inf exceeds the threshold.
    void advance(std::span<double> u, double t, long steps,
                 const std::function<void(double, std::span<const double>)>& observer = {}) const;

    /// Number of whole steps covering `duration`; throws
    /// Error(non_multiple_snapshot) if it is not an integer multiple of dt.
    long steps_for(double duration) const;

private:
    void step(std::span<double> u, double t, double h, bool implicit_euler) const;
    void reaction(double t, std::span<const double> u, std::span<double> out) const;

    OperatorPtr op_;
    ReactionTerm reaction_;
    double dt_;
    IntegratorOptions options_;
    ImplicitSolver solver_;
    std::vector<std::array<double, 2>> points_;
    mutable std::vector<double> explicit_, f0_, f1_, rhs_, stage_;
};

struct SemilinearProblem {
    OperatorPtr op;
    ReactionTerm reaction;
    Field initial;
    double start = 0.0;
    double end = 1.0;
};

struct Trajectory {
    std::vector<Field> snapshots;
    long steps = 0;
    double dt = 0.0;
};

/// Integrates the problem, recording u at `start` and at each requested time
/// (which must be integer multiples of dt from `start`, within [start, end]).
Trajectory solve(const SemilinearProblem& problem, double dt,
                 const std::vector<double>& snapshot_times, IntegratorOptions options = {});

/// True iff lower <= upper + tol at every non-ghost node of every snapshot.
/// Throws Error(shape_mismatch) if the trajectories differ in grid or times.
bool check_comparison(const Trajectory& lower, const Trajectory& upper, double tol);

/// Initial data catalog, functions of the first coordinate unless noted:
///
///   const(c)             c
///   cosine(c0, c1, k)    c0 + c1 cos(k x)
///   sine(c0, c1, k)      c0 + c1 sin(k x)
///   bump(c)              c prod_j ((x_j - a_j)(b_j - x_j))^2 over the box
struct InitialSpec {
    std::string name;
    std::vector<double> params;

    static InitialSpec parse(std::string_view text);
    std::string to_string() const;
    Field sample(const GridPtr& grid) const;

    bool operator==(const InitialSpec&) const = default;
};

/// Shared setup of a delta sweep comparing nonlocal and local problems.
struct SweepSetup {
    Domain domain;
    BoundaryCondition bc = BoundaryCondition::neumann;
    KernelFamily kernel = KernelFamily::quartic_polynomial;
    std::vector<double> deltas;  ///< strictly decreasing
    double h = 0.0;              ///< at most min(deltas) / 8
    double dt = 0.0;
    int jobs = 1;
    MomentScaling scaling = MomentScaling::grid_calibrated;
    IntegratorOptions integrator;

    /// Throws Error(invalid_argument) when the sweep rules are violated.
    void validate() const;
    /// Grid with a ghost band of max(deltas) for Dirichlet problems.
    GridPtr make_grid() const;
};

/// For every delta, solves the nonlocal and the local problem on one grid
/// and records e(delta) = max over all time steps of the sup distance.
ConvergenceReport theorem_a_experiment(const SweepSetup& setup, const ReactionTerm& reaction,
                                       const InitialSpec& initial, double duration);

}  // namespace dispersal
