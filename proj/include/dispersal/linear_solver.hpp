#pragma once

#include "dispersal/operators.hpp"

#include <memory>
#include <span>

namespace dispersal {

/// Solves (I - tau A) x = b on the active nodes of a dispersal operator;
/// inactive entries of x are held at 0.
///
/// W (I - tau A) restricted to the active nodes is symmetric positive
/// definite, so it is factored once (sparse LDL^T) and used as the
/// preconditioner of an iterative refinement loop that runs until
/// ||b - (I - tau A) x||_inf <= tolerance * ||b||_inf. The residual is
/// evaluated in the operator's difference form, so a right-hand side that is
/// already solved by the initial guess (e.g. constants for Neumann and
/// periodic problems) is returned unchanged.
class ImplicitSolver {
public:
    ImplicitSolver(const DispersalOperator& op, double tau, double tolerance = 1e-10);
    ~ImplicitSolver();
    ImplicitSolver(ImplicitSolver&&) noexcept;
    ImplicitSolver& operator=(ImplicitSolver&&) noexcept;

    /// x holds the initial guess on entry and the solution on exit.
    /// Throws Error(no_convergence) if refinement stalls.
    void solve(std::span<const double> b, std::span<double> x) const;

    double tau() const noexcept { return tau_; }
    /// Refinement sweeps used by the most recent solve.
    int last_sweeps() const noexcept { return last_sweeps_; }

private:
    struct Factorization;
    const DispersalOperator* op_;
    double tau_;
    double tolerance_;
    std::unique_ptr<Factorization> factor_;
    mutable int last_sweeps_ = 0;
};

}  // namespace dispersal
