#include "dispersal/linear_solver.hpp"

#include "dispersal/error.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace dispersal {

struct ImplicitSolver::Factorization {
    std::vector<std::size_t> active;  // compressed index -> node
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    mutable Eigen::VectorXd rhs;
    mutable std::vector<double> residual;
    mutable std::vector<double> action;
};

ImplicitSolver::ImplicitSolver(const DispersalOperator& op, double tau, double tolerance)
    : op_(&op), tau_(tau), tolerance_(tolerance), factor_(std::make_unique<Factorization>()) {
    if (!(tau >= 0.0)) throw Error(ErrorKind::invalid_argument, "tau must be nonnegative");
    const std::size_t n = op.grid().size();
    std::vector<long> compressed(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (op.is_active(i)) {
            compressed[i] = static_cast<long>(factor_->active.size());
            factor_->active.push_back(i);
        }
    }
    const auto m = static_cast<Eigen::Index>(factor_->active.size());
    const auto& c = op.couplings();
    const auto w = op.weights();
    const auto diag = op.diagonal();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(c.nonzeros() + factor_->active.size());
    for (std::size_t r = 0; r < factor_->active.size(); ++r) {
        const std::size_t i = factor_->active[r];
        const auto row = static_cast<Eigen::Index>(r);
        triplets.emplace_back(row, row, w[i] * (1.0 - tau * diag[i]));
        for (std::size_t k = c.row_start[i]; k < c.row_start[i + 1]; ++k) {
            const long col = compressed[c.column[k]];
            if (col >= 0) triplets.emplace_back(row, col, -tau * w[i] * c.value[k]);
        }
    }
    Eigen::SparseMatrix<double> matrix(m, m);
    matrix.setFromTriplets(triplets.begin(), triplets.end());
    factor_->ldlt.compute(matrix);
    if (factor_->ldlt.info() != Eigen::Success) {
        throw Error(ErrorKind::no_convergence, "factorization of I - tau A failed");
    }
    factor_->rhs.resize(m);
    factor_->residual.assign(n, 0.0);
    factor_->action.assign(n, 0.0);
}

ImplicitSolver::~ImplicitSolver() = default;
ImplicitSolver::ImplicitSolver(ImplicitSolver&&) noexcept = default;
ImplicitSolver& ImplicitSolver::operator=(ImplicitSolver&&) noexcept = default;

void ImplicitSolver::solve(std::span<const double> b, std::span<double> x) const {
    auto& f = *factor_;
    const std::size_t n = x.size();
    double b_norm = 0.0;
    for (std::size_t i : f.active) b_norm = std::max(b_norm, std::abs(b[i]));
    for (std::size_t i = 0; i < n; ++i) {
        if (!op_->is_active(i) || b_norm == 0.0) x[i] = 0.0;
    }
    const auto w = op_->weights();
    constexpr int max_sweeps = 30;
    for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
        op_->apply(x, f.action);
        double r_norm = 0.0;
        for (std::size_t i : f.active) {
            f.residual[i] = b[i] - (x[i] - tau_ * f.action[i]);
            r_norm = std::max(r_norm, std::abs(f.residual[i]));
        }
        if (r_norm <= tolerance_ * b_norm) {
            last_sweeps_ = sweep;
            return;
        }
        if (sweep == max_sweeps) break;
        for (std::size_t r = 0; r < f.active.size(); ++r) {
            const std::size_t i = f.active[r];
            f.rhs[static_cast<Eigen::Index>(r)] = w[i] * f.residual[i];
        }
        const Eigen::VectorXd correction = f.ldlt.solve(f.rhs);
        for (std::size_t r = 0; r < f.active.size(); ++r) {
            x[f.active[r]] += correction[static_cast<Eigen::Index>(r)];
        }
    }
    throw Error(ErrorKind::no_convergence,
                "implicit solve did not reach relative residual " + std::to_string(tolerance_));
}

}  // namespace dispersal
