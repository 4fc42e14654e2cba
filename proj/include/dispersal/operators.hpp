#pragma once

#include "dispersal/grid.hpp"
#include "dispersal/kernels.hpp"
#include "dispersal/sparse.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace dispersal {

/// The three paired boundary conditions: Dirichlet (u = 0 on the exterior
/// for the nonlocal problem, on the boundary for the Laplacian), Neumann
/// (no exterior for the nonlocal problem, zero normal derivative for the
/// Laplacian) and spatial periodicity.
enum class BoundaryCondition { dirichlet = 1, neumann = 2, periodic = 3 };

enum class OperatorKind { nonlocal, local };

/// How the assembled nonlocal operator fixes its dispersal rate.
enum class MomentScaling {
    /// nu = (1/2 sum_j w_j k_delta(z_j) z_N^2)^-1 over the grid offsets, so
    /// the discrete operator reproduces the Laplacian exactly on quadratics.
    grid_calibrated,
    /// nu = C / delta^2 with the continuum moment constant.
    analytic,
};

std::string_view to_string(BoundaryCondition bc);
BoundaryCondition boundary_condition_from_string(std::string_view name);
std::string_view to_string(OperatorKind kind);

/// Linear dispersal action A on nodal fields.
///
/// A is stored as nonnegative off-diagonal couplings a_ij and applied in
/// difference form (Au)_i = sum_j a_ij (u_j - u_i), so constants are
/// annihilated exactly wherever every coupled node is active. Couplings to
/// inactive nodes (Dirichlet ghosts and, for the Laplacian, boundary nodes)
/// act on the held value 0 and only contribute to the diagonal. Inactive
/// rows are empty.
///
/// `weights()` is the nodal quadrature weight W (1, or 1/2 per boundary axis
/// for Neumann) for which W A is exactly symmetric.
class DispersalOperator {
public:
    OperatorKind kind() const noexcept { return kind_; }
    BoundaryCondition bc() const noexcept { return bc_; }
    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    /// Dispersal distance (0 for the Laplacian).
    double delta() const noexcept { return delta_; }
    /// Dispersal rate (0 for the Laplacian).
    double nu() const noexcept { return nu_; }

    const CsrMatrix& couplings() const noexcept { return couplings_; }
    std::span<const double> diagonal() const noexcept { return diagonal_; }
    std::span<const double> weights() const noexcept { return weights_; }
    bool is_active(std::size_t node) const { return active_[node] != 0; }
    std::size_t active_count() const noexcept;

    void apply(std::span<const double> u, std::span<double> out) const;
    Field apply(const Field& u) const;

    /// Full matrix A including the diagonal.
    CsrMatrix matrix() const;
    /// W A.
    CsrMatrix weighted_matrix() const;

private:
    friend DispersalOperator assemble_nonlocal(GridPtr, const KernelProfile&, double,
                                               BoundaryCondition, MomentScaling);
    friend DispersalOperator assemble_local(GridPtr, BoundaryCondition);

    void finalize();

    OperatorKind kind_ = OperatorKind::local;
    BoundaryCondition bc_ = BoundaryCondition::neumann;
    GridPtr grid_;
    double delta_ = 0.0;
    double nu_ = 0.0;
    CsrMatrix couplings_;
    std::vector<double> diagonal_;
    std::vector<double> weights_;
    std::vector<char> active_;
};

/// Nonlocal operator nu int k_delta(y - x) [u(y) - u(x)] dy by the nodal rule.
///
/// Dirichlet integrates over the closed box plus the ghost band (held at 0);
/// Neumann integrates over the closed box only, with trapezoid end weights;
/// periodic wraps displacements modulo the cell.
///
/// Throws Error(support_unresolved) when delta / h < 4 and
/// Error(ghost_band_too_narrow) when a Dirichlet grid's ghost band is
/// narrower than delta.
DispersalOperator assemble_nonlocal(GridPtr grid, const KernelProfile& profile, double delta,
                                    BoundaryCondition bc,
                                    MomentScaling scaling = MomentScaling::grid_calibrated);

/// Second-order central-difference Laplacian. Dirichlet eliminates the
/// boundary nodes; Neumann closes the stencil by mirror reflection.
/// Throws Error(too_few_nodes) for fewer than 3 nodes on an axis.
DispersalOperator assemble_local(GridPtr grid, BoundaryCondition bc);

/// sup |(A_nonlocal - A_local) u| over active nodes farther than delta from
/// the boundary (every node on a periodic cell).
double consistency_error(const DispersalOperator& nonlocal, const DispersalOperator& local,
                         const Field& test_field);

}  // namespace dispersal
