#include "dispersal/operators.hpp"

#include "dispersal/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dispersal {

std::string_view to_string(BoundaryCondition bc) {
    switch (bc) {
        case BoundaryCondition::dirichlet: return "dirichlet";
        case BoundaryCondition::neumann: return "neumann";
        case BoundaryCondition::periodic: return "periodic";
    }
    return "unknown";
}

BoundaryCondition boundary_condition_from_string(std::string_view name) {
    if (name == "dirichlet") return BoundaryCondition::dirichlet;
    if (name == "neumann") return BoundaryCondition::neumann;
    if (name == "periodic") return BoundaryCondition::periodic;
    throw Error(ErrorKind::config, "unknown boundary condition '" + std::string(name) + "'");
}

std::string_view to_string(OperatorKind kind) {
    return kind == OperatorKind::nonlocal ? "nonlocal" : "local";
}

namespace {

void check_domain(const Grid& grid, BoundaryCondition bc) {
    const bool periodic = grid.domain().is_periodic();
    if (periodic != (bc == BoundaryCondition::periodic)) {
        throw Error(ErrorKind::invalid_argument,
                    "boundary condition '" + std::string(to_string(bc)) +
                        "' does not match the domain kind");
    }
}

// Trapezoid factor of a node in the closed box: 1/2 per axis on which the
// node sits on a face.
double end_weight(const Grid& grid, std::array<long, 2> pos) {
    double w = 1.0;
    for (int a = 0; a < grid.dimension(); ++a) {
        const auto last = static_cast<long>(grid.domain_axis_size(a)) - 1;
        if (pos[a] == 0 || pos[a] == last) w *= 0.5;
    }
    return w;
}

struct Offset {
    std::array<long, 2> step;
    double weight;  // h^N k_delta(step h)
};

std::vector<Offset> kernel_offsets(const Grid& grid, const KernelProfile& profile, double delta) {
    const double h = grid.spacing();
    const int dim = grid.dimension();
    const auto reach = static_cast<long>(std::ceil(delta / h));
    const double cell = std::pow(h, dim);
    std::vector<Offset> offsets;
    const long reach_y = dim == 2 ? reach : 0;
    for (long my = -reach_y; my <= reach_y; ++my) {
        for (long mx = -reach; mx <= reach; ++mx) {
            if (mx == 0 && my == 0) continue;
            const std::array<double, 2> z{static_cast<double>(mx) * h, static_cast<double>(my) * h};
            const double k = scaled_kernel(profile, delta,
                                           std::span<const double>(z.data(),
                                                                   static_cast<std::size_t>(dim)));
            if (k > 0.0) offsets.push_back({{mx, my}, cell * k});
        }
    }
    return offsets;
}

}  // namespace

std::size_t DispersalOperator::active_count() const noexcept {
    return static_cast<std::size_t>(std::count(active_.begin(), active_.end(), char{1}));
}

void DispersalOperator::finalize() {
    const std::size_t n = grid_->size();
    diagonal_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t k = couplings_.row_start[i]; k < couplings_.row_start[i + 1]; ++k) {
            sum += couplings_.value[k];
        }
        diagonal_[i] = -sum;
    }
}

void DispersalOperator::apply(std::span<const double> u, std::span<double> out) const {
    const auto& c = couplings_;
    for (std::size_t i = 0; i < c.rows; ++i) {
        double sum = 0.0;
        const double ui = u[i];
        for (std::size_t k = c.row_start[i]; k < c.row_start[i + 1]; ++k) {
            sum += c.value[k] * (u[c.column[k]] - ui);
        }
        out[i] = sum;
    }
}

Field DispersalOperator::apply(const Field& u) const {
    if (u.grid_ptr() != grid_ && !(u.grid() == *grid_)) {
        throw Error(ErrorKind::grid_mismatch, "field and operator live on different grids");
    }
    Field out(grid_, u.time());
    apply(u.values(), out.values());
    return out;
}

CsrMatrix DispersalOperator::matrix() const {
    CsrBuilder builder(couplings_.rows, couplings_.cols);
    for (std::size_t i = 0; i < couplings_.rows; ++i) {
        if (active_[i]) builder.add(i, diagonal_[i]);
        for (std::size_t k = couplings_.row_start[i]; k < couplings_.row_start[i + 1]; ++k) {
            builder.add(couplings_.column[k], couplings_.value[k]);
        }
        builder.finish_row();
    }
    return std::move(builder).build();
}

CsrMatrix DispersalOperator::weighted_matrix() const {
    CsrMatrix m = matrix();
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t k = m.row_start[i]; k < m.row_start[i + 1]; ++k) m.value[k] *= weights_[i];
    }
    return m;
}

DispersalOperator assemble_nonlocal(GridPtr grid, const KernelProfile& profile, double delta,
                                    BoundaryCondition bc, MomentScaling scaling) {
    if (!(delta > 0.0)) throw Error(ErrorKind::invalid_argument, "delta must be positive");
    if (grid->dimension() != profile.dimension()) {
        throw Error(ErrorKind::invalid_argument, "kernel and grid dimensions differ");
    }
    check_domain(*grid, bc);
    const double h = grid->spacing();
    if (delta / h < 4.0 - 1e-12) {
        throw Error(ErrorKind::support_unresolved,
                    "delta/h = " + std::to_string(delta / h) + " is below the floor of 4");
    }
    if (bc == BoundaryCondition::dirichlet && grid->ghost_width() < delta * (1.0 - 1e-12)) {
        throw Error(ErrorKind::ghost_band_too_narrow,
                    "ghost band " + std::to_string(grid->ghost_width()) +
                        " is narrower than delta " + std::to_string(delta));
    }

    const auto offsets = kernel_offsets(*grid, profile, delta);
    const int last_axis = grid->dimension() - 1;

    DispersalOperator op;
    op.kind_ = OperatorKind::nonlocal;
    op.bc_ = bc;
    op.grid_ = grid;
    op.delta_ = delta;
    if (scaling == MomentScaling::analytic) {
        op.nu_ = dispersal_rate(profile.moment_constant(), delta);
    } else {
        double second = 0.0;
        for (const auto& o : offsets) {
            const double z = static_cast<double>(o.step[last_axis]) * h;
            second += o.weight * z * z;
        }
        op.nu_ = 1.0 / (0.5 * second);
    }

    const std::size_t n = grid->size();
    op.active_.assign(n, 0);
    op.weights_.assign(n, 1.0);
    CsrBuilder builder(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (grid->is_ghost(i)) {
            builder.finish_row();
            continue;
        }
        op.active_[i] = 1;
        const auto pos = grid->position(i);
        if (bc == BoundaryCondition::neumann) op.weights_[i] = end_weight(*grid, pos);
        for (const auto& o : offsets) {
            const std::array<long, 2> target{pos[0] + o.step[0], pos[1] + o.step[1]};
            const std::size_t j = grid->node_at(target);
            if (j == n) continue;
            double coefficient = op.nu_ * o.weight;
            if (bc == BoundaryCondition::neumann) {
                if (grid->is_ghost(j)) continue;
                coefficient *= end_weight(*grid, target);
            }
            builder.add(j, coefficient);
        }
        builder.finish_row();
    }
    op.couplings_ = std::move(builder).build();
    op.finalize();
    return op;
}

DispersalOperator assemble_local(GridPtr grid, BoundaryCondition bc) {
    check_domain(*grid, bc);
    for (int a = 0; a < grid->dimension(); ++a) {
        if (grid->domain_axis_size(a) < 3) {
            throw Error(ErrorKind::too_few_nodes, "the Laplacian needs at least 3 nodes per axis");
        }
    }
    const double inv_h2 = 1.0 / (grid->spacing() * grid->spacing());
    const std::size_t n = grid->size();

    DispersalOperator op;
    op.kind_ = OperatorKind::local;
    op.bc_ = bc;
    op.grid_ = grid;
    op.active_.assign(n, 0);
    op.weights_.assign(n, 1.0);
    CsrBuilder builder(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool active = !grid->is_ghost(i) &&
                            !(bc == BoundaryCondition::dirichlet && grid->on_boundary(i));
        if (!active) {
            builder.finish_row();
            continue;
        }
        op.active_[i] = 1;
        const auto pos = grid->position(i);
        if (bc == BoundaryCondition::neumann) op.weights_[i] = end_weight(*grid, pos);
        for (int a = 0; a < grid->dimension(); ++a) {
            const auto last = static_cast<long>(grid->domain_axis_size(a)) - 1;
            for (long step : {-1L, 1L}) {
                auto target = pos;
                target[a] += step;
                double coefficient = inv_h2;
                if (bc == BoundaryCondition::neumann && (target[a] < 0 || target[a] > last)) {
                    continue;  // mirrored onto the opposite neighbour below
                }
                if (bc == BoundaryCondition::neumann) {
                    auto mirror = pos;
                    mirror[a] -= step;
                    if (mirror[a] < 0 || mirror[a] > last) coefficient *= 2.0;
                }
                builder.add(grid->node_at(target), coefficient);
            }
        }
        builder.finish_row();
    }
    op.couplings_ = std::move(builder).build();
    op.finalize();
    return op;
}

double consistency_error(const DispersalOperator& nonlocal, const DispersalOperator& local,
                         const Field& test_field) {
    if (nonlocal.kind() != OperatorKind::nonlocal || local.kind() != OperatorKind::local ||
        nonlocal.bc() != local.bc() || !(nonlocal.grid() == local.grid())) {
        throw Error(ErrorKind::mismatched_operators,
                    "consistency needs a nonlocal and a local operator on one grid and bc");
    }
    const Field a = nonlocal.apply(test_field);
    const Field b = local.apply(test_field);
    const Grid& grid = nonlocal.grid();
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!nonlocal.is_active(i) || !local.is_active(i)) continue;
        if (grid.distance_to_boundary(i) <= nonlocal.delta()) continue;
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

}  // namespace dispersal
