#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace dispersal {

enum class DomainKind { bounded_box, periodic_cell };

/// Axis-aligned box D (bounded) or the periodicity cell [0, p_1) x ... of a
/// spatially periodic problem on R^N.
struct Domain {
    DomainKind kind = DomainKind::bounded_box;
    std::vector<double> lower;
    std::vector<double> upper;

    static Domain interval(double lower, double upper);
    static Domain box(std::vector<double> lower, std::vector<double> upper);
    static Domain periodic(std::vector<double> periods);

    int dimension() const noexcept { return static_cast<int>(lower.size()); }
    double extent(int axis) const { return upper.at(axis) - lower.at(axis); }
    bool is_periodic() const noexcept { return kind == DomainKind::periodic_cell; }

    bool operator==(const Domain&) const = default;
};

/// Uniform isotropic mesh over a domain.
///
/// Bounded boxes carry nodes lower + i*h for i = 0..L/h on each axis, plus
/// `ghost_layers()` extra nodes beyond each face (the exterior band used by
/// the Dirichlet nonlocal problem). Periodic cells carry p/h nodes per axis;
/// the node at x = p is identified with x = 0 and not stored.
///
/// Nodes are numbered with axis 0 fastest.
class Grid {
public:
    int dimension() const noexcept { return domain_.dimension(); }
    const Domain& domain() const noexcept { return domain_; }
    double spacing() const noexcept { return spacing_; }
    std::size_t ghost_layers() const noexcept { return ghost_layers_; }
    double ghost_width() const noexcept { return static_cast<double>(ghost_layers_) * spacing_; }

    /// Total node count including ghosts.
    std::size_t size() const noexcept { return size_; }
    /// Nodes per axis including ghosts.
    std::size_t axis_size(int axis) const { return axis_size_.at(axis); }
    /// Nodes per axis inside the closed domain (or the periodic cell).
    std::size_t domain_axis_size(int axis) const { return axis_size_.at(axis) - 2 * ghost_layers_; }
    std::size_t non_ghost_count() const noexcept;

    /// Lattice position of a node relative to the domain's lower corner;
    /// ghost positions are negative or beyond the last domain node.
    std::array<long, 2> position(std::size_t node) const;
    /// Node at a lattice position, or size() when the position lies outside
    /// the stored nodes. Periodic positions are wrapped.
    std::size_t node_at(std::array<long, 2> position) const;

    double coordinate(std::size_t node, int axis) const;
    std::array<double, 2> point(std::size_t node) const;

    bool is_ghost(std::size_t node) const;
    /// True for nodes on the boundary of a bounded box.
    bool on_boundary(std::size_t node) const;
    /// Distance from a non-ghost node to the boundary (infinite for periodic cells).
    double distance_to_boundary(std::size_t node) const;

    bool operator==(const Grid& other) const noexcept;

private:
    friend std::shared_ptr<const Grid> build_grid(const Domain&, double, double);
    Grid() = default;

    Domain domain_;
    double spacing_ = 0.0;
    std::size_t ghost_layers_ = 0;
    std::array<std::size_t, 2> axis_size_{1, 1};
    std::size_t size_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds a grid of spacing h. For bounded boxes the ghost band holds
/// ceil(ghost_width / h) layers per face; periodic cells ignore ghost_width.
/// Throws Error(incompatible_spacing) when h does not divide an edge length
/// or period to within 1e-12 relative.
GridPtr build_grid(const Domain& domain, double h, double ghost_width = 0.0);

/// Nodal function values on a grid, stamped with a time.
class Field {
public:
    Field() = default;
    explicit Field(GridPtr grid, double time = 0.0);
    Field(GridPtr grid, std::vector<double> values, double time = 0.0);

    /// Samples f at every non-ghost node; ghost values are zero.
    static Field sample(GridPtr grid, const std::function<double(std::span<const double>)>& f,
                        double time = 0.0);
    static Field constant(GridPtr grid, double value, double time = 0.0);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::vector<double>& storage() noexcept { return values_; }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    double time() const noexcept { return time_; }
    void set_time(double t) noexcept { time_ = t; }

private:
    GridPtr grid_;
    std::vector<double> values_;
    double time_ = 0.0;
};

/// max over non-ghost nodes of |f - g|. Throws Error(grid_mismatch) if the
/// fields live on different grids.
double sup_distance(const Field& f, const Field& g);

/// max over non-ghost nodes of |f|.
double sup_norm(const Field& f);

/// Smallest value over non-ghost nodes.
double min_value(const Field& f);

/// CSV with header `x,value` (or `x,y,value`), one row per non-ghost node.
void write_field_csv(std::ostream& out, const Field& field);

}  // namespace dispersal
