#include "dispersal/grid.hpp"

#include "dispersal/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

namespace dispersal {

Domain Domain::interval(double lower, double upper) {
    return box({lower}, {upper});
}

Domain Domain::box(std::vector<double> lower, std::vector<double> upper) {
    if (lower.size() != upper.size() || lower.empty() || lower.size() > 2) {
        throw Error(ErrorKind::invalid_argument, "box corners must have 1 or 2 matching components");
    }
    for (std::size_t a = 0; a < lower.size(); ++a) {
        if (!(upper[a] > lower[a])) {
            throw Error(ErrorKind::invalid_argument, "box upper corner must exceed lower corner");
        }
    }
    return Domain{DomainKind::bounded_box, std::move(lower), std::move(upper)};
}

Domain Domain::periodic(std::vector<double> periods) {
    if (periods.empty() || periods.size() > 2) {
        throw Error(ErrorKind::invalid_argument, "periodic cell must have 1 or 2 periods");
    }
    for (double p : periods) {
        if (!(p > 0.0)) throw Error(ErrorKind::invalid_argument, "periods must be positive");
    }
    return Domain{DomainKind::periodic_cell, std::vector<double>(periods.size(), 0.0),
                  std::move(periods)};
}

GridPtr build_grid(const Domain& domain, double h, double ghost_width) {
    if (!(h > 0.0)) throw Error(ErrorKind::invalid_argument, "grid spacing must be positive");
    if (ghost_width < 0.0) throw Error(ErrorKind::invalid_argument, "ghost width must be >= 0");

    auto grid = std::shared_ptr<Grid>(new Grid());
    grid->domain_ = domain;
    grid->spacing_ = h;
    if (!domain.is_periodic()) {
        grid->ghost_layers_ = static_cast<std::size_t>(std::ceil(ghost_width / h - 1e-9));
    }
    grid->size_ = 1;
    for (int a = 0; a < domain.dimension(); ++a) {
        const double cells = domain.extent(a) / h;
        const double rounded = std::round(cells);
        if (rounded < 1.0 || std::abs(cells - rounded) > 1e-12 * std::max(1.0, cells)) {
            throw Error(ErrorKind::incompatible_spacing,
                        "spacing " + std::to_string(h) + " does not divide extent " +
                            std::to_string(domain.extent(a)) + " on axis " + std::to_string(a));
        }
        auto count = static_cast<std::size_t>(rounded);
        if (!domain.is_periodic()) count += 1 + 2 * grid->ghost_layers_;
        grid->axis_size_[a] = count;
        grid->size_ *= count;
    }
    return grid;
}

std::size_t Grid::non_ghost_count() const noexcept {
    std::size_t n = 1;
    for (int a = 0; a < dimension(); ++a) n *= domain_axis_size(a);
    return n;
}

std::array<long, 2> Grid::position(std::size_t node) const {
    const auto g = static_cast<long>(ghost_layers_);
    std::array<long, 2> pos{0, 0};
    pos[0] = static_cast<long>(node % axis_size_[0]) - g;
    if (dimension() == 2) pos[1] = static_cast<long>(node / axis_size_[0]) - g;
    return pos;
}

std::size_t Grid::node_at(std::array<long, 2> pos) const {
    const auto g = static_cast<long>(ghost_layers_);
    std::size_t node = 0;
    std::size_t stride = 1;
    for (int a = 0; a < dimension(); ++a) {
        const auto n = static_cast<long>(axis_size_[a]);
        long i = pos[a] + g;
        if (domain_.is_periodic()) {
            i %= n;
            if (i < 0) i += n;
        } else if (i < 0 || i >= n) {
            return size_;
        }
        node += static_cast<std::size_t>(i) * stride;
        stride *= axis_size_[a];
    }
    return node;
}

double Grid::coordinate(std::size_t node, int axis) const {
    return domain_.lower.at(axis) + static_cast<double>(position(node)[axis]) * spacing_;
}

std::array<double, 2> Grid::point(std::size_t node) const {
    std::array<double, 2> x{0.0, 0.0};
    for (int a = 0; a < dimension(); ++a) x[a] = coordinate(node, a);
    return x;
}

bool Grid::is_ghost(std::size_t node) const {
    if (ghost_layers_ == 0) return false;
    const auto pos = position(node);
    for (int a = 0; a < dimension(); ++a) {
        const auto last = static_cast<long>(domain_axis_size(a)) - 1;
        if (pos[a] < 0 || pos[a] > last) return true;
    }
    return false;
}

bool Grid::on_boundary(std::size_t node) const {
    if (domain_.is_periodic() || is_ghost(node)) return false;
    const auto pos = position(node);
    for (int a = 0; a < dimension(); ++a) {
        const auto last = static_cast<long>(domain_axis_size(a)) - 1;
        if (pos[a] == 0 || pos[a] == last) return true;
    }
    return false;
}

double Grid::distance_to_boundary(std::size_t node) const {
    if (domain_.is_periodic()) return std::numeric_limits<double>::infinity();
    const auto pos = position(node);
    long steps = std::numeric_limits<long>::max();
    for (int a = 0; a < dimension(); ++a) {
        const auto last = static_cast<long>(domain_axis_size(a)) - 1;
        steps = std::min({steps, pos[a], last - pos[a]});
    }
    return static_cast<double>(steps) * spacing_;
}

bool Grid::operator==(const Grid& other) const noexcept {
    return domain_ == other.domain_ && spacing_ == other.spacing_ &&
           ghost_layers_ == other.ghost_layers_ && axis_size_ == other.axis_size_;
}

Field::Field(GridPtr grid, double time)
    : grid_(std::move(grid)), values_(grid_->size(), 0.0), time_(time) {}

Field::Field(GridPtr grid, std::vector<double> values, double time)
    : grid_(std::move(grid)), values_(std::move(values)), time_(time) {
    if (values_.size() != grid_->size()) {
        throw Error(ErrorKind::shape_mismatch, "field value count does not match grid node count");
    }
}

Field Field::sample(GridPtr grid, const std::function<double(std::span<const double>)>& f,
                    double time) {
    Field field(grid, time);
    const int dim = grid->dimension();
    for (std::size_t i = 0; i < grid->size(); ++i) {
        if (grid->is_ghost(i)) continue;
        const auto x = grid->point(i);
        field.values_[i] = f(std::span<const double>(x.data(), static_cast<std::size_t>(dim)));
    }
    return field;
}

Field Field::constant(GridPtr grid, double value, double time) {
    return sample(std::move(grid), [value](std::span<const double>) { return value; }, time);
}

namespace {

void require_same_grid(const Field& f, const Field& g) {
    if (!f.grid_ptr() || !g.grid_ptr() ||
        (f.grid_ptr() != g.grid_ptr() && !(f.grid() == g.grid()))) {
        throw Error(ErrorKind::grid_mismatch, "fields live on different grids");
    }
}

}  // namespace

double sup_distance(const Field& f, const Field& g) {
    require_same_grid(f, g);
    const Grid& grid = f.grid();
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.is_ghost(i)) continue;
        worst = std::max(worst, std::abs(f[i] - g[i]));
    }
    return worst;
}

double sup_norm(const Field& f) {
    const Grid& grid = f.grid();
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.is_ghost(i)) worst = std::max(worst, std::abs(f[i]));
    }
    return worst;
}

double min_value(const Field& f) {
    const Grid& grid = f.grid();
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.is_ghost(i)) lowest = std::min(lowest, f[i]);
    }
    return lowest;
}

void write_field_csv(std::ostream& out, const Field& field) {
    const Grid& grid = field.grid();
    out << (grid.dimension() == 1 ? "x,value\n" : "x,y,value\n");
    out << std::setprecision(17);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.is_ghost(i)) continue;
        for (int a = 0; a < grid.dimension(); ++a) out << grid.coordinate(i, a) << ',';
        out << field[i] << '\n';
    }
}

}  // namespace dispersal
