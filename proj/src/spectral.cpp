#include "dispersal/spectral.hpp"

#include "dispersal/error.hpp"
#include "dispersal/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

namespace dispersal {

PeriodMap::PeriodMap(OperatorPtr op, TimePeriodicCoefficient a, double dt,
                     std::optional<double> moment_constant, IntegratorOptions options)
    : op_(op),
      a_(a),
      moment_constant_(moment_constant),
      integrator_(std::move(op), ReactionTerm::linear(a), dt, options),
      steps_(integrator_.steps_for(a.period)) {}

void PeriodMap::apply_in_place(std::span<double> u) const { integrator_.advance(u, 0.0, steps_); }

Field PeriodMap::apply(const Field& u0) const {
    Field u = u0;
    apply_in_place(u.values());
    u.set_time(u0.time() + period());
    return u;
}

namespace {

Field default_start(const DispersalOperator& op) {
    const GridPtr& grid = op.grid_ptr();
    if (op.bc() != BoundaryCondition::dirichlet) return Field::constant(grid, 1.0);
    const Domain& d = grid->domain();
    return Field::sample(grid, [&](std::span<const double> x) {
        double v = 1.0;
        for (std::size_t a = 0; a < x.size(); ++a) {
            v *= std::sin(std::numbers::pi * (x[a] - d.lower[a]) / d.extent(static_cast<int>(a)));
        }
        return std::max(v, 0.0);
    });
}

double active_sup(const DispersalOperator& op, std::span<const double> u) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (op.is_active(i)) m = std::max(m, std::abs(u[i]));
    }
    return m;
}

}  // namespace

SpectrumResult principal_value(const PeriodMap& map, const PowerIterationOptions& options) {
    const DispersalOperator& op = map.op();
    Field u = options.start ? *options.start : default_start(op);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!op.is_active(i)) u[i] = 0.0;
    }
    const double start_norm = active_sup(op, u.values());
    if (!(start_norm > 0.0)) throw Error(ErrorKind::invalid_argument, "start vector is zero");
    for (double& v : u.values()) v /= start_norm;

    std::vector<double> image(u.size());
    double previous = std::numeric_limits<double>::quiet_NaN();
    double ratio = 0.0;
    for (int k = 1; k <= options.max_iters; ++k) {
        std::copy(u.values().begin(), u.values().end(), image.begin());
        map.apply_in_place(image);
        ratio = active_sup(op, image);
        if (!(ratio > 0.0)) {
            throw Error(ErrorKind::no_convergence, "period map annihilated the iterate");
        }
        double residual = 0.0;
        for (std::size_t i = 0; i < image.size(); ++i) {
            residual = std::max(residual, std::abs(image[i] - ratio * u[i]));
        }
        if (std::abs(ratio - previous) < options.tol && residual <= options.tol) {
            SpectrumResult result;
            result.lambda = std::log(ratio) / map.period();
            result.eigenfunction = u;
            result.iterations = k;
            result.residual = residual;
            if (op.kind() == OperatorKind::nonlocal && map.moment_constant()) {
                result.is_principal_eigenvalue =
                    pev_criterion(map, result.lambda, *map.moment_constant(), op.delta());
            }
            return result;
        }
        previous = ratio;
        for (std::size_t i = 0; i < image.size(); ++i) u[i] = image[i] / ratio;
    }
    throw Error(ErrorKind::no_convergence,
                "power iteration did not converge in " + std::to_string(options.max_iters) +
                    " iterations; last ratio " + std::to_string(ratio));
}

double pev_threshold(const PeriodMap& map, double moment_constant, double delta) {
    const Grid& grid = map.op().grid();
    const auto dim = static_cast<std::size_t>(grid.dimension());
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.is_ghost(i)) continue;
        const auto x = grid.point(i);
        worst = std::max(worst, map.coefficient().time_average(std::span<const double>(x.data(), dim)));
    }
    return -moment_constant / (delta * delta) + worst;
}

bool pev_criterion(const PeriodMap& map, double lambda, double moment_constant, double delta) {
    return lambda > pev_threshold(map, moment_constant, delta);
}

double coefficient_distance(const TimePeriodicCoefficient& a1, const TimePeriodicCoefficient& a2,
                            const Grid& grid) {
    if (std::abs(a1.period - a2.period) > 1e-15 * a1.period) {
        throw Error(ErrorKind::invalid_argument, "coefficients have different periods");
    }
    const auto dim = static_cast<std::size_t>(grid.dimension());
    constexpr int samples = 512;
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double t = a1.period * k / samples;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid.is_ghost(i)) continue;
            const auto x = grid.point(i);
            const std::span<const double> xs(x.data(), dim);
            worst = std::max(worst, std::abs(a1(t, xs) - a2(t, xs)));
        }
    }
    return worst;
}

PerturbationCheck perturbation_check(const PeriodMap& map1, const PeriodMap& map2, double tol,
                                     const PowerIterationOptions& options) {
    if (map1.op().kind() != map2.op().kind() || map1.op().bc() != map2.op().bc() ||
        !(map1.op().grid() == map2.op().grid())) {
        throw Error(ErrorKind::mismatched_operators, "period maps differ in kind, bc or grid");
    }
    PerturbationCheck check;
    check.lambda1 = principal_value(map1, options).lambda;
    check.lambda2 = principal_value(map2, options).lambda;
    check.coefficient_distance =
        coefficient_distance(map1.coefficient(), map2.coefficient(), map1.op().grid());
    check.holds = std::abs(check.lambda1 - check.lambda2) <= check.coefficient_distance + tol;
    return check;
}

ConvergenceReport SpectrumReport::gaps() const {
    ConvergenceReport r;
    for (const auto& row : rows) {
        r.deltas.push_back(row.delta);
        r.errors.push_back(row.abs_gap);
    }
    return r;
}

SpectrumReport theorem_b_experiment(const SweepSetup& setup, const TimePeriodicCoefficient& a,
                                    const PowerIterationOptions& options) {
    setup.validate();
    const GridPtr grid = setup.make_grid();
    const auto profile = KernelProfile::make(setup.kernel, grid->dimension());

    SpectrumReport report;
    report.rows.resize(setup.deltas.size());
    // Slot 0 is the Laplacian; slots 1.. the nonlocal maps.
    std::vector<SpectrumResult> results(setup.deltas.size() + 1);
    parallel_for(results.size(), setup.jobs, [&](std::size_t k) {
        if (k == 0) {
            const PeriodMap map(std::make_shared<const DispersalOperator>(
                                    assemble_local(grid, setup.bc)),
                                a, setup.dt, std::nullopt, setup.integrator);
            results[0] = principal_value(map, options);
            return;
        }
        const double delta = setup.deltas[k - 1];
        const PeriodMap map(std::make_shared<const DispersalOperator>(
                                assemble_nonlocal(grid, profile, delta, setup.bc, setup.scaling)),
                            a, setup.dt, profile.moment_constant(), setup.integrator);
        results[k] = principal_value(map, options);
    });
    report.lambda_r = results[0].lambda;
    for (std::size_t k = 0; k < setup.deltas.size(); ++k) {
        auto& row = report.rows[k];
        row.delta = setup.deltas[k];
        row.lambda_delta = results[k + 1].lambda;
        row.lambda_r = report.lambda_r;
        row.abs_gap = std::abs(row.lambda_delta - row.lambda_r);
        row.pev_criterion = results[k + 1].is_principal_eigenvalue.value_or(false);
    }
    return report;
}

void write_spectrum_csv(std::ostream& out, const SpectrumReport& report) {
    out << "delta,lambda_delta,lambda_r,abs_gap,pev_criterion\n" << std::setprecision(17);
    for (const auto& row : report.rows) {
        out << row.delta << ',' << row.lambda_delta << ',' << row.lambda_r << ',' << row.abs_gap
            << ',' << (row.pev_criterion ? 1 : 0) << '\n';
    }
}

}  // namespace dispersal
