#include "dispersal/kpp.hpp"

#include "dispersal/error.hpp"
#include "dispersal/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

namespace dispersal {

H2Check verify_h2(const KPPProblem& problem, const PowerIterationOptions& options) {
    const PeriodMap map(problem.op, problem.growth.base, problem.dt, problem.moment_constant,
                        problem.integrator);
    H2Check check;
    check.spectrum = principal_value(map, options);
    check.lambda = check.spectrum.lambda;
    check.holds = check.lambda > 0.0;
    return check;
}

double super_solution_level(const KPPProblem& problem) {
    const Grid& grid = problem.op->grid();
    const auto dim = static_cast<std::size_t>(grid.dimension());
    const double period = problem.period();
    for (double level = 1.0; level <= std::ldexp(1.0, 40); level *= 2.0) {
        bool negative = true;
        for (int k = 0; k < 64 && negative; ++k) {
            const double t = period * k / 64.0;
            for (std::size_t i = 0; i < grid.size() && negative; ++i) {
                if (grid.is_ghost(i)) continue;
                const auto x = grid.point(i);
                negative = problem.growth.f(t, std::span<const double>(x.data(), dim), level) < 0.0;
            }
        }
        if (negative) return level;
    }
    throw Error(ErrorKind::invalid_argument, "no constant super-solution below 2^40");
}

namespace {

struct Limit {
    std::vector<double> state;
    int periods = 0;
    double violation = 0.0;
    double residual = 0.0;
};

// Iterates u <- U(T) u until ||U(T) u - u|| < tol. `direction` is -1 for a
// nonincreasing sequence (super start) and +1 for a nondecreasing one.
Limit iterate_to_limit(const Integrator& integrator, long steps, std::vector<double> u,
                       int direction, const OrbitOptions& options) {
    Limit out;
    std::vector<double> next(u.size());
    for (int p = 1; p <= options.max_periods; ++p) {
        next = u;
        integrator.advance(next, 0.0, steps);
        double change = 0.0;
        double size = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double d = next[i] - u[i];
            change = std::max(change, std::abs(d));
            size = std::max(size, std::abs(next[i]));
            out.violation = std::max(out.violation, direction < 0 ? d : -d);
        }
        if (size < 1e-12) {
            throw Error(ErrorKind::collapsed_to_zero, "periodic iteration collapsed to zero");
        }
        u.swap(next);
        if (change < options.tol) {
            out.state = std::move(u);
            out.periods = p;
            out.residual = change;
            return out;
        }
    }
    throw Error(ErrorKind::no_convergence, "periodic iteration did not converge in " +
                                               std::to_string(options.max_periods) + " periods");
}

}  // namespace

PeriodicOrbit positive_periodic_solution(const KPPProblem& problem, const OrbitOptions& options) {
    const H2Check h2 = verify_h2(problem, options.spectrum);
    if (!h2.holds) {
        throw Error(ErrorKind::invasion_condition_failed,
                    "principal value of f(t, x, 0) is not positive: " + std::to_string(h2.lambda));
    }
    const Integrator integrator(problem.op, ReactionTerm::kpp(problem.growth), problem.dt,
                                problem.integrator);
    const long steps = integrator.steps_for(problem.period());
    if (options.snapshots < 1 || steps % options.snapshots != 0) {
        throw Error(ErrorKind::non_multiple_snapshot,
                    "a period of " + std::to_string(steps) + " steps does not split into " +
                        std::to_string(options.snapshots) + " snapshots");
    }
    const DispersalOperator& op = *problem.op;
    const std::size_t n = op.grid().size();

    PeriodicOrbit orbit;
    orbit.h2_lambda = h2.lambda;
    orbit.super_level = super_solution_level(problem);

    std::vector<double> upper(n, 0.0);
    std::vector<double> lower(n, 0.0);
    const auto& phi = h2.spectrum.eigenfunction;
    for (std::size_t i = 0; i < n; ++i) {
        if (!op.is_active(i)) continue;
        upper[i] = orbit.super_level;
        lower[i] = options.sub_amplitude * phi[i];
    }
    const Limit from_above = iterate_to_limit(integrator, steps, std::move(upper), -1, options);
    const Limit from_below = iterate_to_limit(integrator, steps, std::move(lower), +1, options);
    orbit.super_periods = from_above.periods;
    orbit.sub_periods = from_below.periods;
    orbit.super_monotonicity_violation = from_above.violation;
    orbit.sub_monotonicity_violation = from_below.violation;
    orbit.periodicity_residual = from_above.residual;
    for (std::size_t i = 0; i < n; ++i) {
        orbit.start_gap = std::max(orbit.start_gap,
                                   std::abs(from_above.state[i] - from_below.state[i]));
    }

    const GridPtr& grid = op.grid_ptr();
    const long stride = steps / options.snapshots;
    std::vector<double> u = from_above.state;
    orbit.snapshots.emplace_back(grid, u, 0.0);
    long done = 0;
    integrator.advance(u, 0.0, steps - stride, [&](double t, std::span<const double> v) {
        if (++done % stride == 0) {
            orbit.snapshots.emplace_back(grid, std::vector<double>(v.begin(), v.end()), t);
        }
    });
    return orbit;
}

double stability_deviation(const KPPProblem& problem, const PeriodicOrbit& orbit, double fraction,
                           int periods) {
    const Integrator integrator(problem.op, ReactionTerm::kpp(problem.growth), problem.dt,
                                problem.integrator);
    const long steps = integrator.steps_for(problem.period());
    const Field& base = orbit.snapshots.front();
    double worst = 0.0;
    for (double factor : {1.0 + fraction, 1.0 - fraction}) {
        std::vector<double> u(base.values().begin(), base.values().end());
        for (double& v : u) v *= factor;
        for (int p = 0; p < periods; ++p) integrator.advance(u, 0.0, steps);
        for (std::size_t i = 0; i < u.size(); ++i) worst = std::max(worst, std::abs(u[i] - base[i]));
    }
    return worst;
}

ConvergenceReport OrbitReport::gaps() const {
    ConvergenceReport r;
    for (const auto& row : rows) {
        r.deltas.push_back(row.delta);
        r.errors.push_back(row.sup_gap);
    }
    return r;
}

OrbitReport theorem_c_experiment(const SweepSetup& setup, const GrowthSpec& growth, double period,
                                 const OrbitOptions& options) {
    setup.validate();
    const GridPtr grid = setup.make_grid();
    const auto profile = KernelProfile::make(setup.kernel, grid->dimension());
    const GrowthRate f = build_growth(growth, period);

    const auto problem_for = [&](OperatorPtr op) {
        KPPProblem p;
        p.op = std::move(op);
        p.growth = f;
        p.dt = setup.dt;
        p.integrator = setup.integrator;
        if (p.op->kind() == OperatorKind::nonlocal) p.moment_constant = profile.moment_constant();
        return p;
    };

    OrbitReport report;
    report.rows.resize(setup.deltas.size());
    std::vector<std::optional<PeriodicOrbit>> orbits(setup.deltas.size() + 1);
    std::vector<double> lambdas(setup.deltas.size() + 1, 0.0);
    parallel_for(orbits.size(), setup.jobs, [&](std::size_t k) {
        OperatorPtr op = k == 0 ? std::make_shared<const DispersalOperator>(
                                      assemble_local(grid, setup.bc))
                                : std::make_shared<const DispersalOperator>(assemble_nonlocal(
                                      grid, profile, setup.deltas[k - 1], setup.bc, setup.scaling));
        const KPPProblem problem = problem_for(std::move(op));
        try {
            orbits[k] = positive_periodic_solution(problem, options);
            lambdas[k] = orbits[k]->h2_lambda;
        } catch (const Error& e) {
            // A failed nonlocal invasion condition is a reportable outcome of the sweep.
            if (k == 0 || e.kind() != ErrorKind::invasion_condition_failed) throw;
            lambdas[k] = verify_h2(problem, options.spectrum).lambda;
        }
    });

    const PeriodicOrbit& local = *orbits[0];
    report.h2_lambda = local.h2_lambda;
    report.local_sandwich_holds = local.sandwich_holds();
    report.local_starts_agree = local.starts_agree(options.tol);
    for (std::size_t k = 0; k < setup.deltas.size(); ++k) {
        OrbitRow& row = report.rows[k];
        row.delta = setup.deltas[k];
        row.h2_delta_lambda = lambdas[k + 1];
        row.h2_delta_ok = orbits[k + 1].has_value();
        if (!row.h2_delta_ok) {
            row.sup_gap = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const PeriodicOrbit& orbit = *orbits[k + 1];
        row.sandwich_holds = orbit.sandwich_holds();
        row.starts_agree = orbit.starts_agree(options.tol);
        for (std::size_t s = 0; s < orbit.snapshots.size(); ++s) {
            row.sup_gap = std::max(row.sup_gap, sup_distance(orbit.snapshots[s], local.snapshots[s]));
        }
    }
    return report;
}

void write_orbit_report_csv(std::ostream& out, const OrbitReport& report) {
    out << "delta,sup_gap,h2_delta_lambda,h2_delta_ok\n" << std::setprecision(17);
    for (const auto& row : report.rows) {
        out << row.delta << ',' << row.sup_gap << ',' << row.h2_delta_lambda << ','
            << (row.h2_delta_ok ? 1 : 0) << '\n';
    }
}

void write_orbit_csv(std::ostream& out, const PeriodicOrbit& orbit) {
    if (orbit.snapshots.empty()) return;
    const Grid& grid = orbit.snapshots.front().grid();
    out << (grid.dimension() == 1 ? "t,x,value\n" : "t,x,y,value\n") << std::setprecision(17);
    for (const Field& snap : orbit.snapshots) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid.is_ghost(i)) continue;
            out << snap.time() << ',';
            for (int a = 0; a < grid.dimension(); ++a) out << grid.coordinate(i, a) << ',';
            out << snap[i] << '\n';
        }
    }
}

}  // namespace dispersal
