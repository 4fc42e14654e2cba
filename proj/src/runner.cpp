#include "dispersal/runner.hpp"

#include "dispersal/error.hpp"
#include "dispersal/kpp.hpp"
#include "dispersal/spectral.hpp"

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace dispersal {

namespace fs = std::filesystem;

int exit_status_for(const Error& e) {
    return is_numerical_failure(e.kind()) ? exit_numerical : exit_invalid;
}

namespace {

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::config, "config key 'output': cannot write " + path.string());
    return out;
}

// Two-column plot data along the first axis (1D grids only; the CSV has the full field).
void write_profile_dat(const fs::path& path, const Field& field) {
    const Grid& grid = field.grid();
    if (grid.dimension() != 1) return;
    auto out = open_output(path);
    out << std::setprecision(17);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.is_ghost(i)) out << grid.coordinate(i, 0) << ' ' << field[i] << '\n';
    }
}

void write_gaps_dat(const fs::path& path, const ConvergenceReport& report) {
    auto out = open_output(path);
    out << std::setprecision(17);
    for (std::size_t k = 0; k < report.deltas.size(); ++k) {
        out << report.deltas[k] << ' ' << report.errors[k] << '\n';
    }
}

struct Context {
    const ExperimentConfig& config;
    fs::path dir;
    int jobs;
    std::ostringstream results;  // appended to run.txt
};

struct SingleOperator {
    OperatorPtr op;
    std::optional<double> moment_constant;
};

SingleOperator build_operator(const Context& ctx) {
    const auto& c = ctx.config;
    SingleOperator s;
    if (c.operator_kind == OperatorKind::local) {
        s.op = std::make_shared<const DispersalOperator>(assemble_local(build_grid(c.domain, c.h), c.bc));
    } else {
        const double ghost = c.bc == BoundaryCondition::dirichlet ? *c.delta : 0.0;
        const GridPtr grid = build_grid(c.domain, c.h, ghost);
        const auto profile = KernelProfile::make(c.kernel, grid->dimension());
        s.op = std::make_shared<const DispersalOperator>(
            assemble_nonlocal(grid, profile, *c.delta, c.bc, c.moment));
        s.moment_constant = profile.moment_constant();
    }
    if (c.dump_operator) {
        auto out = open_output(ctx.dir / "operator.coo");
        write_coordinate_list(out, s.op->matrix());
    }
    return s;
}

void run_simulate(Context& ctx) {
    const auto& c = ctx.config;
    const SingleOperator s = build_operator(ctx);
    SemilinearProblem problem{s.op, c.reaction.build(c.period), c.initial->sample(s.op->grid_ptr()),
                              0.0, *c.duration};
    const long total = Integrator(s.op, ReactionTerm::none(), c.dt).steps_for(*c.duration);
    const long stride = c.output_every.value_or(total);
    if (stride < 1) throw Error(ErrorKind::config, "config key 'output_every': must be positive");
    std::vector<double> times;
    for (long k = stride; k <= total; k += stride) times.push_back(static_cast<double>(k) * c.dt);
    if (times.empty() || times.back() != *c.duration) times.push_back(*c.duration);

    IntegratorOptions options;
    const Trajectory traj = solve(problem, c.dt, times, options);

    auto out = open_output(ctx.dir / "trajectory.csv");
    const Grid& grid = s.op->grid();
    out << (grid.dimension() == 1 ? "t,x,value\n" : "t,x,y,value\n") << std::setprecision(17);
    for (const Field& snap : traj.snapshots) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid.is_ghost(i)) continue;
            out << snap.time() << ',';
            for (int a = 0; a < grid.dimension(); ++a) out << grid.coordinate(i, a) << ',';
            out << snap[i] << '\n';
        }
    }
    const Field& last = traj.snapshots.back();
    write_profile_dat(ctx.dir / "final.dat", last);
    ctx.results << "steps = " << traj.steps << '\n'
                << "final_sup = " << sup_norm(last) << '\n'
                << "final_min = " << min_value(last) << '\n';
}

void run_spectrum(Context& ctx) {
    const auto& c = ctx.config;
    const SingleOperator s = build_operator(ctx);
    const PeriodMap map(s.op, c.coefficient->build(c.period), c.dt, s.moment_constant);
    PowerIterationOptions options;
    options.tol = c.spectrum_tol();
    options.max_iters = c.max_iters;
    const SpectrumResult r = principal_value(map, options);

    auto out = open_output(ctx.dir / "spectrum.csv");
    out << "lambda,iterations,residual,pev_criterion\n" << std::setprecision(17);
    out << r.lambda << ',' << r.iterations << ',' << r.residual << ',';
    if (r.is_principal_eigenvalue) out << (*r.is_principal_eigenvalue ? 1 : 0);
    out << '\n';
    auto ef = open_output(ctx.dir / "eigenfunction.csv");
    write_field_csv(ef, r.eigenfunction);
    write_profile_dat(ctx.dir / "eigenfunction.dat", r.eigenfunction);

    ctx.results << "lambda = " << r.lambda << '\n' << "iterations = " << r.iterations << '\n';
    if (r.is_principal_eigenvalue) {
        ctx.results << "pev_criterion = " << (*r.is_principal_eigenvalue ? "true" : "false") << '\n';
    }
}

OrbitOptions orbit_options(const ExperimentConfig& c) {
    OrbitOptions o;
    o.tol = c.orbit_tol();
    o.max_periods = c.max_periods;
    o.snapshots = c.snapshots;
    o.spectrum.max_iters = c.max_iters;
    return o;
}

void run_kpp_orbit(Context& ctx) {
    const auto& c = ctx.config;
    const SingleOperator s = build_operator(ctx);
    KPPProblem problem;
    problem.op = s.op;
    problem.growth = build_growth(*c.growth, c.period);
    problem.dt = c.dt;
    problem.moment_constant = s.moment_constant;
    const PeriodicOrbit orbit = positive_periodic_solution(problem, orbit_options(c));

    auto out = open_output(ctx.dir / "orbit.csv");
    write_orbit_csv(out, orbit);
    write_profile_dat(ctx.dir / "orbit_t0.dat", orbit.snapshots.front());
    ctx.results << "h2_lambda = " << orbit.h2_lambda << '\n'
                << "super_level = " << orbit.super_level << '\n'
                << "super_periods = " << orbit.super_periods << '\n'
                << "sub_periods = " << orbit.sub_periods << '\n'
                << "periodicity_residual = " << orbit.periodicity_residual << '\n'
                << "start_gap = " << orbit.start_gap << '\n'
                << "sandwich_holds = " << (orbit.sandwich_holds() ? "true" : "false") << '\n';
}

void report_orders(Context& ctx, const ConvergenceReport& r) {
    ctx.results << "strictly_decreasing = " << (r.strictly_decreasing() ? "true" : "false") << '\n';
    if (const auto p = r.min_order()) ctx.results << "min_order = " << *p << '\n';
}

void run_converge_a(Context& ctx) {
    const auto& c = ctx.config;
    const ConvergenceReport r = theorem_a_experiment(c.sweep(ctx.jobs), c.reaction.build(c.period),
                                                     *c.initial, *c.duration);
    auto out = open_output(ctx.dir / "convergence.csv");
    write_convergence_csv(out, r);
    write_gaps_dat(ctx.dir / "convergence.dat", r);
    report_orders(ctx, r);
}

void run_converge_b(Context& ctx) {
    const auto& c = ctx.config;
    PowerIterationOptions options;
    options.tol = c.spectrum_tol();
    options.max_iters = c.max_iters;
    const SpectrumReport r =
        theorem_b_experiment(c.sweep(ctx.jobs), c.coefficient->build(c.period), options);
    auto out = open_output(ctx.dir / "spectrum_report.csv");
    write_spectrum_csv(out, r);
    write_gaps_dat(ctx.dir / "gaps.dat", r.gaps());
    ctx.results << "lambda_r = " << r.lambda_r << '\n';
    report_orders(ctx, r.gaps());
}

void run_converge_c(Context& ctx) {
    const auto& c = ctx.config;
    const OrbitReport r = theorem_c_experiment(c.sweep(ctx.jobs), *c.growth, c.period, orbit_options(c));
    auto out = open_output(ctx.dir / "orbit_report.csv");
    write_orbit_report_csv(out, r);
    write_gaps_dat(ctx.dir / "gaps.dat", r.gaps());
    ctx.results << "h2_lambda = " << r.h2_lambda << '\n'
                << "local_sandwich_holds = " << (r.local_sandwich_holds ? "true" : "false") << '\n'
                << "local_starts_agree = " << (r.local_starts_agree ? "true" : "false") << '\n';
    for (const auto& row : r.rows) {
        if (!row.h2_delta_ok) {
            ctx.results << "# invasion condition fails at delta = " << row.delta << ", lambda = "
                        << row.h2_delta_lambda << '\n';
        }
    }
    report_orders(ctx, r.gaps());
}

}  // namespace

int run(const ExperimentConfig& config, const fs::path& out_dir, int jobs, std::ostream& log) {
    Context ctx{config, out_dir, std::max(1, jobs), {}};
    ctx.results << std::setprecision(17);
    int status = exit_ok;
    std::string message;
    try {
        config.validate();
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw Error(ErrorKind::config, "config key 'output': " + ec.message());
        switch (config.experiment) {
            case Experiment::simulate: run_simulate(ctx); break;
            case Experiment::spectrum: run_spectrum(ctx); break;
            case Experiment::kpp_orbit: run_kpp_orbit(ctx); break;
            case Experiment::converge_a: run_converge_a(ctx); break;
            case Experiment::converge_b: run_converge_b(ctx); break;
            case Experiment::converge_c: run_converge_c(ctx); break;
        }
    } catch (const Error& e) {
        status = exit_status_for(e);
        message = std::string(to_string(e.kind())) + ": " + e.what();
    } catch (const std::exception& e) {
        status = exit_numerical;
        message = e.what();
    }
    if (!message.empty()) log << "error: " << message << '\n';

    // The summary is written even on failure so the record stays complete.
    std::ofstream summary(out_dir / "run.txt");
    if (summary) {
        summary << config.echo() << "\n# results\n";
        summary << "status = " << status << '\n';
        if (!message.empty()) summary << "# " << message << '\n';
        summary << ctx.results.str();
    }
    if (status == exit_ok) log << ctx.results.str();
    return status;
}

int run_file(std::string_view subcommand, const std::string& config_path, const std::string& out_dir,
             int jobs, std::ostream& log) {
    try {
        ExperimentConfig config = ExperimentConfig::load(config_path);
        if (to_string(config.experiment) != subcommand) {
            throw Error(ErrorKind::config, "config key 'experiment': file declares '" +
                                               std::string(to_string(config.experiment)) +
                                               "' but the subcommand is '" + std::string(subcommand) + "'");
        }
        if (!out_dir.empty()) config.output = out_dir;
        return run(config, config.output, jobs, log);
    } catch (const Error& e) {
        log << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_status_for(e);
    }
}

}  // namespace dispersal
