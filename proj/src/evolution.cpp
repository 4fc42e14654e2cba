#include "dispersal/evolution.hpp"

#include "dispersal/error.hpp"
#include "dispersal/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace dispersal {

ReactionTerm ReactionTerm::none() { return {}; }

ReactionTerm ReactionTerm::linear(TimePeriodicCoefficient a) {
    ReactionTerm r;
    r.period = a.period;
    r.value = [a](double t, std::span<const double> x, double u) { return a(t, x) * u; };
    r.derivative = [a](double t, std::span<const double> x, double) { return a(t, x); };
    return r;
}

ReactionTerm ReactionTerm::kpp(GrowthRate f) {
    ReactionTerm r;
    r.period = f.base.period;
    r.value = [f](double t, std::span<const double> x, double u) { return u * f.f(t, x, u); };
    r.derivative = [f](double t, std::span<const double> x, double u) {
        return f.f(t, x, u) + u * f.df_du(t, x, u);
    };
    return r;
}

Integrator::Integrator(OperatorPtr op, ReactionTerm reaction, double dt, IntegratorOptions options)
    : op_(std::move(op)),
      reaction_(std::move(reaction)),
      dt_(dt),
      options_(options),
      solver_(*op_, 0.5 * dt, options.solver_tolerance) {
    if (!(dt > 0.0)) throw Error(ErrorKind::invalid_argument, "dt must be positive");
    const Grid& grid = op_->grid();
    const std::size_t n = grid.size();
    points_.resize(n);
    for (std::size_t i = 0; i < n; ++i) points_[i] = grid.point(i);
    explicit_.assign(n, 0.0);
    f0_.assign(n, 0.0);
    f1_.assign(n, 0.0);
    rhs_.assign(n, 0.0);
    stage_.assign(n, 0.0);
}

long Integrator::steps_for(double duration) const {
    const double ratio = duration / dt_;
    const double rounded = std::round(ratio);
    if (duration < 0.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw Error(ErrorKind::non_multiple_snapshot,
                    "time span " + std::to_string(duration) + " is not a multiple of dt " +
                        std::to_string(dt_));
    }
    return static_cast<long>(rounded);
}

void Integrator::reaction(double t, std::span<const double> u, std::span<double> out) const {
    const auto dim = static_cast<std::size_t>(op_->grid().dimension());
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = op_->is_active(i)
                     ? reaction_.value(t, std::span<const double>(points_[i].data(), dim), u[i])
                     : 0.0;
    }
}

// One step of size h. The implicit matrix is always I - (dt/2) A: a
// trapezoidal step of size dt, or an implicit Euler step of size dt/2.
void Integrator::step(std::span<double> u, double t, double h, bool implicit_euler) const {
    const std::size_t n = u.size();
    const double tau = 0.5 * dt_;
    if (implicit_euler) {
        std::copy(u.begin(), u.end(), explicit_.begin());
    } else {
        op_->apply(u, explicit_);
        for (std::size_t i = 0; i < n; ++i) explicit_[i] = u[i] + tau * explicit_[i];
    }
    if (reaction_.is_zero()) {
        solver_.solve(explicit_, u);
        return;
    }
    reaction(t, u, f0_);
    for (std::size_t i = 0; i < n; ++i) rhs_[i] = explicit_[i] + h * f0_[i];
    std::copy(u.begin(), u.end(), stage_.begin());
    solver_.solve(rhs_, stage_);
    reaction(t + h, stage_, f1_);
    for (std::size_t i = 0; i < n; ++i) rhs_[i] = explicit_[i] + 0.5 * h * (f0_[i] + f1_[i]);
    std::copy(stage_.begin(), stage_.end(), u.begin());
    solver_.solve(rhs_, u);
}

void Integrator::advance(std::span<double> u, double t, long steps,
                         const std::function<void(double, std::span<const double>)>& observer) const {
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!op_->is_active(i)) u[i] = 0.0;
    }
    for (long s = 0; s < steps; ++s) {
        const double t0 = t + static_cast<double>(s) * dt_;
        if (s < options_.smoothing_steps) {
            step(u, t0, 0.5 * dt_, true);
            step(u, t0 + 0.5 * dt_, 0.5 * dt_, true);
        } else {
            step(u, t0, dt_, false);
        }
        double norm = 0.0;
        for (double v : u) norm = std::max(norm, std::abs(v));
        if (!(norm <= options_.blow_up_threshold)) {
            throw Error(ErrorKind::blow_up, "solution norm exceeded " +
                                                std::to_string(options_.blow_up_threshold) +
                                                " at t = " + std::to_string(t0 + dt_));
        }
        if (observer) observer(t + static_cast<double>(s + 1) * dt_, u);
    }
}

Trajectory solve(const SemilinearProblem& problem, double dt,
                 const std::vector<double>& snapshot_times, IntegratorOptions options) {
    if (!problem.op) throw Error(ErrorKind::invalid_argument, "problem has no operator");
    if (problem.initial.grid_ptr() != problem.op->grid_ptr() &&
        !(problem.initial.grid() == problem.op->grid())) {
        throw Error(ErrorKind::grid_mismatch, "initial field is not on the operator's grid");
    }
    Integrator integrator(problem.op, problem.reaction, dt, options);

    std::vector<long> marks;
    for (double t : snapshot_times) {
        if (t < problem.start - 1e-12 || t > problem.end + 1e-12) {
            throw Error(ErrorKind::non_multiple_snapshot,
                        "snapshot time " + std::to_string(t) + " outside [start, end]");
        }
        marks.push_back(integrator.steps_for(t - problem.start));
    }
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

    Trajectory out;
    out.dt = dt;
    Field u = problem.initial;
    u.set_time(problem.start);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!problem.op->is_active(i)) u[i] = 0.0;
    }
    out.snapshots.push_back(u);
    const long total = marks.empty() ? 0 : marks.back();
    std::size_t next = (!marks.empty() && marks.front() == 0) ? 1 : 0;
    long done = 0;
    integrator.advance(u.values(), problem.start, total, [&](double t, std::span<const double> v) {
        ++done;
        if (next < marks.size() && done == marks[next]) {
            out.snapshots.emplace_back(u.grid_ptr(), std::vector<double>(v.begin(), v.end()), t);
            ++next;
        }
    });
    out.steps = done;
    return out;
}

bool check_comparison(const Trajectory& lower, const Trajectory& upper, double tol) {
    if (lower.snapshots.size() != upper.snapshots.size()) {
        throw Error(ErrorKind::shape_mismatch, "trajectories have different snapshot counts");
    }
    for (std::size_t s = 0; s < lower.snapshots.size(); ++s) {
        const Field& lo = lower.snapshots[s];
        const Field& up = upper.snapshots[s];
        if (!(lo.grid() == up.grid()) || std::abs(lo.time() - up.time()) > 1e-12) {
            throw Error(ErrorKind::shape_mismatch, "trajectories differ in grid or snapshot times");
        }
        const Grid& grid = lo.grid();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid.is_ghost(i)) continue;
            if (lo[i] > up[i] + tol) return false;
        }
    }
    return true;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
}

std::size_t initial_arity(std::string_view name) {
    if (name == "const" || name == "bump") return 1;
    if (name == "cosine" || name == "sine") return 3;
    throw Error(ErrorKind::config, "unknown initial data '" + std::string(name) + "'");
}

}  // namespace

InitialSpec InitialSpec::parse(std::string_view text) {
    // Same call syntax as the coefficient catalog.
    text = trim(text);
    const auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') {
        throw Error(ErrorKind::config,
                    "initial data must look like name(p1, ...): '" + std::string(text) + "'");
    }
    InitialSpec spec;
    spec.name = std::string(trim(text.substr(0, open)));
    std::string_view args = text.substr(open + 1, text.size() - open - 2);
    while (!trim(args).empty()) {
        const auto comma = args.find(',');
        spec.params.push_back(parse_scalar(args.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        args.remove_prefix(comma + 1);
    }
    if (spec.params.size() != initial_arity(spec.name)) {
        throw Error(ErrorKind::config, "initial data '" + spec.name + "' expects " +
                                           std::to_string(initial_arity(spec.name)) +
                                           " parameters");
    }
    return spec;
}

std::string InitialSpec::to_string() const {
    std::ostringstream out;
    out.precision(17);
    out << name << '(';
    for (std::size_t i = 0; i < params.size(); ++i) out << (i ? ", " : "") << params[i];
    out << ')';
    return out.str();
}

Field InitialSpec::sample(const GridPtr& grid) const {
    initial_arity(name);
    const auto& p = params;
    const Domain& d = grid->domain();
    if (name == "const") return Field::constant(grid, p[0]);
    if (name == "cosine") {
        return Field::sample(grid, [&](std::span<const double> x) {
            return p[0] + p[1] * std::cos(p[2] * x[0]);
        });
    }
    if (name == "sine") {
        return Field::sample(grid, [&](std::span<const double> x) {
            return p[0] + p[1] * std::sin(p[2] * x[0]);
        });
    }
    return Field::sample(grid, [&](std::span<const double> x) {
        double v = p[0];
        for (std::size_t a = 0; a < x.size(); ++a) {
            const double s = (x[a] - d.lower[a]) * (d.upper[a] - x[a]);
            v *= s * s;
        }
        return v;
    });
}

void SweepSetup::validate() const {
    if (deltas.empty()) throw Error(ErrorKind::invalid_argument, "deltas must not be empty");
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        if (!(deltas[k] > 0.0)) throw Error(ErrorKind::invalid_argument, "deltas must be positive");
        if (k > 0 && !(deltas[k] < deltas[k - 1])) {
            throw Error(ErrorKind::invalid_argument, "deltas must be strictly decreasing");
        }
    }
    if (!(h > 0.0) || h > deltas.back() / 8.0 * (1.0 + 1e-12)) {
        throw Error(ErrorKind::invalid_argument,
                    "h = " + std::to_string(h) + " violates h <= min(deltas)/8 = " +
                        std::to_string(deltas.back() / 8.0));
    }
    if (!(dt > 0.0)) throw Error(ErrorKind::invalid_argument, "dt must be positive");
    if (domain.is_periodic() != (bc == BoundaryCondition::periodic)) {
        throw Error(ErrorKind::invalid_argument, "boundary condition does not match the domain");
    }
}

GridPtr SweepSetup::make_grid() const {
    const double ghost = bc == BoundaryCondition::dirichlet
                             ? *std::max_element(deltas.begin(), deltas.end())
                             : 0.0;
    return build_grid(domain, h, ghost);
}

ConvergenceReport theorem_a_experiment(const SweepSetup& setup, const ReactionTerm& reaction,
                                       const InitialSpec& initial, double duration) {
    setup.validate();
    const GridPtr grid = setup.make_grid();
    const Field u0 = initial.sample(grid);
    const auto profile = KernelProfile::make(setup.kernel, grid->dimension());

    // Every step of [0, duration] is recorded so the sup over t is taken on
    // the full time lattice.
    const auto history = [&](const OperatorPtr& op) {
        Integrator integrator(op, reaction, setup.dt, setup.integrator);
        const long steps = integrator.steps_for(duration);
        std::vector<std::vector<double>> states;
        states.reserve(static_cast<std::size_t>(steps) + 1);
        std::vector<double> u(u0.values().begin(), u0.values().end());
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (!op->is_active(i)) u[i] = 0.0;
        }
        states.push_back(u);
        integrator.advance(u, 0.0, steps, [&](double, std::span<const double> v) {
            states.emplace_back(v.begin(), v.end());
        });
        return states;
    };

    const auto local = history(std::make_shared<const DispersalOperator>(
        assemble_local(grid, setup.bc)));

    ConvergenceReport report;
    report.deltas = setup.deltas;
    report.errors.assign(setup.deltas.size(), 0.0);
    parallel_for(setup.deltas.size(), setup.jobs, [&](std::size_t k) {
        const auto op = std::make_shared<const DispersalOperator>(
            assemble_nonlocal(grid, profile, setup.deltas[k], setup.bc, setup.scaling));
        const auto nonlocal = history(op);
        double worst = 0.0;
        for (std::size_t s = 0; s < nonlocal.size(); ++s) {
            for (std::size_t i = 0; i < grid->size(); ++i) {
                if (grid->is_ghost(i)) continue;
                worst = std::max(worst, std::abs(nonlocal[s][i] - local[s][i]));
            }
        }
        report.errors[k] = worst;
    });
    return report;
}

}  // namespace dispersal
