// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include "dispersal/error.hpp"
#include "dispersal/evolution.hpp"
#include "dispersal/kernels.hpp"
#include "dispersal/kpp.hpp"
#include "dispersal/operators.hpp"
#include "dispersal/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace dispersal;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

// Positivity is tracked across every run whose data start nonnegative.
double positivity_floor = 0.0;

void note_positive(const Field& u) { positivity_floor = std::min(positivity_floor, min_value(u)); }

const KernelProfile& quartic1() {
    static const auto p = KernelProfile::make(KernelFamily::quartic_polynomial, 1);
    return p;
}

OperatorPtr share(DispersalOperator op) { return std::make_shared<const DispersalOperator>(std::move(op)); }

TimePeriodicCoefficient coef(const std::string& text) { return CoefficientSpec::parse(text).build(1.0); }

std::string orders(const ConvergenceReport& r) {
    std::ostringstream s;
    s.precision(3);
    for (std::size_t k = 0; k < r.errors.size(); ++k) s << (k ? " " : "") << r.errors[k];
    if (const auto p = r.min_order()) s << " order " << *p;
    return s.str();
}

std::string gaps(const ConvergenceReport& r) {
    std::ostringstream s;
    s.precision(3);
    for (std::size_t k = 0; k < r.errors.size(); ++k) s << (k ? " " : "") << r.errors[k];
    return s.str();
}

void kernel_constants(Outcome& o) {
    const double c1 = moment_constant(KernelProfile::make(KernelFamily::quartic_polynomial, 1));
    const double c2 = moment_constant(KernelProfile::make(KernelFamily::quartic_polynomial, 2));
    o.detail.precision(12);
    o.detail << "C1 = " << c1 << ", C2 = " << c2;
    o.require(std::abs(c1 - 14.0) <= 1e-8, "1D constant");
    o.require(std::abs(c2 - 16.0) <= 1e-6, "2D constant");
}

void operator_structure(Outcome& o) {
    const auto bounded = build_grid(Domain::interval(0.0, 1.0), 1.0 / 4095.0);
    const auto cell = build_grid(Domain::periodic({2.0 * pi}), 2.0 * pi / 4096.0);
    const auto small = build_grid(Domain::interval(0.0, 1.0), 1.0 / 255.0);
    int checked = 0;
    const auto structure = [&](const DispersalOperator& op, bool symmetric) {
        ++checked;
        for (double v : op.couplings().value) {
            if (v < 0.0) return o.require(false, "negative coupling");
        }
        if (op.bc() != BoundaryCondition::dirichlet) {
            const Field au = op.apply(Field::constant(op.grid_ptr(), 2.5));
            double worst = 0.0;
            for (double v : au.values()) worst = std::max(worst, std::abs(v));
            o.require(worst == 0.0, "constant annihilation");
        }
        if (symmetric) {
            const CsrMatrix wa = op.weighted_matrix();
            o.require(max_abs_difference(wa, wa.transposed()) == 0.0, "symmetry");
        }
    };
    for (const auto& grid : {bounded, small}) {
        for (double delta : {0.05, 0.02}) {
            structure(assemble_nonlocal(grid, quartic1(), delta, BoundaryCondition::neumann), true);
        }
        structure(assemble_local(grid, BoundaryCondition::neumann), true);
    }
    for (double delta : {0.2, 0.05}) {
        structure(assemble_nonlocal(cell, quartic1(), delta, BoundaryCondition::periodic), true);
    }
    structure(assemble_local(cell, BoundaryCondition::periodic), true);
    const auto ghosted = build_grid(Domain::interval(0.0, 1.0), 1.0 / 4095.0, 0.05);
    structure(assemble_nonlocal(ghosted, quartic1(), 0.05, BoundaryCondition::dirichlet), false);
    structure(assemble_local(bounded, BoundaryCondition::dirichlet), false);
    o.detail << checked << " operators up to 4096 nodes";
}

void consistency(Outcome& o) {
    const auto cell = build_grid(Domain::periodic({2.0 * pi}), 2.0 * pi / 2048.0);
    const auto local = assemble_local(cell, BoundaryCondition::periodic);
    const Field u = Field::sample(cell, [](std::span<const double> x) { return std::cos(x[0]); });
    ConvergenceReport r;
    for (double delta : {0.4, 0.2, 0.1, 0.05}) {
        r.deltas.push_back(delta);
        r.errors.push_back(consistency_error(assemble_nonlocal(cell, quartic1(), delta, BoundaryCondition::periodic),
                                             local, u));
    }
    o.detail << "errors " << orders(r);
    o.require(r.strictly_decreasing(), "strictly decreasing");
    o.require(r.min_order() && *r.min_order() >= 1.5, "order >= 1.5");
}

void solver_oracles(Outcome& o) {
    const auto unit = build_grid(Domain::interval(0.0, 1.0), 1.0 / 64.0);
    double growth = 0.0;
    for (const auto& op : {share(assemble_nonlocal(unit, quartic1(), 0.125, BoundaryCondition::neumann)),
                           share(assemble_local(unit, BoundaryCondition::neumann))}) {
        const Trajectory tr = solve({op, ReactionTerm::linear(coef("const(0.7)")), Field::constant(unit, 1.0), 0.0, 1.0},
                                    1e-3, {1.0});
        growth = std::max(growth, sup_distance(tr.snapshots.back(), Field::constant(unit, std::exp(0.7))));
        note_positive(tr.snapshots.back());
    }
    const auto grid = build_grid(Domain::interval(0.0, pi), pi / 512.0);
    const auto op = share(assemble_local(grid, BoundaryCondition::dirichlet));
    const Field u0 = Field::sample(grid, [](std::span<const double> x) { return std::sin(x[0]); });
    const Trajectory tr = solve({op, ReactionTerm::none(), u0, 0.0, 1.0}, 1e-4, {1.0});
    const Field exact = Field::sample(grid, [](std::span<const double> x) { return std::exp(-1.0) * std::sin(x[0]); });
    const double heat = sup_distance(tr.snapshots.back(), exact);
    note_positive(tr.snapshots.back());
    o.detail << "growth error " << growth << ", heat error " << heat;
    o.require(growth <= 1e-6, "growth run");
    o.require(heat <= 2e-4, "heat run");
}

void theorem_a(Outcome& o) {
    SweepSetup s;
    s.deltas = {0.2, 0.1, 0.05};
    s.dt = 1.0 / 400.0;

    s.domain = Domain::interval(0.0, 1.0);
    s.bc = BoundaryCondition::neumann;
    s.h = 1.0 / 512.0;
    const ConvergenceReport neumann = theorem_a_experiment(s, ReactionTerm::none(), InitialSpec::parse("cosine(0, 1, pi)"), 1.0);

    s.domain = Domain::periodic({2.0 * pi});
    s.bc = BoundaryCondition::periodic;
    s.h = 2.0 * pi / 1024.0;
    const ConvergenceReport periodic = theorem_a_experiment(s, ReactionTerm::none(), InitialSpec::parse("sine(0, 1, 1)"), 1.0);

    s.domain = Domain::interval(0.0, 1.0);
    s.bc = BoundaryCondition::dirichlet;
    s.h = 1.0 / 512.0;
    const ConvergenceReport dirichlet = theorem_a_experiment(s, ReactionTerm::none(), InitialSpec::parse("bump(1)"), 1.0);

    o.detail << "neumann " << orders(neumann) << "; periodic " << orders(periodic) << "; dirichlet " << gaps(dirichlet);
    o.require(neumann.strictly_decreasing() && neumann.min_order() && *neumann.min_order() >= 1.0, "neumann");
    o.require(periodic.strictly_decreasing() && periodic.min_order() && *periodic.min_order() >= 1.0, "periodic");
    o.require(dirichlet.strictly_decreasing(), "dirichlet");
}

void theorem_b(Outcome& o) {
    SweepSetup s;
    s.deltas = {0.4, 0.2, 0.1};
    s.dt = 0.01;

    s.domain = Domain::interval(0.0, 1.0);
    s.bc = BoundaryCondition::neumann;
    s.h = 1.0 / 128.0;
    const SpectrumReport flat = theorem_b_experiment(s, coef("time-sine(0.5, 1)"));

    s.domain = Domain::interval(0.0, pi);
    s.bc = BoundaryCondition::dirichlet;
    s.h = pi / 512.0;
    const SpectrumReport dirichlet = theorem_b_experiment(s, coef("const(0)"));

    s.domain = Domain::periodic({2.0 * pi});
    s.bc = BoundaryCondition::periodic;
    s.h = 2.0 * pi / 512.0;
    const SpectrumReport periodic = theorem_b_experiment(s, coef("tx-product(1, 0.5, 1)"));

    double flat_gap = 0.0;
    for (const auto& row : flat.rows) flat_gap = std::max(flat_gap, row.abs_gap);
    bool flags = true;
    for (const auto* r : {&flat, &dirichlet, &periodic}) {
        for (const auto& row : r->rows) flags = flags && row.pev_criterion;
    }
    o.detail << "space-free gap " << flat_gap << "; dirichlet lambda_r " << dirichlet.lambda_r << " gaps "
             << gaps(dirichlet.gaps()) << "; periodic gaps " << gaps(periodic.gaps());
    o.require(flat_gap <= 1e-7, "space-free gap");
    o.require(std::abs(dirichlet.lambda_r + 1.0) <= 2e-3, "dirichlet lambda_r");
    o.require(dirichlet.gaps().strictly_decreasing(), "dirichlet gaps");
    o.require(periodic.gaps().strictly_decreasing(), "periodic gaps");
    o.require(flags, "principal-eigenvalue flag");
}

std::string random_coefficient(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 3), wave(1, 3);
    std::ostringstream s;
    s.precision(6);
    switch (pick(rng)) {
        case 0: s << "const(" << u(rng) << ")"; break;
        case 1: s << "time-sine(" << u(rng) << ", " << u(rng) << ")"; break;
        case 2: s << "space-cosine(" << u(rng) << ", " << u(rng) << ", " << wave(rng) << ")"; break;
        default: s << "tx-product(" << u(rng) << ", " << u(rng) << ", " << wave(rng) << ")"; break;
    }
    return s.str();
}

void perturbation(Outcome& o) {
    const auto cell = build_grid(Domain::periodic({2.0 * pi}), 2.0 * pi / 128.0);
    const auto op = share(assemble_nonlocal(cell, quartic1(), 0.4, BoundaryCondition::periodic));
    const double dt = 1e-4;
    const double base = principal_value(PeriodMap(op, coef("tx-product(1, 0.5, 1)"), dt)).lambda;
    double shift = 0.0;
    for (double c : {-1.0, 0.3, 2.0}) {
        std::ostringstream text;
        text << "tx-product(" << 1.0 + c << ", 0.5, 1)";
        const double lambda = principal_value(PeriodMap(op, coef(text.str()), dt)).lambda;
        shift = std::max(shift, std::abs(lambda - base - c));
    }
    std::mt19937_64 rng(33);
    int held = 0;
    for (int k = 0; k < 5; ++k) {
        const std::string a1 = random_coefficient(rng), a2 = random_coefficient(rng);
        const PerturbationCheck check = perturbation_check(PeriodMap(op, coef(a1), 0.01), PeriodMap(op, coef(a2), 0.01), 1e-8);
        held += check.holds;
    }
    o.detail << "shift error " << shift << "; Lipschitz bound held on " << held << "/5 pairs";
    o.require(shift <= 1e-7, "shift tightness");
    o.require(held == 5, "Lipschitz bound");
}

void theorem_c(Outcome& o) {
    SweepSetup s;
    s.deltas = {0.4, 0.2, 0.1};
    s.dt = 1.0 / 64.0;
    OrbitOptions opts;

    bool invariants = true;
    const auto check = [&](const OrbitReport& r) {
        invariants = invariants && r.local_sandwich_holds && r.local_starts_agree;
        for (const auto& row : r.rows) invariants = invariants && row.h2_delta_ok && row.sandwich_holds && row.starts_agree;
    };

    s.domain = Domain::interval(0.0, 1.0);
    s.bc = BoundaryCondition::neumann;
    s.h = 1.0 / 128.0;
    const OrbitReport flat = theorem_c_experiment(s, GrowthSpec::parse("logistic(const(1))"), 1.0, opts);
    check(flat);

    s.domain = Domain::interval(0.0, 2.0 * pi);
    s.bc = BoundaryCondition::dirichlet;
    s.h = 2.0 * pi / 1024.0;
    const OrbitReport dirichlet = theorem_c_experiment(s, GrowthSpec::parse("logistic(const(1))"), 1.0, opts);
    check(dirichlet);

    s.domain = Domain::periodic({2.0 * pi});
    s.bc = BoundaryCondition::periodic;
    const OrbitReport periodic = theorem_c_experiment(s, GrowthSpec::parse("logistic(tx-product(1, 0.5, 1))"), 1.0, opts);
    check(periodic);

    const double flat_gap = flat.gaps().max_error();
    o.detail << "constant-orbit gap " << flat_gap << "; dirichlet " << gaps(dirichlet.gaps()) << "; periodic "
             << gaps(periodic.gaps());
    o.require(flat_gap <= 1e-7, "constant orbit");
    o.require(dirichlet.gaps().strictly_decreasing(), "dirichlet");
    o.require(periodic.gaps().strictly_decreasing(), "periodic");
    o.require(invariants, "sandwich and start agreement");
}

void comparison(Outcome& o) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto bounded = build_grid(Domain::interval(0.0, 1.0), 1.0 / 256.0, 0.1);
    const auto plain = build_grid(Domain::interval(0.0, 1.0), 1.0 / 256.0);
    const auto cell = build_grid(Domain::periodic({2.0 * pi}), 2.0 * pi / 256.0);
    const OperatorPtr ops[] = {
        share(assemble_nonlocal(bounded, quartic1(), 0.1, BoundaryCondition::dirichlet)),
        share(assemble_nonlocal(plain, quartic1(), 0.1, BoundaryCondition::neumann)),
        share(assemble_nonlocal(cell, quartic1(), 0.4, BoundaryCondition::periodic)),
        share(assemble_local(plain, BoundaryCondition::neumann)),
    };
    const auto reaction = ReactionTerm::kpp(build_growth(GrowthSpec::parse("logistic(tx-product(1, 0.5, 1))"), 1.0));
    std::vector<double> times;
    for (int k = 1; k <= 20; ++k) times.push_back(0.05 * k);
    int ordered = 0;
    for (int pair = 0; pair < 20; ++pair) {
        const OperatorPtr& op = ops[pair % 4];
        Field lower(op->grid_ptr()), upper(op->grid_ptr());
        for (std::size_t i = 0; i < lower.size(); ++i) {
            if (op->grid().is_ghost(i)) continue;
            lower[i] = 2.0 * u(rng);
            upper[i] = lower[i] + u(rng);
        }
        const Trajectory lo = solve({op, reaction, lower, 0.0, 1.0}, 0.01, times);
        const Trajectory hi = solve({op, reaction, upper, 0.0, 1.0}, 0.01, times);
        ordered += check_comparison(lo, hi, 1e-10);
        for (const auto* tr : {&lo, &hi}) {
            for (const Field& f : tr->snapshots) note_positive(f);
        }
    }
    o.detail << ordered << "/20 pairs ordered; smallest value over nonnegative runs " << positivity_floor;
    o.require(ordered == 20, "order preservation");
    o.require(positivity_floor >= -1e-12, "positivity");
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
        {"kernel constants", kernel_constants},
        {"operator structure", operator_structure},
        {"consistency on the periodic cell", consistency},
        {"solver oracles", solver_oracles},
        {"nonlocal-to-local convergence of solutions", theorem_a},
        {"principal spectrum convergence", theorem_b},
        {"shift tightness and Lipschitz bound", perturbation},
        {"periodic KPP orbit convergence", theorem_c},
        {"comparison and positivity", comparison},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Outcome o;
        o.detail.precision(4);
        const auto start = std::chrono::steady_clock::now();
        try {
            check(o);
        } catch (const Error& e) {
            o.pass = false;
            o.detail << " error: " << to_string(e.kind()) << ": " << e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.pass;
        std::printf("%s %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.str().c_str(), seconds);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
