#include "dispersal/error.hpp"
#include "dispersal/evolution.hpp"
#include "dispersal/linear_solver.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace dispersal;

namespace {

constexpr double pi = std::numbers::pi;

const KernelProfile& quartic1() {
    static const auto p = KernelProfile::make(KernelFamily::quartic_polynomial, 1);
    return p;
}

OperatorPtr share(DispersalOperator op) { return std::make_shared<const DispersalOperator>(std::move(op)); }

GrowthRate logistic(const char* coefficient) {
    return build_growth(GrowthSpec{CoefficientSpec::parse(coefficient)}, 1.0);
}

template <typename Fn>
void expect_kind(ErrorKind kind, Fn&& fn) {
    try {
        fn();
        FAIL("expected " << to_string(kind));
    } catch (const Error& e) {
        CHECK(e.kind() == kind);
    }
}

}  // namespace

TEST_CASE("implicit solver reaches the residual target") {
    const auto grid = build_grid(Domain::interval(0.0, 1.0), 1.0 / 256.0);
    const auto op = assemble_nonlocal(grid, quartic1(), 0.05, BoundaryCondition::neumann);
    const double tau = 0.01;
    const ImplicitSolver solver(op, tau);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    std::vector<double> b(grid->size()), x(grid->size(), 0.0), ax(grid->size());
    for (double& v : b) v = n(rng);
    solver.solve(b, x);
    op.apply(x, ax);
    double r = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        r = std::max(r, std::abs(x[i] - tau * ax[i] - b[i]));
        bn = std::max(bn, std::abs(b[i]));
    }
    CHECK(r <= 1e-10 * bn);
    CHECK(solver.last_sweeps() >= 1);
}

TEST_CASE("constants are equilibria") {
    const auto grid = build_grid(Domain::interval(0.0, 1.0), 1.0 / 128.0);
    for (const auto& op : {share(assemble_nonlocal(grid, quartic1(), 0.1, BoundaryCondition::neumann)),
                           share(assemble_local(grid, BoundaryCondition::neumann))}) {
        const SemilinearProblem p{op, ReactionTerm::none(), Field::constant(grid, 3.0), 0.0, 1.0};
        const Trajectory tr = solve(p, 0.01, {0.25, 0.5, 1.0});
        REQUIRE(tr.snapshots.size() == 4);
        CHECK(tr.snapshots.front().time() == 0.0);
        CHECK(tr.steps == 100);
        for (const Field& s : tr.snapshots) {
            for (double v : s.values()) REQUIRE(v == 3.0);
        }
    }
}

TEST_CASE("constant growth matches the scalar ODE") {
    const auto grid = build_grid(Domain::interval(0.0, 1.0), 1.0 / 128.0);
    const auto a = CoefficientSpec::parse("const(0.7)").build(1.0);
    for (const auto& op : {share(assemble_nonlocal(grid, quartic1(), 0.1, BoundaryCondition::neumann)),
                           share(assemble_local(grid, BoundaryCondition::neumann))}) {
        const SemilinearProblem p{op, ReactionTerm::linear(a), Field::constant(grid, 1.0), 0.0, 1.0};
        const Trajectory tr = solve(p, 1e-3, {1.0});
        const Field& last = tr.snapshots.back();
        CHECK(last.time() == doctest::Approx(1.0));
        CHECK(sup_distance(last, Field::constant(grid, std::exp(0.7))) <= 1e-6);
    }
}

TEST_CASE("Dirichlet heat equation matches separation of variables") {
    const auto grid = build_grid(Domain::interval(0.0, pi), pi / 512.0);
    const auto op = share(assemble_local(grid, BoundaryCondition::dirichlet));
    const Field u0 = Field::sample(grid, [](std::span<const double> x) { return std::sin(x[0]); });
    const SemilinearProblem p{op, ReactionTerm::none(), u0, 0.0, 1.0};
    const Trajectory tr = solve(p, 1e-4, {1.0});
    const Field exact = Field::sample(grid, [](std::span<const double> x) { return std::exp(-1.0) * std::sin(x[0]); });
    CHECK(sup_distance(tr.snapshots.back(), exact) <= 2e-4);
}

TEST_CASE("solve preconditions") {
    const auto grid = build_grid(Domain::interval(0.0, 1.0), 1.0 / 64.0);
    const auto op = share(assemble_local(grid, BoundaryCondition::neumann));
    const SemilinearProblem p{op, ReactionTerm::none(), Field::constant(grid, 1.0), 0.0, 1.0};
    expect_kind(ErrorKind::non_multiple_snapshot, [&] { solve(p, 0.01, {0.125}); });
    expect_kind(ErrorKind::non_multiple_snapshot, [&] { solve(p, 0.01, {2.0}); });

    // u' = u^2 blows up at t = 1 from u0 = 1.
    ReactionTerm square;
    square.value = [](double, std::span<const double>, double u) { return u * u; };
    square.derivative = [](double, std::span<const double>, double u) { return 2.0 * u; };
    const SemilinearProblem blow{op, square, Field::constant(grid, 1.0), 0.0, 2.0};
    expect_kind(ErrorKind::blow_up, [&] { solve(blow, 1e-3, {2.0}); });
}

TEST_CASE("comparison of KPP trajectories") {
    const auto grid = build_grid(Domain::interval(0.0, 1.0), 1.0 / 128.0);
    const auto op = share(assemble_nonlocal(grid, quartic1(), 0.1, BoundaryCondition::neumann));
    const auto reaction = ReactionTerm::kpp(logistic("const(1)"));
    const std::vector<double> times{0.25, 0.5, 0.75, 1.0};
    const auto run = [&](double c) {
        return solve({op, reaction, Field::constant(grid, c), 0.0, 1.0}, 0.01, times);
    };
    const Trajectory low = run(0.1);
    const Trajectory high = run(10.0);
    CHECK(check_comparison(low, low, 0.0));
    CHECK(check_comparison(low, high, 1e-10));
    CHECK_FALSE(check_comparison(high, low, 1e-10));
    // f = 1 - u keeps solutions inside [0, max(|u0|, 1)]
    for (const auto& tr : {low, high}) {
        for (const Field& s : tr.snapshots) {
            CHECK(min_value(s) >= 0.0);
            CHECK(sup_norm(s) <= std::max(sup_norm(tr.snapshots.front()), 1.0) + 1e-6);
        }
    }
    const Trajectory shorter = solve({op, reaction, Field::constant(grid, 0.1), 0.0, 1.0}, 0.01, {0.5});
    expect_kind(ErrorKind::shape_mismatch, [&] { check_comparison(shorter, high, 0.0); });
}

TEST_CASE("random ordered pairs keep their order") {
    const auto grid = build_grid(Domain::interval(0.0, 1.0), 1.0 / 256.0, 0.1);
    const auto reaction = ReactionTerm::kpp(logistic("tx-product(1, 0.5, 3)"));
    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const OperatorPtr ops[] = {share(assemble_nonlocal(grid, quartic1(), 0.1, BoundaryCondition::dirichlet)),
                               share(assemble_local(build_grid(Domain::interval(0.0, 1.0), 1.0 / 256.0),
                                                    BoundaryCondition::neumann))};
    for (const auto& op : ops) {
        for (int k = 0; k < 5; ++k) {
            Field lower(op->grid_ptr());
            Field upper(op->grid_ptr());
            for (std::size_t i = 0; i < lower.size(); ++i) {
                if (op->grid().is_ghost(i)) continue;
                lower[i] = 2.0 * u(rng);
                upper[i] = lower[i] + u(rng);
            }
            std::vector<double> times;
            for (int s = 1; s <= 10; ++s) times.push_back(0.1 * s);
            const Trajectory lo = solve({op, reaction, lower, 0.0, 1.0}, 0.01, times);
            const Trajectory hi = solve({op, reaction, upper, 0.0, 1.0}, 0.01, times);
            CHECK(check_comparison(lo, hi, 1e-10));
            for (const Field& s : lo.snapshots) CHECK(min_value(s) >= -1e-12);
        }
    }
}

TEST_CASE("initial data catalog") {
    const auto grid = build_grid(Domain::interval(0.0, 1.0), 0.25, 0.25);
    const Field bump = InitialSpec::parse("bump(16)").sample(grid);
    CHECK(bump[0] == 0.0);                    // ghost
    CHECK(bump[1] == 0.0);                    // x = 0
    CHECK(bump[3] == doctest::Approx(1.0));  // x = 0.5
    const Field c = InitialSpec::parse("cosine(1, 2, pi)").sample(grid);
    CHECK(c[1] == doctest::Approx(3.0));
    for (const char* text : {"const(3)", "cosine(0, 1, pi)", "sine(0.5, 1, 2)", "bump(16)"}) {
        const auto spec = InitialSpec::parse(text);
        CHECK(InitialSpec::parse(spec.to_string()) == spec);
    }
    CHECK_THROWS_AS(InitialSpec::parse("square(1)"), Error);
}

TEST_CASE("sweep rules") {
    SweepSetup s;
    s.domain = Domain::interval(0.0, 1.0);
    s.bc = BoundaryCondition::neumann;
    s.deltas = {0.2, 0.1};
    s.h = 1.0 / 128.0;
    s.dt = 0.01;
    CHECK_NOTHROW(s.validate());
    s.h = 0.05;
    expect_kind(ErrorKind::invalid_argument, [&] { s.validate(); });
    s.h = 1.0 / 128.0;
    s.deltas = {0.1, 0.2};
    expect_kind(ErrorKind::invalid_argument, [&] { s.validate(); });
    s.deltas = {0.2, 0.1};
    s.bc = BoundaryCondition::periodic;
    expect_kind(ErrorKind::invalid_argument, [&] { s.validate(); });
}

TEST_CASE("convergence on the periodic cell") {
    SweepSetup s;
    s.domain = Domain::periodic({2.0 * pi});
    s.bc = BoundaryCondition::periodic;
    s.deltas = {0.2, 0.1, 0.05};
    s.h = 2.0 * pi / 1024.0;
    s.dt = 1.0 / 400.0;
    const ConvergenceReport r =
        theorem_a_experiment(s, ReactionTerm::none(), InitialSpec::parse("sine(0, 1, 1)"), 0.25);
    CHECK(r.strictly_decreasing());
    REQUIRE(r.min_order());
    CHECK(*r.min_order() >= 1.5);

    std::ostringstream csv;
    write_convergence_csv(csv, r);
    std::istringstream lines(csv.str());
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    CHECK(header == "delta,error,empirical_order");
    CHECK(first.back() == ',');  // no order on the first row
}

TEST_CASE("convergence under Neumann conditions") {
    SweepSetup s;
    s.domain = Domain::interval(0.0, 1.0);
    s.bc = BoundaryCondition::neumann;
    s.deltas = {0.2, 0.1, 0.05};
    s.h = 1.0 / 512.0;
    s.dt = 1.0 / 400.0;
    const ConvergenceReport r =
        theorem_a_experiment(s, ReactionTerm::none(), InitialSpec::parse("cosine(0, 1, pi)"), 0.25);
    CHECK(r.strictly_decreasing());

    const ConvergenceReport flat =
        theorem_a_experiment(s, ReactionTerm::none(), InitialSpec::parse("const(2)"), 0.25);
    CHECK(flat.max_error() <= 1e-10);
}

TEST_CASE("time error is subdominant") {
    SweepSetup s;
    s.domain = Domain::periodic({2.0 * pi});
    s.bc = BoundaryCondition::periodic;
    s.deltas = {0.4, 0.2};
    s.h = 2.0 * pi / 512.0;
    s.dt = 1.0 / 200.0;
    const auto u0 = InitialSpec::parse("sine(0, 1, 1)");
    const ConvergenceReport coarse = theorem_a_experiment(s, ReactionTerm::none(), u0, 0.25);
    s.dt /= 2.0;
    const ConvergenceReport fine = theorem_a_experiment(s, ReactionTerm::none(), u0, 0.25);
    for (std::size_t k = 0; k < coarse.errors.size(); ++k) {
        CHECK(std::abs(coarse.errors[k] - fine.errors[k]) < 0.05 * fine.errors[k]);
    }
}

TEST_CASE("empirical orders") {
    ConvergenceReport r;
    r.deltas = {0.4, 0.2, 0.1};
    r.errors = {0.16, 0.04, 0.01};
    const auto p = r.empirical_orders();
    CHECK_FALSE(p[0].has_value());
    CHECK(*p[1] == doctest::Approx(2.0));
    CHECK(*r.min_order() == doctest::Approx(2.0));
    CHECK(r.strictly_decreasing());
    r.errors = {0.16, 0.04, 0.04};
    CHECK_FALSE(r.strictly_decreasing());
    CHECK(r.max_error() == 0.16);
}
