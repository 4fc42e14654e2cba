#pragma once

#include "dispersal/coefficients.hpp"
#include "dispersal/evolution.hpp"
#include "dispersal/kernels.hpp"
#include "dispersal/operators.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dispersal {

enum class Experiment { simulate, spectrum, kpp_orbit, converge_a, converge_b, converge_c };

std::string_view to_string(Experiment e);
Experiment experiment_from_string(std::string_view name);

/// Reaction selector for `simulate` and `converge-a`: `none`,
/// `linear(<coefficient>)` (F = a u) or `logistic(<coefficient>)`
/// (F = u (a - u)).
struct ReactionSpec {
    enum class Form { none, linear, logistic } form = Form::none;
    CoefficientSpec coefficient;

    static ReactionSpec parse(std::string_view text);
    std::string to_string() const;
    ReactionTerm build(double period) const;

    bool operator==(const ReactionSpec&) const = default;
};

/// One experiment, read from flat `key = value` lines with `#` comments.
///
/// Keys (defaults in brackets):
///
///   experiment   simulate | spectrum | kpp-orbit | converge-a | converge-b | converge-c
///   bc           dirichlet | neumann | periodic
///   domain       interval | box | periodic
///   lower/upper  box corners, comma separated                 (interval, box)
///   periods      cell periods, comma separated                 (periodic)
///   kernel       quartic | mollifier                           [quartic]
///   moment       calibrated | analytic                          [calibrated]
///   operator     nonlocal | local          (simulate, spectrum, kpp-orbit)
///   delta        dispersal distance        (nonlocal single runs)
///   deltas       strictly decreasing list  (converge-*)
///   h, dt        grid spacing, time step
///   T            period of the coefficient / growth rate       [1]
///   duration     integration time          (simulate, converge-a)
///   initial      initial data catalog entry (simulate, converge-a)
///   reaction     none | linear(..) | logistic(..)               [none]
///   coefficient  a(t, x) catalog entry     (spectrum, converge-b)
///   growth       logistic(<coefficient>)   (kpp-orbit, converge-c)
///   tol          [1e-9 for spectra, 1e-8 for orbits]
///   max_iters    [20000]    max_periods [2000]    snapshots [32]
///   output_every snapshot stride in steps for simulate          [duration/dt]
///   dump_operator  true | false                                 [false]
///   output       output directory                               [.]
///
/// Numbers accept `pi` factors such as `2*pi` or `pi/512`.
struct ExperimentConfig {
    Experiment experiment = Experiment::simulate;
    BoundaryCondition bc = BoundaryCondition::neumann;
    Domain domain = Domain::interval(0.0, 1.0);
    KernelFamily kernel = KernelFamily::quartic_polynomial;
    MomentScaling moment = MomentScaling::grid_calibrated;
    OperatorKind operator_kind = OperatorKind::nonlocal;
    std::optional<double> delta;
    std::vector<double> deltas;
    double h = 0.0;
    double dt = 0.0;
    double period = 1.0;
    std::optional<double> duration;
    std::optional<InitialSpec> initial;
    ReactionSpec reaction;
    std::optional<CoefficientSpec> coefficient;
    std::optional<GrowthSpec> growth;
    std::optional<double> tol;
    int max_iters = 20000;
    int max_periods = 2000;
    int snapshots = 32;
    std::optional<long> output_every;
    bool dump_operator = false;
    std::string output = ".";

    /// Throws Error(config) naming the offending key.
    static ExperimentConfig parse(std::string_view text);
    static ExperimentConfig load(const std::string& path);

    /// Checks cross-key rules; throws Error(config) naming the offending key.
    void validate() const;

    /// Canonical `key = value` listing that parses back to an equal config.
    std::string echo() const;

    double spectrum_tol() const { return tol.value_or(1e-9); }
    double orbit_tol() const { return tol.value_or(1e-8); }
    SweepSetup sweep(int jobs) const;

    bool operator==(const ExperimentConfig&) const = default;
};

}  // namespace dispersal
