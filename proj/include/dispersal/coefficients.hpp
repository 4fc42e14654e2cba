#pragma once

#include "dispersal/grid.hpp"

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dispersal {

/// Parses a scalar written as a product/quotient of numbers and `pi`,
/// e.g. `0.25`, `2*pi`, `pi/512`, `1/1024`. Throws Error(config).
double parse_scalar(std::string_view text);

/// a(t, x), T-periodic in t.
struct TimePeriodicCoefficient {
    double period = 1.0;
    std::function<double(double, std::span<const double>)> evaluate;
    std::string description;

    double operator()(double t, std::span<const double> x) const { return evaluate(t, x); }

    /// Writes a(t, x_i) for every non-ghost node (ghost entries set to 0).
    void sample(double t, const Grid& grid, std::span<double> out) const;

    /// (1/T) int_0^T a(t, x) dt by the composite trapezoid rule.
    double time_average(std::span<const double> x, int panels = 512) const;
};

/// Named analytic coefficient from the catalog.
///
///   const(c)                  c
///   time-sine(c0, c1)         c0 + c1 sin(2 pi t / T)
///   space-cosine(c0, c1, k)   c0 + c1 cos(k x)
///   tx-product(c0, c1, k)     c0 + c1 sin(2 pi t / T) cos(k x)
///
/// x is the first spatial coordinate.
struct CoefficientSpec {
    std::string name;
    std::vector<double> params;

    /// Parses `name(p1, p2, ...)`. Throws Error(config) on unknown names or
    /// wrong arity.
    static CoefficientSpec parse(std::string_view text);
    std::string to_string() const;

    TimePeriodicCoefficient build(double period) const;

    /// Spatial wavenumber, or 0 for space-free entries.
    double wavenumber() const;

    bool operator==(const CoefficientSpec&) const = default;
};

/// Growth rate f(t, x, u) of the KPP reaction u f(t, x, u).
///
/// Only the logistic form f = a(t, x) - u over a catalog coefficient is
/// provided, written `logistic(<coefficient>)`.
struct GrowthSpec {
    CoefficientSpec base;

    static GrowthSpec parse(std::string_view text);
    std::string to_string() const;

    bool operator==(const GrowthSpec&) const = default;
};

struct GrowthRate {
    TimePeriodicCoefficient base;  ///< a(t, x) = f(t, x, 0)

    double f(double t, std::span<const double> x, double u) const { return base(t, x) - u; }
    double df_du(double, std::span<const double>, double) const { return -1.0; }
};

GrowthRate build_growth(const GrowthSpec& spec, double period);

}  // namespace dispersal
