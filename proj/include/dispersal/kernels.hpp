#pragma once

#include <span>
#include <string_view>

namespace dispersal {

enum class KernelFamily {
    quartic_polynomial,  ///< (1 - |z|^2)^2, C^1 at the support edge
    standard_mollifier,  ///< exp(-1 / (1 - |z|^2)), C^infinity
};

std::string_view to_string(KernelFamily family);
KernelFamily kernel_family_from_string(std::string_view name);

/// Default spacing of the composite radial quadrature, relative to the
/// support radius.
inline constexpr double default_quadrature_spacing = 1.0 / 512.0;

/// Unit dispersal kernel k0: radially symmetric, supported in the closed
/// unit ball of R^N (N = 1 or 2), normalized to unit mass.
///
/// The quartic family carries its analytic normalization (15/16 in 1D,
/// 3/pi in 2D). The mollifier is normalized numerically with the module
/// quadrature. The moment constant C = (1/2 int k0(z) z_N^2 dz)^-1 is
/// computed once at construction.
class KernelProfile {
public:
    /// Builds a normalized profile. Throws Error(quadrature_failure) if the
    /// quadrature mass deviates from 1 by more than 1e-8.
    static KernelProfile make(KernelFamily family, int dimension,
                              double quadrature_spacing = default_quadrature_spacing);

    /// Profile with a caller-supplied normalization; no mass check is made.
    static KernelProfile with_normalization(KernelFamily family, int dimension,
                                            double normalization);

    KernelFamily family() const noexcept { return family_; }
    int dimension() const noexcept { return dimension_; }
    double normalization() const noexcept { return normalization_; }

    /// Cached moment constant C (only meaningful for normalized profiles).
    double moment_constant() const noexcept { return moment_constant_; }

    /// k0 as a function of the radius |z|. Zero for |z| >= 1.
    double at_radius(double radius) const noexcept;

private:
    KernelProfile(KernelFamily family, int dimension, double normalization)
        : family_(family), dimension_(dimension), normalization_(normalization) {}

    KernelFamily family_;
    int dimension_;
    double normalization_;
    double moment_constant_ = 0.0;
};

/// k0(z); z must have profile.dimension() components.
double evaluate_k0(const KernelProfile& profile, std::span<const double> z);

/// C = (1/2 int k0(z) z_N^2 dz)^-1 by composite Gauss-Legendre quadrature on
/// radial panels of width `spacing`. Throws Error(quadrature_failure) when the
/// quadrature mass of k0 is off from 1 by more than 1e-8.
double moment_constant(const KernelProfile& profile,
                       double spacing = default_quadrature_spacing);

/// nu_delta = C / delta^2.
double dispersal_rate(double moment_constant, double delta);

/// k_delta(z) = delta^-N k0(z / delta).
double scaled_kernel(const KernelProfile& profile, double delta,
                     std::span<const double> displacement);

/// Quadrature of k_delta over R^N (panels of width delta * spacing).
double scaled_kernel_mass(const KernelProfile& profile, double delta,
                          double spacing = default_quadrature_spacing);

/// Quadrature of k0 over R^N.
double kernel_mass(const KernelProfile& profile,
                   double spacing = default_quadrature_spacing);

}  // namespace dispersal
