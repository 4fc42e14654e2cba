#include "dispersal/kernels.hpp"

#include "dispersal/error.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace dispersal {

namespace {

// 4-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 4> gl_nodes = {
    -0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> gl_weights = {
    0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};

double unnormalized(KernelFamily family, double radius) {
    if (radius >= 1.0) return 0.0;
    const double s = 1.0 - radius * radius;
    switch (family) {
        case KernelFamily::quartic_polynomial:
            return s * s;
        case KernelFamily::standard_mollifier:
            return std::exp(-1.0 / s);
    }
    return 0.0;
}

// Surface measure of the unit sphere in R^N.
double sphere_measure(int dimension) {
    return dimension == 1 ? 2.0 : 2.0 * std::numbers::pi;
}

// int_0^radius g(r) r^power dr by composite Gauss-Legendre on panels of
// width radius * spacing.
template <typename Radial>
double radial_integral(Radial&& g, int power, double spacing, double radius = 1.0) {
    if (!(spacing > 0.0) || spacing > 1.0) {
        throw Error(ErrorKind::invalid_argument, "quadrature spacing must lie in (0, 1]");
    }
    const auto panels = static_cast<long>(std::ceil(1.0 / spacing - 1e-12));
    const double width = radius / static_cast<double>(panels);
    double total = 0.0;
    for (long p = 0; p < panels; ++p) {
        const double mid = (static_cast<double>(p) + 0.5) * width;
        double panel = 0.0;
        for (std::size_t q = 0; q < gl_nodes.size(); ++q) {
            const double r = mid + 0.5 * width * gl_nodes[q];
            panel += gl_weights[q] * g(r) * std::pow(r, power);
        }
        total += 0.5 * width * panel;
    }
    return total;
}

void check_dimension(int dimension) {
    if (dimension != 1 && dimension != 2) {
        throw Error(ErrorKind::invalid_argument,
                    "kernel dimension must be 1 or 2, got " + std::to_string(dimension));
    }
}

}  // namespace

std::string_view to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::quartic_polynomial: return "quartic";
        case KernelFamily::standard_mollifier: return "mollifier";
    }
    return "unknown";
}

KernelFamily kernel_family_from_string(std::string_view name) {
    if (name == "quartic" || name == "quartic-polynomial") return KernelFamily::quartic_polynomial;
    if (name == "mollifier" || name == "standard-mollifier") return KernelFamily::standard_mollifier;
    throw Error(ErrorKind::config, "unknown kernel family '" + std::string(name) + "'");
}

KernelProfile KernelProfile::make(KernelFamily family, int dimension, double quadrature_spacing) {
    check_dimension(dimension);
    double normalization = 0.0;
    if (family == KernelFamily::quartic_polynomial) {
        // int (1-z^2)^2 over [-1,1] is 16/15; over the unit disc it is pi/3.
        normalization = dimension == 1 ? 15.0 / 16.0 : 3.0 / std::numbers::pi;
    } else {
        const double raw = sphere_measure(dimension) *
                           radial_integral([family](double r) { return unnormalized(family, r); },
                                           dimension - 1, quadrature_spacing);
        normalization = 1.0 / raw;
    }
    KernelProfile profile(family, dimension, normalization);
    profile.moment_constant_ = dispersal::moment_constant(profile, quadrature_spacing);
    return profile;
}

KernelProfile KernelProfile::with_normalization(KernelFamily family, int dimension,
                                                double normalization) {
    check_dimension(dimension);
    return KernelProfile(family, dimension, normalization);
}

double KernelProfile::at_radius(double radius) const noexcept {
    return normalization_ * unnormalized(family_, radius);
}

double evaluate_k0(const KernelProfile& profile, std::span<const double> z) {
    if (static_cast<int>(z.size()) != profile.dimension()) {
        throw Error(ErrorKind::invalid_argument, "point dimension does not match kernel");
    }
    double r2 = 0.0;
    for (double c : z) r2 += c * c;
    return profile.at_radius(std::sqrt(r2));
}

double kernel_mass(const KernelProfile& profile, double spacing) {
    const int n = profile.dimension();
    return sphere_measure(n) *
           radial_integral([&](double r) { return profile.at_radius(r); }, n - 1, spacing);
}

double moment_constant(const KernelProfile& profile, double spacing) {
    const double mass = kernel_mass(profile, spacing);
    if (std::abs(mass - 1.0) > 1e-8) {
        throw Error(ErrorKind::quadrature_failure,
                    "kernel mass " + std::to_string(mass) + " deviates from 1");
    }
    const int n = profile.dimension();
    // int g(|z|) z_N^2 dz = (|S^{N-1}| / N) int_0^1 g(r) r^{N+1} dr
    const double second = sphere_measure(n) / n *
                          radial_integral([&](double r) { return profile.at_radius(r); }, n + 1,
                                          spacing);
    return 1.0 / (0.5 * second);
}

double dispersal_rate(double moment_constant, double delta) {
    if (!(delta > 0.0)) throw Error(ErrorKind::invalid_argument, "delta must be positive");
    return moment_constant / (delta * delta);
}

double scaled_kernel(const KernelProfile& profile, double delta,
                     std::span<const double> displacement) {
    if (!(delta > 0.0)) throw Error(ErrorKind::invalid_argument, "delta must be positive");
    if (static_cast<int>(displacement.size()) != profile.dimension()) {
        throw Error(ErrorKind::invalid_argument, "displacement dimension does not match kernel");
    }
    double r2 = 0.0;
    for (double c : displacement) r2 += c * c;
    return profile.at_radius(std::sqrt(r2) / delta) / std::pow(delta, profile.dimension());
}

double scaled_kernel_mass(const KernelProfile& profile, double delta, double spacing) {
    if (!(delta > 0.0)) throw Error(ErrorKind::invalid_argument, "delta must be positive");
    const int n = profile.dimension();
    const double scale = std::pow(delta, -n);
    return sphere_measure(n) *
           radial_integral([&](double r) { return scale * profile.at_radius(r / delta); }, n - 1,
                           spacing, delta);
}

}  // namespace dispersal
