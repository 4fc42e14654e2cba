#include "dispersal/coefficients.hpp"

#include "dispersal/error.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dispersal {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

double parse_factor(std::string_view text, std::string_view whole) {
    text = trim(text);
    if (text == "pi") return std::numbers::pi;
    if (text.size() > 2 && text.substr(text.size() - 2) == "pi") {
        // Juxtaposed coefficient such as 2pi.
        return parse_factor(text.substr(0, text.size() - 2), whole) * std::numbers::pi;
    }
    double value = 0.0;
    const char* first = text.data();
    if (!text.empty() && text.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorKind::config, "not a number: '" + std::string(whole) + "'");
    }
    return value;
}

double parse_number(std::string_view text) { return parse_scalar(text); }

std::size_t arity(std::string_view name) {
    if (name == "const") return 1;
    if (name == "time-sine") return 2;
    if (name == "space-cosine" || name == "tx-product") return 3;
    throw Error(ErrorKind::config, "unknown coefficient '" + std::string(name) + "'");
}

std::string format_number(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

double parse_scalar(std::string_view text) {
    const std::string_view whole = trim(text);
    std::string_view rest = whole;
    double sign = 1.0;
    if (!rest.empty() && rest.front() == '-') {
        sign = -1.0;
        rest.remove_prefix(1);
    }
    double value = 1.0;
    char op = '*';
    while (true) {
        const auto cut = rest.find_first_of("*/");
        const double factor = parse_factor(rest.substr(0, cut), whole);
        value = op == '*' ? value * factor : value / factor;
        if (cut == std::string_view::npos) break;
        op = rest[cut];
        rest.remove_prefix(cut + 1);
    }
    return sign * value;
}

void TimePeriodicCoefficient::sample(double t, const Grid& grid, std::span<double> out) const {
    const auto dim = static_cast<std::size_t>(grid.dimension());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.is_ghost(i)) {
            out[i] = 0.0;
            continue;
        }
        const auto x = grid.point(i);
        out[i] = evaluate(t, std::span<const double>(x.data(), dim));
    }
}

double TimePeriodicCoefficient::time_average(std::span<const double> x, int panels) const {
    // Periodic integrand: the trapezoid rule reduces to an equal-weight sum.
    double total = 0.0;
    for (int k = 0; k < panels; ++k) total += evaluate(period * k / panels, x);
    return total / panels;
}

CoefficientSpec CoefficientSpec::parse(std::string_view text) {
    text = trim(text);
    const auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') {
        throw Error(ErrorKind::config, "coefficient must look like name(p1, ...): '" +
                                           std::string(text) + "'");
    }
    CoefficientSpec spec;
    spec.name = std::string(trim(text.substr(0, open)));
    std::string_view args = text.substr(open + 1, text.size() - open - 2);
    while (!trim(args).empty()) {
        const auto comma = args.find(',');
        spec.params.push_back(parse_number(args.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        args.remove_prefix(comma + 1);
    }
    if (spec.params.size() != arity(spec.name)) {
        throw Error(ErrorKind::config, "coefficient '" + spec.name + "' expects " +
                                           std::to_string(arity(spec.name)) + " parameters");
    }
    return spec;
}

std::string CoefficientSpec::to_string() const {
    std::string s = name + "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) s += ", ";
        s += format_number(params[i]);
    }
    return s + ")";
}

double CoefficientSpec::wavenumber() const {
    return (name == "space-cosine" || name == "tx-product") ? params.at(2) : 0.0;
}

TimePeriodicCoefficient CoefficientSpec::build(double period) const {
    if (!(period > 0.0)) throw Error(ErrorKind::invalid_argument, "period must be positive");
    arity(name);
    // The phase is reduced to [0, T) first so a(t + T) and a(t) share one argument.
    const auto phase = [omega = 2.0 * std::numbers::pi / period, period](double t) {
        double r = std::fmod(t, period);
        if (r < 0.0) r += period;
        return omega * r;
    };
    TimePeriodicCoefficient a;
    a.period = period;
    a.description = to_string();
    const auto& p = params;
    if (name == "const") {
        a.evaluate = [c = p[0]](double, std::span<const double>) { return c; };
    } else if (name == "time-sine") {
        a.evaluate = [c0 = p[0], c1 = p[1], phase](double t, std::span<const double>) {
            return c0 + c1 * std::sin(phase(t));
        };
    } else if (name == "space-cosine") {
        a.evaluate = [c0 = p[0], c1 = p[1], k = p[2]](double, std::span<const double> x) {
            return c0 + c1 * std::cos(k * x[0]);
        };
    } else {
        a.evaluate = [c0 = p[0], c1 = p[1], k = p[2], phase](double t,
                                                              std::span<const double> x) {
            return c0 + c1 * std::sin(phase(t)) * std::cos(k * x[0]);
        };
    }
    return a;
}

GrowthSpec GrowthSpec::parse(std::string_view text) {
    text = trim(text);
    constexpr std::string_view prefix = "logistic(";
    if (text.substr(0, prefix.size()) != prefix || text.back() != ')') {
        throw Error(ErrorKind::config,
                    "growth must look like logistic(<coefficient>): '" + std::string(text) + "'");
    }
    return GrowthSpec{CoefficientSpec::parse(
        text.substr(prefix.size(), text.size() - prefix.size() - 1))};
}

std::string GrowthSpec::to_string() const { return "logistic(" + base.to_string() + ")"; }

GrowthRate build_growth(const GrowthSpec& spec, double period) {
    return GrowthRate{spec.base.build(period)};
}

}  // namespace dispersal
