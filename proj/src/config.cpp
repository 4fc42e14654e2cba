#include "dispersal/config.hpp"

#include "dispersal/error.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace dispersal {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::string format(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

std::string format_list(const std::vector<double>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + format(values[i]);
    return s;
}

[[noreturn]] void fail(std::string_view key, const std::string& message) {
    throw Error(ErrorKind::config, "config key '" + std::string(key) + "': " + message);
}

// Re-raises parse errors from the catalogs with the key attached.
template <typename Fn>
auto for_key(std::string_view key, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        fail(key, e.what());
    }
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    while (true) {
        const auto comma = text.find(',');
        out.push_back(for_key(key, [&] { return parse_scalar(text.substr(0, comma)); }));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

long parse_integer(std::string_view key, std::string_view text) {
    const double v = for_key(key, [&] { return parse_scalar(text); });
    if (v != std::floor(v)) fail(key, "expected an integer");
    return static_cast<long>(v);
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail(key, "expected true or false");
}

// Integer number of wavelengths across a period.
bool fits_period(double k, double period) {
    const double cycles = k * period / (2.0 * std::numbers::pi);
    return std::abs(cycles - std::round(cycles)) < 1e-9 * std::max(1.0, std::abs(cycles));
}

}  // namespace

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::simulate: return "simulate";
        case Experiment::spectrum: return "spectrum";
        case Experiment::kpp_orbit: return "kpp-orbit";
        case Experiment::converge_a: return "converge-a";
        case Experiment::converge_b: return "converge-b";
        case Experiment::converge_c: return "converge-c";
    }
    return "unknown";
}

Experiment experiment_from_string(std::string_view name) {
    for (auto e : {Experiment::simulate, Experiment::spectrum, Experiment::kpp_orbit,
                   Experiment::converge_a, Experiment::converge_b, Experiment::converge_c}) {
        if (name == to_string(e)) return e;
    }
    throw Error(ErrorKind::config, "unknown experiment '" + std::string(name) + "'");
}

ReactionSpec ReactionSpec::parse(std::string_view text) {
    text = trim(text);
    ReactionSpec spec;
    if (text == "none") return spec;
    const auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') {
        throw Error(ErrorKind::config, "reaction must be none, linear(..) or logistic(..)");
    }
    const auto head = trim(text.substr(0, open));
    if (head == "linear") {
        spec.form = Form::linear;
    } else if (head == "logistic") {
        spec.form = Form::logistic;
    } else {
        throw Error(ErrorKind::config, "unknown reaction '" + std::string(head) + "'");
    }
    spec.coefficient = CoefficientSpec::parse(text.substr(open + 1, text.size() - open - 2));
    return spec;
}

std::string ReactionSpec::to_string() const {
    switch (form) {
        case Form::none: return "none";
        case Form::linear: return "linear(" + coefficient.to_string() + ")";
        case Form::logistic: return "logistic(" + coefficient.to_string() + ")";
    }
    return "none";
}

ReactionTerm ReactionSpec::build(double period) const {
    switch (form) {
        case Form::none: return ReactionTerm::none();
        case Form::linear: return ReactionTerm::linear(coefficient.build(period));
        case Form::logistic: return ReactionTerm::kpp(build_growth(GrowthSpec{coefficient}, period));
    }
    return ReactionTerm::none();
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
    std::map<std::string, std::string, std::less<>> entries;
    std::istringstream lines{std::string(text)};
    std::string raw;
    int number = 0;
    while (std::getline(lines, raw)) {
        ++number;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::config,
                        "line " + std::to_string(number) + ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        if (!entries.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
            fail(key, "given more than once");
        }
    }

    ExperimentConfig c;
    const auto take = [&](std::string_view key) -> std::optional<std::string> {
        const auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        std::string v = it->second;
        entries.erase(it);
        return v;
    };
    const auto need = [&](std::string_view key) {
        auto v = take(key);
        if (!v) fail(key, "missing");
        return *v;
    };
    const auto scalar = [&](std::string_view key, const std::string& v) {
        return for_key(key, [&] { return parse_scalar(v); });
    };

    c.experiment = for_key("experiment", [&] { return experiment_from_string(need("experiment")); });
    c.bc = for_key("bc", [&] { return boundary_condition_from_string(need("bc")); });

    const std::string domain = need("domain");
    if (domain == "periodic") {
        const auto periods = parse_list("periods", need("periods"));
        c.domain = for_key("periods", [&] { return Domain::periodic(periods); });
    } else if (domain == "interval" || domain == "box") {
        auto lower = parse_list("lower", need("lower"));
        auto upper = parse_list("upper", need("upper"));
        if (domain == "interval" && lower.size() != 1) fail("lower", "an interval has one corner coordinate");
        c.domain = for_key("upper", [&] { return Domain::box(lower, upper); });
    } else {
        fail("domain", "expected interval, box or periodic");
    }

    if (auto v = take("kernel")) c.kernel = for_key("kernel", [&] { return kernel_family_from_string(*v); });
    if (auto v = take("moment")) {
        if (*v == "calibrated") c.moment = MomentScaling::grid_calibrated;
        else if (*v == "analytic") c.moment = MomentScaling::analytic;
        else fail("moment", "expected calibrated or analytic");
    }
    if (auto v = take("operator")) {
        if (*v == "nonlocal") c.operator_kind = OperatorKind::nonlocal;
        else if (*v == "local") c.operator_kind = OperatorKind::local;
        else fail("operator", "expected nonlocal or local");
    }
    if (auto v = take("delta")) c.delta = scalar("delta", *v);
    if (auto v = take("deltas")) c.deltas = parse_list("deltas", *v);
    c.h = scalar("h", need("h"));
    c.dt = scalar("dt", need("dt"));
    if (auto v = take("T")) c.period = scalar("T", *v);
    if (auto v = take("duration")) c.duration = scalar("duration", *v);
    if (auto v = take("initial")) c.initial = for_key("initial", [&] { return InitialSpec::parse(*v); });
    if (auto v = take("reaction")) c.reaction = for_key("reaction", [&] { return ReactionSpec::parse(*v); });
    if (auto v = take("coefficient")) {
        c.coefficient = for_key("coefficient", [&] { return CoefficientSpec::parse(*v); });
    }
    if (auto v = take("growth")) c.growth = for_key("growth", [&] { return GrowthSpec::parse(*v); });
    if (auto v = take("tol")) c.tol = scalar("tol", *v);
    if (auto v = take("max_iters")) c.max_iters = static_cast<int>(parse_integer("max_iters", *v));
    if (auto v = take("max_periods")) c.max_periods = static_cast<int>(parse_integer("max_periods", *v));
    if (auto v = take("snapshots")) c.snapshots = static_cast<int>(parse_integer("snapshots", *v));
    if (auto v = take("output_every")) c.output_every = parse_integer("output_every", *v);
    if (auto v = take("dump_operator")) c.dump_operator = parse_bool("dump_operator", *v);
    if (auto v = take("output")) c.output = *v;

    if (!entries.empty()) fail(entries.begin()->first, "unknown key");
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::config, "cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str());
}

void ExperimentConfig::validate() const {
    if (domain.is_periodic() != (bc == BoundaryCondition::periodic)) {
        fail("bc", "periodic boundary conditions need a periodic domain and vice versa");
    }
    if (!(h > 0.0)) fail("h", "must be positive");
    if (!(dt > 0.0)) fail("dt", "must be positive");
    if (!(period > 0.0)) fail("T", "must be positive");
    if (tol && !(*tol > 0.0)) fail("tol", "must be positive");
    if (max_iters < 1) fail("max_iters", "must be positive");
    if (max_periods < 1) fail("max_periods", "must be positive");
    if (snapshots < 1) fail("snapshots", "must be positive");

    const bool sweep = experiment == Experiment::converge_a || experiment == Experiment::converge_b ||
                       experiment == Experiment::converge_c;
    if (sweep) {
        if (deltas.empty()) fail("deltas", "missing");
        for (std::size_t k = 0; k < deltas.size(); ++k) {
            if (!(deltas[k] > 0.0)) fail("deltas", "must be positive");
            if (k > 0 && !(deltas[k] < deltas[k - 1])) fail("deltas", "must be strictly decreasing");
        }
        const double limit = deltas.back() / 8.0;
        if (h > limit * (1.0 + 1e-12)) {
            fail("h", format(h) + " violates the rule h <= min(deltas)/8 = " + format(limit));
        }
    } else if (operator_kind == OperatorKind::nonlocal) {
        if (!delta || !(*delta > 0.0)) fail("delta", "a positive delta is required for nonlocal runs");
        if (*delta / h < 4.0 - 1e-12) fail("h", "delta/h must be at least 4");
    }

    const bool needs_initial = experiment == Experiment::simulate || experiment == Experiment::converge_a;
    if (needs_initial) {
        if (!duration || !(*duration > 0.0)) fail("duration", "a positive duration is required");
        if (!initial) fail("initial", "missing");
    }
    if ((experiment == Experiment::spectrum || experiment == Experiment::converge_b) && !coefficient) {
        fail("coefficient", "missing");
    }
    if ((experiment == Experiment::kpp_orbit || experiment == Experiment::converge_c) && !growth) {
        fail("growth", "missing");
    }

    if (domain.is_periodic()) {
        const double p = domain.extent(0);
        const auto check = [&](std::string_view key, double k) {
            if (!fits_period(k, p)) fail(key, "wavenumber " + format(k) + " is not periodic on the cell");
        };
        if (coefficient) check("coefficient", coefficient->wavenumber());
        if (growth) check("growth", growth->base.wavenumber());
        if (reaction.form != ReactionSpec::Form::none) check("reaction", reaction.coefficient.wavenumber());
        if (initial && (initial->name == "cosine" || initial->name == "sine")) {
            check("initial", initial->params[2]);
        }
        if (initial && initial->name == "bump") fail("initial", "bump data needs a bounded box");
    }
}

std::string ExperimentConfig::echo() const {
    std::ostringstream out;
    out << "experiment = " << to_string(experiment) << '\n';
    out << "bc = " << to_string(bc) << '\n';
    if (domain.is_periodic()) {
        out << "domain = periodic\n";
        out << "periods = " << format_list(domain.upper) << '\n';
    } else {
        out << "domain = " << (domain.dimension() == 1 ? "interval" : "box") << '\n';
        out << "lower = " << format_list(domain.lower) << '\n';
        out << "upper = " << format_list(domain.upper) << '\n';
    }
    out << "kernel = " << to_string(kernel) << '\n';
    out << "moment = " << (moment == MomentScaling::grid_calibrated ? "calibrated" : "analytic") << '\n';
    out << "operator = " << to_string(operator_kind) << '\n';
    if (delta) out << "delta = " << format(*delta) << '\n';
    if (!deltas.empty()) out << "deltas = " << format_list(deltas) << '\n';
    out << "h = " << format(h) << '\n';
    out << "dt = " << format(dt) << '\n';
    out << "T = " << format(period) << '\n';
    if (duration) out << "duration = " << format(*duration) << '\n';
    if (initial) out << "initial = " << initial->to_string() << '\n';
    out << "reaction = " << reaction.to_string() << '\n';
    if (coefficient) out << "coefficient = " << coefficient->to_string() << '\n';
    if (growth) out << "growth = " << growth->to_string() << '\n';
    if (tol) out << "tol = " << format(*tol) << '\n';
    out << "max_iters = " << max_iters << '\n';
    out << "max_periods = " << max_periods << '\n';
    out << "snapshots = " << snapshots << '\n';
    if (output_every) out << "output_every = " << *output_every << '\n';
    out << "dump_operator = " << (dump_operator ? "true" : "false") << '\n';
    out << "output = " << output << '\n';
    return out.str();
}

SweepSetup ExperimentConfig::sweep(int jobs) const {
    SweepSetup s;
    s.domain = domain;
    s.bc = bc;
    s.kernel = kernel;
    s.deltas = deltas;
    s.h = h;
    s.dt = dt;
    s.jobs = jobs;
    s.scaling = moment;
    return s;
}

}  // namespace dispersal
