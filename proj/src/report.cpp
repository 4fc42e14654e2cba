#include "dispersal/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace dispersal {

std::vector<std::optional<double>> ConvergenceReport::empirical_orders() const {
    std::vector<std::optional<double>> orders(errors.size());
    for (std::size_t k = 1; k < errors.size(); ++k) {
        if (errors[k - 1] > 0.0 && errors[k] > 0.0) {
            orders[k] = std::log(errors[k - 1] / errors[k]) / std::log(deltas[k - 1] / deltas[k]);
        }
    }
    return orders;
}

std::optional<double> ConvergenceReport::min_order() const {
    std::optional<double> lowest;
    for (const auto& p : empirical_orders()) {
        if (p && (!lowest || *p < *lowest)) lowest = p;
    }
    return lowest;
}

bool ConvergenceReport::strictly_decreasing() const {
    for (std::size_t k = 1; k < errors.size(); ++k) {
        if (!(errors[k] < errors[k - 1])) return false;
    }
    return true;
}

double ConvergenceReport::max_error() const {
    double worst = 0.0;
    for (double e : errors) worst = std::max(worst, e);
    return worst;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
    const auto orders = report.empirical_orders();
    out << "delta,error,empirical_order\n" << std::setprecision(17);
    for (std::size_t k = 0; k < report.errors.size(); ++k) {
        out << report.deltas[k] << ',' << report.errors[k] << ',';
        if (orders[k]) out << *orders[k];
        out << '\n';
    }
}

}  // namespace dispersal
