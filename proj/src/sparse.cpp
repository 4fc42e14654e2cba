#include "dispersal/sparse.hpp"

#include "dispersal/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace dispersal {

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < rows; ++i) {
        double sum = 0.0;
        for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) sum += value[k] * x[column[k]];
        y[i] = sum;
    }
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
    const auto first = column.begin() + static_cast<std::ptrdiff_t>(row_start[i]);
    const auto last = column.begin() + static_cast<std::ptrdiff_t>(row_start[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    return (it != last && *it == j) ? value[static_cast<std::size_t>(it - column.begin())] : 0.0;
}

CsrMatrix CsrMatrix::transposed() const {
    CsrMatrix t;
    t.rows = cols;
    t.cols = rows;
    t.row_start.assign(cols + 1, 0);
    for (std::size_t c : column) ++t.row_start[c + 1];
    for (std::size_t i = 0; i < cols; ++i) t.row_start[i + 1] += t.row_start[i];
    t.column.resize(column.size());
    t.value.resize(value.size());
    std::vector<std::size_t> next(t.row_start.begin(), t.row_start.end() - 1);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) {
            const std::size_t slot = next[column[k]]++;
            t.column[slot] = i;
            t.value[slot] = value[k];
        }
    }
    return t;
}

CsrBuilder::CsrBuilder(std::size_t rows, std::size_t cols) {
    matrix_.rows = rows;
    matrix_.cols = cols;
    matrix_.row_start.reserve(rows + 1);
}

void CsrBuilder::finish_row() {
    std::stable_sort(pending_.begin(), pending_.end(),
                     [](const Entry& a, const Entry& b) { return a.column < b.column; });
    for (std::size_t k = 0; k < pending_.size();) {
        const std::size_t col = pending_[k].column;
        double sum = 0.0;
        for (; k < pending_.size() && pending_[k].column == col; ++k) sum += pending_[k].value;
        matrix_.column.push_back(col);
        matrix_.value.push_back(sum);
    }
    pending_.clear();
    matrix_.row_start.push_back(matrix_.column.size());
}

CsrMatrix CsrBuilder::build() && {
    if (matrix_.row_start.size() != matrix_.rows + 1) {
        throw Error(ErrorKind::shape_mismatch, "CSR builder closed a wrong number of rows");
    }
    return std::move(matrix_);
}

double max_abs_difference(const CsrMatrix& a, const CsrMatrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) {
        throw Error(ErrorKind::shape_mismatch, "matrices differ in shape");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) {
        std::size_t p = a.row_start[i];
        std::size_t q = b.row_start[i];
        const std::size_t pe = a.row_start[i + 1];
        const std::size_t qe = b.row_start[i + 1];
        while (p < pe || q < qe) {
            if (q == qe || (p < pe && a.column[p] < b.column[q])) {
                worst = std::max(worst, std::abs(a.value[p++]));
            } else if (p == pe || b.column[q] < a.column[p]) {
                worst = std::max(worst, std::abs(b.value[q++]));
            } else {
                worst = std::max(worst, std::abs(a.value[p++] - b.value[q++]));
            }
        }
    }
    return worst;
}

void write_coordinate_list(std::ostream& out, const CsrMatrix& matrix) {
    out << std::setprecision(17);
    for (std::size_t i = 0; i < matrix.rows; ++i) {
        for (std::size_t k = matrix.row_start[i]; k < matrix.row_start[i + 1]; ++k) {
            out << i << ' ' << matrix.column[k] << ' ' << matrix.value[k] << '\n';
        }
    }
}

}  // namespace dispersal
