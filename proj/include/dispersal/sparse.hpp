#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace dispersal {

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_start{0};
    std::vector<std::size_t> column;
    std::vector<double> value;

    std::size_t nonzeros() const noexcept { return value.size(); }

    /// y = A x, summing each row left to right.
    void multiply(std::span<const double> x, std::span<double> y) const;

    /// Entry (i, j), zero if not stored.
    double at(std::size_t i, std::size_t j) const;

    CsrMatrix transposed() const;
};

/// Accumulates (column, value) pairs row by row; duplicates are summed in
/// insertion order after a stable sort by column.
class CsrBuilder {
public:
    CsrBuilder(std::size_t rows, std::size_t cols);

    void add(std::size_t column, double value) { pending_.push_back({column, value}); }
    /// Closes the current row and starts the next.
    void finish_row();

    CsrMatrix build() &&;

private:
    struct Entry {
        std::size_t column;
        double value;
    };
    CsrMatrix matrix_;
    std::vector<Entry> pending_;
};

/// max_ij |A_ij - B_ij| over the union of both sparsity patterns.
double max_abs_difference(const CsrMatrix& a, const CsrMatrix& b);

/// Coordinate list: one `row col value` line per stored entry.
void write_coordinate_list(std::ostream& out, const CsrMatrix& matrix);

}  // namespace dispersal
