#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "paradiag/errors.hpp"
#include "paradiag/vec.hpp"

namespace paradiag {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Square sparse matrix in compressed-row storage. Column indices are
/// strictly increasing within each row; duplicate triplets are summed at
/// construction. Immutable once built.
class CsrMatrix {
public:
    CsrMatrix() = default;

    static CsrMatrix from_triplets(int n, std::vector<Triplet> entries) {
        if (n < 1) throw Error("CsrMatrix: dimension must be >= 1");
        for (const auto& t : entries)
            if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
                throw Error("CsrMatrix: triplet index out of range");
        std::sort(entries.begin(), entries.end(),
                  [](const Triplet& a, const Triplet& b) {
                      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
                  });
        CsrMatrix m;
        m.n_ = n;
        m.row_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
        std::size_t i = 0;
        while (i < entries.size()) {
            std::size_t j = i;
            double sum = 0.0;
            while (j < entries.size() && entries[j].row == entries[i].row &&
                   entries[j].col == entries[i].col) {
                sum += entries[j].value;
                ++j;
            }
            m.cols_.push_back(entries[i].col);
            m.values_.push_back(sum);
            ++m.row_offsets_[static_cast<std::size_t>(entries[i].row) + 1];
            i = j;
        }
        for (int r = 0; r < n; ++r)
            m.row_offsets_[static_cast<std::size_t>(r) + 1] +=
                m.row_offsets_[static_cast<std::size_t>(r)];
        return m;
    }

    static CsrMatrix identity(int n) {
        std::vector<Triplet> t;
        t.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
        return from_triplets(n, std::move(t));
    }

    int rows() const { return n_; }
    int cols() const { return n_; }
    std::size_t nnz() const { return values_.size(); }

    /// y = A x
    void matvec(std::span<const double> x, std::span<double> y) const {
        for (int r = 0; r < n_; ++r) {
            double s = 0.0;
            for (std::size_t k = row_offsets_[static_cast<std::size_t>(r)];
                 k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
                s += values_[k] * x[static_cast<std::size_t>(cols_[k])];
            y[static_cast<std::size_t>(r)] = s;
        }
    }

    /// y += a * A x
    void matvec_add(std::span<const double> x, std::span<double> y,
                    double a) const {
        for (int r = 0; r < n_; ++r) {
            double s = 0.0;
            for (std::size_t k = row_offsets_[static_cast<std::size_t>(r)];
                 k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
                s += values_[k] * x[static_cast<std::size_t>(cols_[k])];
            y[static_cast<std::size_t>(r)] += a * s;
        }
    }

    /// Max absolute row sum.
    double norm_inf() const {
        double m = 0.0;
        for (int r = 0; r < n_; ++r) {
            double s = 0.0;
            for (std::size_t k = row_offsets_[static_cast<std::size_t>(r)];
                 k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
                s += std::abs(values_[k]);
            m = std::max(m, s);
        }
        return m;
    }

    const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
    const std::vector<int>& col_indices() const { return cols_; }
    const std::vector<double>& values() const { return values_; }

private:
    int n_ = 0;
    std::vector<std::size_t> row_offsets_;
    std::vector<int> cols_;
    std::vector<double> values_;
};

}  // namespace paradiag
