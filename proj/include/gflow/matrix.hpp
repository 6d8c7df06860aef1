#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace gflow {

// Dense row-major matrix of doubles. Plain value type; all arithmetic lives
// in the kernel layer.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix full(std::size_t rows, std::size_t cols, double value) {
        Matrix m(rows, cols);
        m.data_.assign(rows * cols, value);
        return m;
    }

    double& operator()(std::size_t r, std::size_t c) {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }
    double operator()(std::size_t r, std::size_t c) const {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    bool same_shape(const Matrix& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }

    void fill(double value) { data_.assign(data_.size(), value); }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Compressed sparse row matrix with explicit values. Column indices are
// sorted within each row.
struct CsrMatrix {
    int rows = 0;
    std::vector<int> row_ptr; // size rows + 1
    std::vector<int> col;
    std::vector<double> val;

    std::span<const int> row_cols(int r) const {
        return {col.data() + row_ptr[r], static_cast<std::size_t>(row_ptr[r + 1] - row_ptr[r])};
    }
    std::span<const double> row_vals(int r) const {
        return {val.data() + row_ptr[r], static_cast<std::size_t>(row_ptr[r + 1] - row_ptr[r])};
    }
};

} // namespace gflow
