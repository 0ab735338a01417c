#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace mtfl {

/// Dense row-major matrix of doubles. Rows are contiguous, which is the
/// layout every kernel below assumes (a weight matrix row = one feature's
/// per-task profile).
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<double>> &rows) {
        if (rows.empty())
            return {};
        Matrix m(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            assert(rows[i].size() == m.cols_);
            for (std::size_t j = 0; j < m.cols_; ++j)
                m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double &operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    double *data() { return data_.data(); }
    const double *data() const { return data_.data(); }

    std::span<double> row(std::size_t i) {
        assert(i < rows_);
        return {data_.data() + i * cols_, cols_};
    }
    std::span<const double> row(std::size_t i) const {
        assert(i < rows_);
        return {data_.data() + i * cols_, cols_};
    }

    std::vector<double> col(std::size_t j) const {
        assert(j < cols_);
        std::vector<double> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            out[i] = data_[i * cols_ + j];
        return out;
    }

    void set_col(std::size_t j, std::span<const double> v) {
        assert(j < cols_ && v.size() == rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            data_[i * cols_ + j] = v[i];
    }

    void fill(double v) { data_.assign(data_.size(), v); }

    /// New matrix keeping only the listed rows, in the given order.
    Matrix take_rows(std::span<const std::size_t> idx) const {
        Matrix out(idx.size(), cols_);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            assert(idx[i] < rows_);
            for (std::size_t j = 0; j < cols_; ++j)
                out(i, j) = (*this)(idx[i], j);
        }
        return out;
    }

    /// New matrix keeping only the listed columns, in the given order.
    Matrix take_cols(std::span<const std::size_t> idx) const {
        Matrix out(rows_, idx.size());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) {
                assert(idx[j] < cols_);
                out(i, j) = (*this)(i, idx[j]);
            }
        return out;
    }

    Matrix transposed() const {
        Matrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                out(j, i) = (*this)(i, j);
        return out;
    }

    bool same_shape(const Matrix &other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const Matrix &a, const Matrix &b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

} // namespace mtfl
