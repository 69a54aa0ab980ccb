#pragma once

#include <cstddef>
#include <vector>

#include "fp/common.hpp"

namespace fp {

// Dense row-major matrix of doubles shared by the feature, regression and
// model-fitting code.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const double* row(std::size_t r) const { return data_.data() + r * cols_; }
    double* row(std::size_t r) { return data_.data() + r * cols_; }

    const std::vector<double>& data() const { return data_; }

    void push_row(const std::vector<double>& values) {
        if (cols_ == 0) cols_ = values.size();
        if (values.size() != cols_) throw ValidationError("row length does not match matrix width");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace fp
