#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "darboux/expr.hpp"

namespace darboux {

/// Dense row-major matrix of expressions.
class ExprMatrix {
public:
    ExprMatrix() = default;
    ExprMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static ExprMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Expr& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Expr& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    ExprMatrix transpose() const;
    bool is_constant() const;

    friend bool operator==(const ExprMatrix& a, const ExprMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Expr> data_;
};

ExprMatrix operator*(const ExprMatrix& a, const ExprMatrix& b);

}  // namespace darboux
