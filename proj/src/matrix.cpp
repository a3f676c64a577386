#include "darboux/matrix.hpp"

namespace darboux {

ExprMatrix ExprMatrix::identity(std::size_t n) {
    ExprMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Expr(1);
    return m;
}

ExprMatrix ExprMatrix::transpose() const {
    ExprMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool ExprMatrix::is_constant() const {
    for (const auto& e : data_)
        if (!e.is_constant()) return false;
    return true;
}

ExprMatrix operator*(const ExprMatrix& a, const ExprMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix dimension mismatch");
    ExprMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            std::vector<Expr> terms;
            for (std::size_t k = 0; k < a.cols(); ++k)
                if (!a(i, k).is_zero() && !b(k, j).is_zero()) terms.push_back(a(i, k) * b(k, j));
            c(i, j) = add(std::move(terms));
        }
    return c;
}

}  // namespace darboux
