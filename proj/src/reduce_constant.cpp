#include "darboux/congruence.hpp"

namespace darboux {

namespace {

struct ConstantWork {
    RationalMatrix A;
    ReductionTrace trace;

    void apply(const ElementaryTransform& t) {
        const std::size_t n = A.size();
        // Row then column, in exact arithmetic.
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t c = 0; c < n; ++c) {
                Rational& a = pass == 0 ? A[t.i][c] : A[c][t.i];
                Rational b = pass == 0 ? A[t.j][c] : A[c][t.j];
                switch (t.kind) {
                    case ElementaryTransform::Kind::Permute: {
                        Rational& bb = pass == 0 ? A[t.j][c] : A[c][t.j];
                        std::swap(a, bb);
                        break;
                    }
                    case ElementaryTransform::Kind::Scale:
                        a *= t.xi.value();
                        break;
                    case ElementaryTransform::Kind::Combine:
                        a += t.xi.value() * b;
                        break;
                }
            }
        }
        trace.K = apply_row(trace.K, t);
        ExprMatrix after(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) after(i, j) = Expr(A[i][j]);
        trace.steps.push_back(ReductionStep{t, true, "constant coefficient", std::move(after)});
    }
};

}  // namespace

ConstantReduction reduce_constant(const RationalMatrix& A) {
    const std::size_t n = A.size();
    for (const auto& row : A)
        if (row.size() != n) throw std::invalid_argument("matrix must be square");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (A[i][j] != -A[j][i]) throw std::invalid_argument("matrix is not skew-symmetric");

    ConstantWork w{A, {}};
    w.trace.initial = ExprMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w.trace.initial(i, j) = Expr(A[i][j]);
    w.trace.K = ExprMatrix::identity(n);

    std::size_t p = 0;
    while (p + 1 < n) {
        std::size_t pi = n, pj = n;
        if (w.A[p][p + 1] != 0) {
            pi = p;
            pj = p + 1;
        } else {
            for (std::size_t i = p; i < n && pi == n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (w.A[i][j] != 0) {
                        pi = i;
                        pj = j;
                        break;
                    }
        }
        if (pi == n) break;
        if (pi != p) {
            w.apply(ElementaryTransform::permute(n, p, pi));
            if (pj == p) pj = pi;
        }
        if (pj != p + 1) w.apply(ElementaryTransform::permute(n, p + 1, pj));
        const Rational a = w.A[p][p + 1];
        if (a != 1) w.apply(ElementaryTransform::scale(n, p, Expr(Rational(1 / a))));
        for (std::size_t k = p + 2; k < n; ++k) {
            if (w.A[k][p] != 0) w.apply(ElementaryTransform::combine(n, k, Expr(w.A[k][p]), p + 1));
            if (w.A[k][p + 1] != 0) w.apply(ElementaryTransform::combine(n, k, Expr(Rational(-w.A[k][p + 1])), p));
        }
        p += 2;
    }
    return ConstantReduction{std::move(w.trace), p};
}

}  // namespace darboux
