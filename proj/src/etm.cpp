#include <stdexcept>

#include "darboux/calculus.hpp"
#include "darboux/congruence.hpp"

namespace darboux {

ElementaryTransform ElementaryTransform::permute(std::size_t n, std::size_t i, std::size_t j) {
    if (i == j || i >= n || j >= n) throw std::invalid_argument("permutation needs two distinct rows");
    return ElementaryTransform{Kind::Permute, n, i, j, Expr(1)};
}

ElementaryTransform ElementaryTransform::scale(std::size_t n, std::size_t i, Expr xi) {
    if (i >= n) throw std::invalid_argument("row index out of range");
    if (xi.is_zero()) throw std::invalid_argument("scaling by zero");
    return ElementaryTransform{Kind::Scale, n, i, i, std::move(xi)};
}

ElementaryTransform ElementaryTransform::combine(std::size_t n, std::size_t i, Expr xi, std::size_t j) {
    if (i == j || i >= n || j >= n) throw std::invalid_argument("combination needs two distinct rows");
    return ElementaryTransform{Kind::Combine, n, i, j, std::move(xi)};
}

std::string to_string(ElementaryTransform::Kind k) {
    switch (k) {
        case ElementaryTransform::Kind::Permute: return "permute";
        case ElementaryTransform::Kind::Scale: return "scale";
        case ElementaryTransform::Kind::Combine: return "combine";
    }
    return "permute";
}

std::string describe(const ElementaryTransform& t) {
    const std::string i = std::to_string(t.i + 1), j = std::to_string(t.j + 1);
    switch (t.kind) {
        case ElementaryTransform::Kind::Permute: return "P[" + i + "," + j + "]";
        case ElementaryTransform::Kind::Scale: return "M[" + i + ";" + to_text(t.xi) + "]";
        case ElementaryTransform::Kind::Combine: return "L[" + i + ";" + to_text(t.xi) + "," + j + "]";
    }
    return {};
}

ExprMatrix etm_matrix(const ElementaryTransform& t) {
    ExprMatrix E = ExprMatrix::identity(t.n);
    switch (t.kind) {
        case ElementaryTransform::Kind::Permute:
            E(t.i, t.i) = Expr(0);
            E(t.j, t.j) = Expr(0);
            E(t.i, t.j) = Expr(1);
            E(t.j, t.i) = Expr(1);
            break;
        case ElementaryTransform::Kind::Scale:
            E(t.i, t.i) = t.xi;
            break;
        case ElementaryTransform::Kind::Combine:
            E(t.i, t.j) = t.xi;
            break;
    }
    return E;
}

JetmCheck is_jetm(const ElementaryTransform& t, const Domain& domain) {
    if (t.kind == ElementaryTransform::Kind::Permute) return {true, "permutation"};
    const std::size_t k = t.kind == ElementaryTransform::Kind::Scale ? t.i : t.j;
    const std::string& v = domain.variables().at(k);
    for (const auto& w : free_variables(t.xi))
        if (w != v) return {false, "coefficient depends on " + w + ", not only on " + v};
    return {true, t.xi.is_constant() ? "constant coefficient" : "coefficient depends only on " + v};
}

Diffeomorphism jetm_diffeomorphism(const ElementaryTransform& t, const Domain& domain) {
    JetmCheck check = is_jetm(t, domain);
    if (!check.jetm) throw std::invalid_argument("not a Jacobian elementary transform: " + check.reason);
    Diffeomorphism d;
    for (std::size_t k = 0; k < t.n; ++k) d.y.push_back(domain.variable(k));
    switch (t.kind) {
        case ElementaryTransform::Kind::Permute:
            std::swap(d.y[t.i], d.y[t.j]);
            break;
        case ElementaryTransform::Kind::Scale: {
            auto a = antiderivative(t.xi, domain.variables()[t.i], domain);
            d.y[t.i] = a.value;
            d.closed_form = a.closed_form;
            break;
        }
        case ElementaryTransform::Kind::Combine: {
            auto a = antiderivative(t.xi, domain.variables()[t.j], domain);
            d.y[t.i] = d.y[t.i] + a.value;
            d.closed_form = a.closed_form;
            break;
        }
    }
    return d;
}

ExprMatrix apply_row(const ExprMatrix& K, const ElementaryTransform& t) {
    ExprMatrix out = K;
    for (std::size_t c = 0; c < K.cols(); ++c) {
        switch (t.kind) {
            case ElementaryTransform::Kind::Permute:
                std::swap(out(t.i, c), out(t.j, c));
                break;
            case ElementaryTransform::Kind::Scale:
                out(t.i, c) = t.xi * K(t.i, c);
                break;
            case ElementaryTransform::Kind::Combine:
                if (!K(t.j, c).is_zero()) out(t.i, c) = K(t.i, c) + t.xi * K(t.j, c);
                break;
        }
    }
    return out;
}

ExprMatrix apply_step(const ExprMatrix& M, const ElementaryTransform& t) {
    if (M.rows() != t.n || M.cols() != t.n) throw std::invalid_argument("matrix dimension mismatch");
    ExprMatrix R = apply_row(M, t);
    // Column operation: the same row operation applied to the transpose.
    return apply_row(R.transpose(), t).transpose();
}

}  // namespace darboux
