#pragma once

// Shared helpers for the test suites: fixture loading, small domains,
// independent oracles and a seeded random expression generator.

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "darboux/congruence.hpp"
#include "darboux/evaluate.hpp"
#include "darboux/parse.hpp"
#include "darboux/poisson.hpp"
#include "darboux/problem_io.hpp"

namespace testing {

using namespace darboux;

/// Canonical a/b; mpq arithmetic requires canonical operands.
inline Rational ratio(long a, long b) {
    Rational q(a, b);
    q.canonicalize();
    return q;
}

inline std::filesystem::path fixture_path(const std::string& name) {
    return std::filesystem::path(DARBOUX_FIXTURES_DIR) / (name + ".json");
}

inline Problem fixture(const std::string& name) { return load_problem(fixture_path(name)); }

inline Domain positive_domain(std::size_t n, bool with_b = false) {
    Domain d;
    for (std::size_t i = 1; i <= n; ++i) d.add_variable("x" + std::to_string(i), Sign::Positive);
    if (with_b) d.add_parameter("b", Sign::Positive);
    return d;
}

inline Domain free_domain(std::size_t n) {
    Domain d;
    for (std::size_t i = 1; i <= n; ++i) d.add_variable("x" + std::to_string(i));
    return d;
}

inline Expr P(const std::string& text, const Domain& d) { return parse(text, d); }

inline ExprMatrix matrix_of(const std::vector<std::vector<std::string>>& rows, const Domain& d) {
    ExprMatrix M(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) M(i, j) = parse(rows[i][j], d);
    return M;
}

inline StructureMatrix structure_of(const std::vector<std::vector<std::string>>& rows, const Domain& d) {
    return make_structure(d, matrix_of(rows, d));
}

inline ExprMatrix to_expr(const RationalMatrix& A) {
    ExprMatrix M(A.size(), A.size());
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < A.size(); ++j) M(i, j) = Expr(A[i][j]);
    return M;
}

inline bool all_zero(const ExprMatrix& M) {
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j)
            if (!M(i, j).is_zero()) return false;
    return true;
}

inline ExprMatrix difference(const ExprMatrix& A, const ExprMatrix& B) {
    ExprMatrix D(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) D(i, j) = A(i, j) - B(i, j);
    return D;
}

inline ExprMatrix scaled(const Expr& g, const ExprMatrix& A) {
    ExprMatrix D(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) D(i, j) = g * A(i, j);
    return D;
}

/// Rank by division-free elimination with gcd reduction of each row.
/// Written independently of the library's Bareiss routine.
inline std::size_t rank_oracle(const RationalMatrix& A) {
    const std::size_t rows = A.size(), cols = rows ? A[0].size() : 0;
    std::vector<std::vector<mpz_class>> m(rows, std::vector<mpz_class>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        mpz_class den = 1;
        for (const auto& q : A[i]) den *= q.get_den();
        for (std::size_t j = 0; j < cols; ++j) {
            mpq_class v = A[i][j] * den;
            m[i][j] = v.get_num();
        }
    }
    std::size_t rank = 0;
    std::vector<bool> used(rows, false);
    for (std::size_t c = 0; c < cols; ++c) {
        std::size_t p = rows;
        for (std::size_t i = 0; i < rows; ++i)
            if (!used[i] && m[i][c] != 0) { p = i; break; }
        if (p == rows) continue;
        used[p] = true;
        ++rank;
        for (std::size_t i = 0; i < rows; ++i) {
            if (used[i] || m[i][c] == 0) continue;
            mpz_class a = m[p][c], b = m[i][c], g = 0;
            for (std::size_t j = 0; j < cols; ++j) {
                m[i][j] = a * m[i][j] - b * m[p][j];
                mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), m[i][j].get_mpz_t());
            }
            if (g > 1)
                for (auto& v : m[i]) v /= g;
        }
    }
    return rank;
}

inline RationalMatrix rational_product(const RationalMatrix& A, const RationalMatrix& B) {
    const std::size_t n = A.size();
    RationalMatrix C(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (A[i][k] != 0)
                for (std::size_t j = 0; j < n; ++j) C[i][j] += A[i][k] * B[k][j];
    return C;
}

inline RationalMatrix rational_transpose(const RationalMatrix& A) {
    RationalMatrix T(A.size(), std::vector<Rational>(A.size()));
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < A.size(); ++j) T[j][i] = A[i][j];
    return T;
}

inline RationalMatrix to_rational(const ExprMatrix& M) {
    RationalMatrix R(M.rows(), std::vector<Rational>(M.cols()));
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j) R[i][j] = M(i, j).value();
    return R;
}

/// Random skew matrix with small rational entries; rank is random because
/// the entries come from a product of a random low-rank factorization.
inline RationalMatrix random_skew(std::mt19937_64& rng, std::size_t max_n = 8) {
    auto pick = [&](long lo, long hi) { return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    const std::size_t n = static_cast<std::size_t>(pick(1, static_cast<long>(max_n)));
    RationalMatrix A(n, std::vector<Rational>(n));
    if (pick(0, 1) == 0) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                A[i][j] = pick(0, 2) == 0 ? Rational(0) : ratio(pick(-9, 9), pick(1, 6));
                A[j][i] = -A[i][j];
            }
    } else {
        // sum of k wedge products u_t ^ v_t, rank <= 2k
        const std::size_t k = static_cast<std::size_t>(pick(0, static_cast<long>(n / 2)));
        for (std::size_t t = 0; t < k; ++t) {
            std::vector<Rational> u(n), v(n);
            for (std::size_t i = 0; i < n; ++i) {
                u[i] = ratio(pick(-3, 3), pick(1, 3));
                v[i] = ratio(pick(-3, 3), pick(1, 3));
            }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) A[i][j] += u[i] * v[j] - v[i] * u[j];
        }
    }
    return A;
}

/// Seeded random expression over x1, x2 that is defined on the positive
/// quadrant.  Depth-limited; leaves are small rationals or variables.
class RandomExpr {
public:
    explicit RandomExpr(std::uint64_t seed) : rng_(seed) {}

    Expr operator()(int depth = 3) {
        if (depth == 0 || pick(0, 3) == 0) return leaf();
        switch (pick(0, 6)) {
            case 0:
            case 1: return (*this)(depth - 1) + (*this)(depth - 1);
            case 2:
            case 3: return (*this)(depth - 1) * (*this)(depth - 1);
            case 4: return pow(leaf_var() + Expr(pick(1, 3)), ratio(pick(-2, 3), pick(1, 2)));
            case 5: return log(leaf_var() + Expr(pick(1, 2)));
            default: return exp(Expr(Rational(pick(-1, 1), 2)) * leaf_var());
        }
    }

    std::mt19937_64& rng() { return rng_; }

private:
    long pick(long lo, long hi) { return lo + static_cast<long>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    Expr leaf_var() { return Expr::variable(pick(0, 1) ? "x1" : "x2"); }
    Expr leaf() {
        if (pick(0, 2) == 0) return Expr(ratio(pick(-5, 5), pick(1, 4)));
        return leaf_var();
    }

    std::mt19937_64 rng_;
};

}  // namespace testing
