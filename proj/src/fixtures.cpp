#include "darboux/fixtures.hpp"

#include <random>

#include "darboux/parse.hpp"

namespace darboux {

namespace {

std::string xname(std::size_t i) { return "x" + std::to_string(i + 1); }

Problem from_matrix(Domain d, ExprMatrix M, const std::string& name) {
    Problem p;
    p.name = name;
    p.J = make_structure(std::move(d), std::move(M));
    return p;
}

}  // namespace

std::size_t rational_rank(const RationalMatrix& A) {
    // Bareiss elimination on the matrix scaled to integers row by row.
    const std::size_t rows = A.size(), cols = rows ? A[0].size() : 0;
    std::vector<std::vector<mpz_class>> m(rows, std::vector<mpz_class>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        mpz_class l = 1;
        for (const auto& q : A[i]) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
        for (std::size_t j = 0; j < cols; ++j) m[i][j] = A[i][j].get_num() * (l / A[i][j].get_den());
    }
    std::size_t rank = 0;
    mpz_class prev = 1;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t piv = rank;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[rank], m[piv]);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) m[i][j] = (m[rank][c] * m[i][j] - m[i][c] * m[rank][j]) / prev;
            m[i][c] = 0;
        }
        prev = m[rank][c];
        ++rank;
    }
    return rank;
}

Problem separable_problem(const RationalMatrix& A, const std::vector<Expr>& phi, const std::string& name) {
    const std::size_t n = A.size();
    if (phi.size() != n) throw std::invalid_argument("one phi per coordinate is required");
    Domain d;
    for (std::size_t i = 0; i < n; ++i) d.add_variable(xname(i), Sign::Positive);
    for (std::size_t i = 0; i < n; ++i) {
        auto fv = free_variables(phi[i]);
        if (fv.size() > 1 || (fv.size() == 1 && *fv.begin() != xname(i)))
            throw std::invalid_argument("phi_" + std::to_string(i + 1) + " must depend on " + xname(i) + " only");
    }
    ExprMatrix M(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (A[i][j] != -A[j][i]) throw std::invalid_argument("A must be skew-symmetric");
            M(i, j) = Expr(A[i][j]) * phi[i] * phi[j];
        }
    return from_matrix(std::move(d), std::move(M), name);
}

Problem random_separable(std::uint64_t seed, std::size_t max_n) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](long lo, long hi) { return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    const std::size_t n = static_cast<std::size_t>(uniform(2, static_cast<long>(max_n)));
    const std::size_t r = 2 * static_cast<std::size_t>(uniform(1, static_cast<long>(n / 2)));

    // A = c * B * S(n,r) * B^T with B unimodular-free but invertible.
    RationalMatrix B;
    do {
        B.assign(n, std::vector<Rational>(n));
        for (auto& row : B)
            for (auto& b : row) b = uniform(-2, 2);
    } while (rational_rank(B) != n);
    Rational c(uniform(1, 5), uniform(1, 4));
    c.canonicalize();
    RationalMatrix A(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Rational s = 0;
            for (std::size_t k = 0; k + 1 < r; k += 2) s += B[i][k] * B[j][k + 1] - B[i][k + 1] * B[j][k];
            A[i][j] = c * s;
        }

    std::vector<Expr> phi;
    for (std::size_t i = 0; i < n; ++i) {
        Expr x = Expr::variable(xname(i));
        switch (uniform(0, 3)) {
            case 0: phi.push_back(Expr(Rational(uniform(1, 3), uniform(1, 3)))); break;
            case 1: phi.push_back(x); break;
            case 2: phi.push_back(Expr(1) / x); break;
            default: phi.push_back(exp(x)); break;
        }
    }
    return separable_problem(A, phi, "separable-" + std::to_string(seed));
}

Problem dpsi_problem(const RationalMatrix& A, const std::vector<std::vector<Rational>>& kernel, const std::string& psi,
                     const std::string& name) {
    const std::size_t n = A.size();
    Domain zdom;
    for (std::size_t k = 0; k < kernel.size(); ++k) zdom.add_variable("z" + std::to_string(k + 1));
    Expr psi_z = parse(psi, zdom);

    Domain d;
    for (std::size_t i = 0; i < n; ++i) d.add_variable(xname(i));
    std::map<std::string, Expr> sub;
    for (std::size_t k = 0; k < kernel.size(); ++k) {
        const auto& v = kernel[k];
        if (v.size() != n) throw std::invalid_argument("kernel vector has the wrong length");
        for (std::size_t i = 0; i < n; ++i) {
            Rational s = 0;
            for (std::size_t j = 0; j < n; ++j) s += A[i][j] * v[j];
            if (s != 0) throw std::invalid_argument("vector " + std::to_string(k + 1) + " is not in the kernel of A");
        }
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < n; ++i) terms.push_back(Expr(v[i]) * Expr::variable(xname(i)));
        sub["z" + std::to_string(k + 1)] = add(std::move(terms));
    }
    if (rational_rank(kernel) != kernel.size()) throw std::invalid_argument("kernel vectors are dependent");
    if (rational_rank(A) + kernel.size() != n) throw std::invalid_argument("kernel vectors do not span the kernel");
    Expr factor = substitute(psi_z, sub);
    ExprMatrix M(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M(i, j) = Expr(A[i][j]) * factor;
    return from_matrix(std::move(d), std::move(M), name);
}

Problem dpsi_example(const std::string& psi) {
    RationalMatrix A{{0, 1, -1, -1}, {-1, 0, 0, 1}, {1, 0, 0, -1}, {1, -1, 1, 0}};
    return dpsi_problem(A, {{0, 1, 1, 0}, {1, 1, 0, 1}}, psi, "dpsi");
}

}  // namespace darboux
