#include "darboux/poisson.hpp"

#include <Eigen/Dense>

#include "darboux/calculus.hpp"

namespace darboux {

StructureMatrix make_structure(Domain domain, ExprMatrix entries, std::optional<Expr> hamiltonian) {
    if (entries.rows() != entries.cols()) throw std::invalid_argument("structure matrix must be square");
    if (entries.rows() != domain.dimension())
        throw std::invalid_argument("structure matrix size does not match the number of variables");
    for (std::size_t i = 0; i < entries.rows(); ++i)
        for (std::size_t j = 0; j < entries.cols(); ++j) {
            entries(i, j) = simplify(entries(i, j));
            domain.require_declared(entries(i, j));
        }
    if (hamiltonian) domain.require_declared(*hamiltonian);
    return StructureMatrix{std::move(domain), std::move(entries), std::move(hamiltonian)};
}

CanonicalTarget canonical_matrix(std::size_t n, std::size_t r) {
    if (r % 2 != 0) throw std::invalid_argument("canonical rank must be even");
    if (r > n) throw std::invalid_argument("canonical rank exceeds dimension");
    ExprMatrix S(n, n);
    for (std::size_t b = 0; b < r; b += 2) {
        S(b, b + 1) = Expr(1);
        S(b + 1, b) = Expr(-1);
    }
    return CanonicalTarget{n, r, std::move(S)};
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Undetermined: return "undetermined";
    }
    return "undetermined";
}

namespace {

// Folds a zero test into a running report; returns true when the caller should stop.
bool record(CheckReport& report, const ZeroVerdict& z, const Expr& residual, std::vector<std::size_t> where) {
    if (z.is(Outcome::Zero)) {
        if (report.verdict == Verdict::Pass && z.max_residual >= report.evidence.max_residual)
            report.evidence = z;
        return false;
    }
    if (z.is(Outcome::Nonzero)) {
        report = CheckReport{Verdict::Fail, std::move(where), residual, z};
        return true;
    }
    if (report.verdict == Verdict::Pass) report = CheckReport{Verdict::Undetermined, std::move(where), residual, z};
    return false;
}

}  // namespace

CheckReport check_skew(const StructureMatrix& J, const SamplerConfig& cfg) {
    CheckReport report;
    const std::size_t n = J.dimension();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            Expr s = J(i, j) + J(j, i);
            if (record(report, is_zero(s, J.domain, cfg), s, {i + 1, j + 1})) return report;
        }
    return report;
}

Expr jacobi_residual(const StructureMatrix& J, std::size_t i, std::size_t j, std::size_t k) {
    std::vector<Expr> terms;
    for (std::size_t l = 0; l < J.dimension(); ++l) {
        const std::string& v = J.domain.variables()[l];
        terms.push_back(J(l, i) * differentiate(J(j, k), v));
        terms.push_back(J(l, j) * differentiate(J(k, i), v));
        terms.push_back(J(l, k) * differentiate(J(i, j), v));
    }
    return add(std::move(terms));
}

CheckReport check_jacobi(const StructureMatrix& J, const SamplerConfig& cfg) {
    CheckReport report;
    const std::size_t n = J.dimension();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                Expr r = jacobi_residual(J, i, j, k);
                if (record(report, is_zero(r, J.domain, cfg), r, {i + 1, j + 1, k + 1})) return report;
            }
    return report;
}

int numeric_rank(const StructureMatrix& J, const Env& point) {
    const std::size_t n = J.dimension();
    if (n == 0) return 0;
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = evaluate(J(i, j), point);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    const double top = s.size() ? s(0) : 0.0;
    if (top == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > 1e-8 * top) ++rank;
    return rank;
}

RankReport generic_rank(const StructureMatrix& J, const SamplerConfig& cfg) {
    RankReport report;
    PointSampler sampler(J.domain, cfg.seed);
    std::vector<std::pair<Env, int>> seen;
    for (int k = 0; k < cfg.samples; ++k) {
        for (int a = 0; a < cfg.max_attempts; ++a) {
            Env p = sampler.point(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(a));
            try {
                seen.emplace_back(p, numeric_rank(J, p));
                break;
            } catch (const EvaluationError&) {
            }
        }
    }
    // Unrestricted coordinates admit the origin, where linear structures degenerate.
    bool has_free = false;
    Env probe = seen.empty() ? sampler.point(0) : seen.front().first;
    for (const auto& v : J.domain.variables())
        if (J.domain.sign(v) == Sign::Unrestricted) {
            probe[v] = 0.0;
            has_free = true;
        }
    if (has_free) {
        try {
            seen.emplace_back(probe, numeric_rank(J, probe));
        } catch (const EvaluationError&) {
        }
    }
    report.samples = static_cast<int>(seen.size());
    for (const auto& [p, r] : seen) report.rank = std::max(report.rank, r);
    for (const auto& [p, r] : seen)
        if (r != report.rank) {
            report.consistent = false;
            report.witness = p;
            report.witness_rank = r;
            break;
        }
    return report;
}

ExprMatrix transform_structure(const ExprMatrix& J, const ExprMatrix& K) {
    const std::size_t n = J.rows();
    if (J.cols() != n || K.rows() != n || K.cols() != n) throw std::invalid_argument("matrix dimension mismatch");
    ExprMatrix KJ = K * J;
    ExprMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            std::vector<Expr> terms;
            for (std::size_t l = 0; l < n; ++l)
                if (!KJ(i, l).is_zero() && !K(j, l).is_zero()) terms.push_back(KJ(i, l) * K(j, l));
            out(i, j) = add(std::move(terms));
            out(j, i) = -out(i, j);
        }
    return out;
}

CheckReport check_casimir(const StructureMatrix& J, const Expr& C, const SamplerConfig& cfg) {
    J.domain.require_declared(C);
    const std::size_t n = J.dimension();
    std::vector<Expr> grad(n);
    for (std::size_t l = 0; l < n; ++l) grad[l] = differentiate(C, J.domain.variables()[l]);
    CheckReport report;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Expr> terms;
        for (std::size_t l = 0; l < n; ++l) terms.push_back(J(i, l) * grad[l]);
        Expr c = add(std::move(terms));
        if (record(report, is_zero(c, J.domain, cfg), c, {i + 1})) return report;
    }
    return report;
}

}  // namespace darboux
