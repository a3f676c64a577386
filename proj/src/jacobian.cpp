#include "darboux/calculus.hpp"
#include "darboux/congruence.hpp"

namespace darboux {

std::vector<std::string> darboux_names(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= n; ++i) names.push_back("y" + std::to_string(i));
    return names;
}

CheckReport jacobian_condition(const ExprMatrix& K, const Domain& domain, const SamplerConfig& cfg) {
    const std::size_t n = K.rows();
    const auto& vars = domain.variables();
    CheckReport report;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                Expr d = differentiate(K(i, j), vars[k]) - differentiate(K(i, k), vars[j]);
                ZeroVerdict z = is_zero(d, domain, cfg);
                if (z.is(Outcome::Zero)) continue;
                if (z.is(Outcome::Nonzero))
                    return CheckReport{Verdict::Fail, {i + 1, j + 1, k + 1}, d, z};
                if (report.passed()) report = CheckReport{Verdict::Undetermined, {i + 1, j + 1, k + 1}, d, z};
            }
    return report;
}

Diffeomorphism integrate_jacobian(const ExprMatrix& K, const Domain& domain, const SamplerConfig& cfg) {
    const std::size_t n = K.rows();
    const auto& vars = domain.variables();
    Diffeomorphism out;
    for (std::size_t i = 0; i < n; ++i) {
        Expr y(0);
        for (std::size_t j = 0; j < n; ++j) {
            Expr rest = K(i, j) - differentiate(y, vars[j]);
            if (rest.is_zero()) continue;
            // What is left must not depend on the variables already integrated.
            for (std::size_t l = 0; l < j; ++l) {
                ZeroVerdict z = is_zero(differentiate(rest, vars[l]), domain, cfg);
                if (!z.is(Outcome::Zero))
                    throw IntegrationError("row " + std::to_string(i + 1) + " is not a gradient: column " +
                                           std::to_string(j + 1) + " still depends on " + vars[l]);
            }
            Antiderivative a = antiderivative(rest, vars[j], domain);
            out.closed_form = out.closed_form && a.closed_form;
            y = y + a.value;
        }
        for (std::size_t j = 0; j < n; ++j) {
            ZeroVerdict z = is_zero(differentiate(y, vars[j]) - K(i, j), domain, cfg);
            if (!z.is(Outcome::Zero))
                throw IntegrationError("re-differentiation mismatch at (" + std::to_string(i + 1) + "," +
                                       std::to_string(j + 1) + ")");
        }
        out.y.push_back(y);
    }
    return out;
}

ScalarFactor extract_scalar_factor(const ExprMatrix& M, std::size_t n, std::size_t r, const Domain& domain,
                                   const SamplerConfig& cfg) {
    ScalarFactor out;
    const ExprMatrix S = canonical_matrix(n, r).matrix;
    out.g = r == 0 ? Expr(1) : M(0, 1);
    out.matches = true;
    for (std::size_t i = 0; i < n && out.matches; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Expr d = M(i, j) - out.g * S(i, j);
            if (!is_zero(d, domain, cfg).is(Outcome::Zero)) {
                out.matches = false;
                out.mismatch = {i + 1, j + 1};
                break;
            }
        }
    out.nonvanishing = is_nonvanishing(out.g, domain, cfg);
    return out;
}

std::vector<std::string> ReparamVerdict::properties() const {
    std::vector<std::string> out;
    if (constant) out.push_back("constant factor");
    if (rank_at_most_two) out.push_back("rank at most two");
    if (casimir_dependent) out.push_back("depends only on Casimir coordinates");
    if (symplectic_violation) out.push_back("non-constant factor on a symplectic form of dimension at least four");
    return out;
}

std::string ReparamVerdict::basis() const {
    std::string out;
    for (const auto& p : properties()) out += (out.empty() ? "" : "; ") + p;
    if (direct_jacobi) out += (out.empty() ? "" : "; ") + ("direct Jacobi check " + to_string(*direct_jacobi));
    return out.empty() ? "undetermined" : out;
}

ReparamVerdict reparam_validity(const Expr& g, std::size_t n, std::size_t r, const Domain& coordinates,
                                const std::set<std::string>& casimir_coordinates, const SamplerConfig& cfg) {
    ReparamVerdict v;
    v.constant = is_variable_free(g);
    v.rank_at_most_two = r <= 2;
    v.casimir_dependent = true;
    for (const auto& name : free_variables(g))
        if (!casimir_coordinates.count(name)) v.casimir_dependent = false;
    v.symplectic_violation = r == n && n >= 4 && !v.constant;
    if (v.constant || v.rank_at_most_two || v.casimir_dependent) {
        v.verdict = Verdict::Pass;
        return v;
    }
    if (v.symplectic_violation) {
        v.verdict = Verdict::Fail;
        return v;
    }
    ExprMatrix gS = canonical_matrix(n, r).matrix;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) gS(i, j) = g * gS(i, j);
    StructureMatrix J{coordinates, gS, std::nullopt};
    v.direct_jacobi = check_jacobi(J, cfg).verdict;
    v.verdict = *v.direct_jacobi;
    return v;
}

std::vector<Expr> casimirs_from(const StructureMatrix& J, const DarbouxResult& result, const SamplerConfig& cfg) {
    if (result.y.size() != result.n) throw std::logic_error("result carries no diffeomorphism");
    std::vector<Expr> out(result.y.begin() + static_cast<std::ptrdiff_t>(result.r), result.y.end());
    for (std::size_t k = 0; k < out.size(); ++k) {
        CheckReport c = check_casimir(J, out[k], cfg);
        if (!c.passed())
            throw std::logic_error("extracted Casimir y" + std::to_string(result.r + k + 1) + " = " +
                                   to_text(out[k]) + " fails J*grad(C) = 0");
    }
    return out;
}

}  // namespace darboux
