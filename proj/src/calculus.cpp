#include "darboux/calculus.hpp"

#include <optional>
#include <vector>

namespace darboux {

Expr differentiate(const Expr& e, const std::string& v) {
    switch (e.kind()) {
        case Kind::Constant:
        case Kind::Parameter:
            return Expr(0);
        case Kind::Variable:
            return Expr(e.name() == v ? 1 : 0);
        case Kind::Sum: {
            std::vector<Expr> terms;
            for (const auto& t : e.operands()) terms.push_back(differentiate(t, v));
            return add(std::move(terms));
        }
        case Kind::Product: {
            auto ops = e.operands();
            std::vector<Expr> terms;
            for (std::size_t k = 0; k < ops.size(); ++k) {
                Expr d = differentiate(ops[k], v);
                if (d.is_zero()) continue;
                std::vector<Expr> fs(ops.begin(), ops.end());
                fs[k] = d;
                terms.push_back(mul(std::move(fs)));
            }
            return add(std::move(terms));
        }
        case Kind::Power: {
            const Expr& base = e.operand(0);
            Expr d = differentiate(base, v);
            if (d.is_zero()) return Expr(0);
            return mul({Expr(e.value()), pow(base, e.value() - 1), d});
        }
        case Kind::Log: {
            Expr d = differentiate(e.operand(0), v);
            if (d.is_zero()) return Expr(0);
            return d / e.operand(0);
        }
        case Kind::Exp:
            return e * differentiate(e.operand(0), v);
        case Kind::Integral:
            return e.name() == v ? e.operand(0) : Expr(0);
    }
    return Expr(0);
}

namespace {

bool depends_on(const Expr& e, const std::string& v) { return free_variables(e).count(v) != 0; }

// Returns a, b with e == a*v + b when e is affine in v with a free of v.
bool affine_in(const Expr& e, const std::string& v, Expr& slope) {
    Expr a = differentiate(e, v);
    if (a.is_zero() || depends_on(a, v)) return false;
    slope = a;
    return true;
}

struct TermParts {
    Expr multiplier;  // factors free of v, including the coefficient
    Expr dependent;   // product of factors that depend on v
    std::vector<Expr> dependent_factors;
};

TermParts split_term(const Expr& term, const std::string& v) {
    std::vector<Expr> free, dep;
    if (term.kind() == Kind::Product) {
        for (const auto& f : term.operands()) (depends_on(f, v) ? dep : free).push_back(f);
    } else {
        (depends_on(term, v) ? dep : free).push_back(term);
    }
    return {mul(free), mul(dep), dep};
}

std::optional<Expr> table_entry(const TermParts& parts, const std::string& v, const Domain& domain) {
    const Expr var = Expr::variable(v);
    if (parts.dependent_factors.empty()) return var;
    if (parts.dependent_factors.size() != 1) return std::nullopt;
    const Expr& f = parts.dependent_factors.front();

    if (f == var) return pow(var, 2) / Expr(2);
    if (f.kind() == Kind::Power) {
        const Expr& base = f.operand(0);
        const Rational q = f.value();
        if (base == var) {
            if (q != -1) return pow(var, q + 1) / Expr(Rational(q + 1));
            switch (domain.sign(v)) {
                case Sign::Positive: return log(var);
                case Sign::Negative: return log(-var);
                default:
                    throw IntegrationError("integrating 1/" + v + " needs a positive or negative sign assumption on " + v);
            }
        }
        Expr slope;
        if (q != -1 && affine_in(base, v, slope)) return pow(base, q + 1) / (slope * Expr(Rational(q + 1)));
        return std::nullopt;
    }
    if (f.kind() == Kind::Exp) {
        Expr slope;
        if (affine_in(f.operand(0), v, slope)) return f / slope;
    }
    return std::nullopt;
}

}  // namespace

Antiderivative antiderivative(const Expr& e, const std::string& v, const Domain& domain) {
    if (!domain.has_variable(v)) throw IntegrationError("'" + v + "' is not a declared variable");
    std::vector<Expr> terms;
    if (e.kind() == Kind::Sum) {
        terms.assign(e.operands().begin(), e.operands().end());
    } else {
        terms.push_back(e);
    }
    std::vector<Expr> out;
    bool closed = true;
    const Rational anchor = quadrature_anchor(domain.sign(v));
    for (const auto& t : terms) {
        TermParts parts = split_term(t, v);
        if (auto entry = table_entry(parts, v, domain)) {
            out.push_back(parts.multiplier * *entry);
            continue;
        }
        auto vars = free_variables(parts.dependent);
        if (vars.size() != 1) {
            throw IntegrationError("no antiderivative in " + v + " for non-separable term " + to_text(t));
        }
        closed = false;
        out.push_back(parts.multiplier * integral(parts.dependent, v, anchor));
    }
    return {add(std::move(out)), closed};
}

Antiderivative integrate_univariate(const Expr& e, const std::string& v, const Domain& domain) {
    for (const auto& name : free_variables(e)) {
        if (name != v) throw IntegrationError("integrand " + to_text(e) + " depends on " + name + " besides " + v);
    }
    return antiderivative(e, v, domain);
}

}  // namespace darboux
