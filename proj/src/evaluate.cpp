#include "darboux/evaluate.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace darboux {

namespace {

constexpr double kPoleThreshold = 1e-300;
constexpr double kQuadratureTolerance = 1e-12;

double lookup(const Env& env, const std::string& name) {
    auto it = env.find(name);
    if (it == env.end()) throw EvaluationError("no value bound for '" + name + "'");
    return it->second;
}

double power(double base, const Rational& q) {
    const double e = q.get_d();
    if (q < 0 && std::abs(base) < kPoleThreshold) throw EvaluationError("pole: negative power of zero");
    if (q.get_den() == 1) return std::pow(base, e);
    if (base < 0) {
        // Odd roots of negative numbers are real.
        if (mpz_odd_p(q.get_den_mpz_t())) {
            double r = std::pow(-base, e);
            return mpz_odd_p(q.get_num_mpz_t()) ? -r : r;
        }
        throw EvaluationError("even root of a negative number");
    }
    return std::pow(base, e);
}

double integrate(const Expr& e, const Env& env) {
    const double upper = lookup(env, e.name());
    const double lower = e.value().get_d();
    if (upper == lower) return 0.0;
    Env inner = env;
    auto f = [&](double t) {
        inner[e.name()] = t;
        return evaluate(e.operand(0), inner);
    };
    double error = 0.0;
    double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, lower, upper, 15, kQuadratureTolerance, &error);
    if (!std::isfinite(value) || error > 1e-9 * (1.0 + std::abs(value))) {
        throw EvaluationError("quadrature of " + to_text(e) + " did not converge");
    }
    return value;
}

}  // namespace

double evaluate(const Expr& e, const Env& env) {
    switch (e.kind()) {
        case Kind::Constant:
            return e.value().get_d();
        case Kind::Variable:
        case Kind::Parameter:
            return lookup(env, e.name());
        case Kind::Sum: {
            double s = 0.0;
            for (const auto& t : e.operands()) s += evaluate(t, env);
            return s;
        }
        case Kind::Product: {
            double p = 1.0;
            for (const auto& f : e.operands()) p *= evaluate(f, env);
            return p;
        }
        case Kind::Power:
            return power(evaluate(e.operand(0), env), e.value());
        case Kind::Log: {
            double a = evaluate(e.operand(0), env);
            if (!(a > 0)) throw EvaluationError("log of a non-positive value");
            return std::log(a);
        }
        case Kind::Exp:
            return std::exp(evaluate(e.operand(0), env));
        case Kind::Integral:
            return integrate(e, env);
    }
    return 0.0;
}

double magnitude(const Expr& e, const Env& env) {
    if (e.kind() != Kind::Sum) return std::abs(evaluate(e, env));
    double s = 0.0;
    for (const auto& t : e.operands()) s += std::abs(evaluate(t, env));
    return s;
}

}  // namespace darboux
