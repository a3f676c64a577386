#pragma once

#include <stdexcept>
#include <string>

#include "darboux/domain.hpp"
#include "darboux/expr.hpp"

namespace darboux {

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact partial derivative.  An unevaluated integral over `variable` yields
/// its integrand; over any other variable it is constant and yields 0.
Expr differentiate(const Expr& e, const std::string& variable);

struct Antiderivative {
    Expr value;
    /// False when some part of the result is an unevaluated integral.
    bool closed_form = true;
};

/**
 * Antiderivative of an integrand that depends on `variable` only
 * (parameters allowed).  Throws IntegrationError for multivariate input.
 * The constant of integration is 0.
 */
Antiderivative integrate_univariate(const Expr& e, const std::string& variable, const Domain& domain);

/**
 * Term-wise antiderivative in `variable`, treating every other variable as a
 * constant factor.  Closed forms come from a small table:
 *
 *   c*v^q (q != -1)        -> c*v^(q+1)/(q+1)
 *   c/v                    -> c*log(v) or c*log(-v), chosen by the sign of v
 *   c*exp(a*v+b)           -> c*exp(a*v+b)/a
 *   c*(a*v+b)^q (q != -1)  -> c*(a*v+b)^(q+1)/(a*(q+1))
 *
 * Other terms become unevaluated integrals anchored inside the domain, as long
 * as their v-dependent factor is univariate; otherwise IntegrationError.
 * Integrating 1/v over a variable without a definite sign is refused.
 */
Antiderivative antiderivative(const Expr& e, const std::string& variable, const Domain& domain);

}  // namespace darboux
