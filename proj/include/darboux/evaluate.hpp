#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>

#include "darboux/expr.hpp"

namespace darboux {

/// Numeric values for variables and parameters.
using Env = std::unordered_map<std::string, double>;

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Evaluates e in double precision.  Throws EvaluationError at poles
 * (|base| < 1e-300 under a negative power), outside the real domain of
 * log/fractional powers, on unbound symbols, and when adaptive quadrature
 * of an unevaluated integral does not converge.
 */
double evaluate(const Expr& e, const Env& env);

/// Sum of the absolute values of the top-level terms of e.  Used as the
/// scale against which cancellation residuals are judged.
double magnitude(const Expr& e, const Env& env);

}  // namespace darboux
