#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace darboux {

using Rational = mpq_class;

/// Node kinds, in the order used by the canonical term ordering.
enum class Kind {
    Constant,
    Parameter,
    Variable,
    Log,
    Exp,
    Integral,
    Sum,
    Product,
    Power,
};

class Expr;

/// Thrown when an operation has no meaning for its operands (0^-1, bad exponent, ...).
class ExprError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Immutable symbolic expression.
 *
 * Every Expr is kept in canonical form: the factory functions below are the
 * only way to build compound nodes and each of them normalizes its result.
 * Sums and products are flattened and sorted, rational constants are folded,
 * like terms and like bases are merged, products are expanded over sums and
 * exp(a)*exp(b) is merged into exp(a+b).  Two Expr values that compare equal
 * are structurally identical.
 *
 * Constants are exact rationals.  Powers carry a rational exponent.  An
 * Integral node is the definite integral of a univariate integrand from a
 * rational anchor up to its variable, i.e. an antiderivative that has no
 * closed form in this class.
 */
class Expr {
public:
    Expr();  // the constant 0
    Expr(int value);
    Expr(const Rational& value);

    static Expr variable(const std::string& name);
    static Expr parameter(const std::string& name);

    Kind kind() const;
    bool is_constant() const { return kind() == Kind::Constant; }
    bool is_zero() const;
    bool is_one() const;

    /// Constant value, Power exponent or Integral anchor.
    const Rational& value() const;
    /// Symbol name, or the integration variable of an Integral.
    const std::string& name() const;
    /// Children of Sum/Product; [base] for Power; [argument] for Log, Exp and Integral.
    std::span<const Expr> operands() const;
    const Expr& operand(std::size_t i) const { return operands()[i]; }

    std::size_t hash() const;
    /// Number of nodes in the tree.
    std::size_t size() const;

    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static Expr make(Kind kind, Rational value, std::string name, std::vector<Expr> ops);

    std::shared_ptr<const Node> node_;

    friend Expr add(std::vector<Expr> terms);
    friend Expr mul(std::vector<Expr> factors);
    friend Expr pow(const Expr& base, const Rational& exponent);
    friend Expr log(const Expr& argument);
    friend Expr exp(const Expr& argument);
    friend Expr integral(const Expr& integrand, const std::string& variable, const Rational& anchor);
    friend int compare(const Expr& a, const Expr& b);
};

/// Total order on canonical expressions.  Returns <0, 0 or >0.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr pow(const Expr& base, const Rational& exponent);
Expr log(const Expr& argument);
Expr exp(const Expr& argument);
/// Integral of `integrand` over `variable` from `anchor` (no closed-form attempt).
Expr integral(const Expr& integrand, const std::string& variable, const Rational& anchor);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

/// Rebuilds the tree bottom-up through the canonicalizing constructors.
/// Idempotent; on values built by this library it returns its argument.
Expr simplify(const Expr& e);

/// Splits a term into its rational coefficient and the remaining monomial.
std::pair<Rational, Expr> split_coefficient(const Expr& term);

/// Variables (not parameters) occurring in e.
std::set<std::string> free_variables(const Expr& e);
std::set<std::string> free_parameters(const Expr& e);
/// True if e contains no variables (parameters are allowed).
bool is_variable_free(const Expr& e);

/// Replaces variables/parameters by expressions and re-canonicalizes.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements);

/// Prints in the input grammar: `x1+x2`, `1/(b*x2)`, `x1^2/2`, `exp(x1)`,
/// `int(1/(x1^2+1),x1,0)`.
std::string to_text(const Expr& e);
std::string to_text(const Rational& q);

std::ostream& operator<<(std::ostream& os, const Expr& e);

}  // namespace darboux
