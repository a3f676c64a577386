#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "darboux/expr.hpp"

namespace darboux {

/// Sign assumption attached to a variable or parameter.
enum class Sign { Positive, Negative, Nonzero, Unrestricted };

std::string to_string(Sign s);
/// Accepts "positive", "negative", "nonzero", "unrestricted".
Sign sign_from_string(const std::string& s);

/**
 * Ordered coordinates plus named parameters, each with a sign assumption.
 * The assumptions describe an open orthant-like box, which is the working
 * subdomain on which reductions are carried out.
 */
class Domain {
public:
    Domain() = default;

    void add_variable(const std::string& name, Sign sign = Sign::Unrestricted);
    void add_parameter(const std::string& name, Sign sign = Sign::Unrestricted);

    const std::vector<std::string>& variables() const { return variables_; }
    const std::vector<std::string>& parameters() const { return parameters_; }
    std::size_t dimension() const { return variables_.size(); }

    bool has_variable(const std::string& name) const;
    bool has_parameter(const std::string& name) const;
    bool declares(const std::string& name) const { return signs_.count(name) != 0; }
    Sign sign(const std::string& name) const;
    std::size_t index_of(const std::string& variable) const;

    Expr variable(std::size_t i) const { return Expr::variable(variables_.at(i)); }

    /// Throws ExprError if e mentions an undeclared symbol.
    void require_declared(const Expr& e) const;

private:
    std::vector<std::string> variables_;
    std::vector<std::string> parameters_;
    std::map<std::string, Sign> signs_;
};

/// Lower limit used for unevaluated integrals over a variable of this sign.
Rational quadrature_anchor(Sign s);

}  // namespace darboux
