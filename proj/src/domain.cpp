#include "darboux/domain.hpp"

#include <algorithm>

namespace darboux {

std::string to_string(Sign s) {
    switch (s) {
        case Sign::Positive: return "positive";
        case Sign::Negative: return "negative";
        case Sign::Nonzero: return "nonzero";
        case Sign::Unrestricted: return "unrestricted";
    }
    return "unrestricted";
}

Sign sign_from_string(const std::string& s) {
    if (s == "positive") return Sign::Positive;
    if (s == "negative") return Sign::Negative;
    if (s == "nonzero") return Sign::Nonzero;
    if (s == "unrestricted" || s.empty()) return Sign::Unrestricted;
    throw std::invalid_argument("unknown sign assumption '" + s + "'");
}

void Domain::add_variable(const std::string& name, Sign sign) {
    if (declares(name)) throw std::invalid_argument("symbol '" + name + "' declared twice");
    variables_.push_back(name);
    signs_[name] = sign;
}

void Domain::add_parameter(const std::string& name, Sign sign) {
    if (declares(name)) throw std::invalid_argument("symbol '" + name + "' declared twice");
    parameters_.push_back(name);
    signs_[name] = sign;
}

bool Domain::has_variable(const std::string& name) const {
    return std::find(variables_.begin(), variables_.end(), name) != variables_.end();
}

bool Domain::has_parameter(const std::string& name) const {
    return std::find(parameters_.begin(), parameters_.end(), name) != parameters_.end();
}

Sign Domain::sign(const std::string& name) const {
    auto it = signs_.find(name);
    if (it == signs_.end()) throw std::out_of_range("undeclared symbol '" + name + "'");
    return it->second;
}

std::size_t Domain::index_of(const std::string& variable) const {
    auto it = std::find(variables_.begin(), variables_.end(), variable);
    if (it == variables_.end()) throw std::out_of_range("undeclared variable '" + variable + "'");
    return static_cast<std::size_t>(it - variables_.begin());
}

void Domain::require_declared(const Expr& e) const {
    for (const auto& v : free_variables(e)) {
        if (!has_variable(v)) throw ExprError("undeclared variable '" + v + "'");
    }
    for (const auto& p : free_parameters(e)) {
        if (!has_parameter(p)) throw ExprError("undeclared parameter '" + p + "'");
    }
}

Rational quadrature_anchor(Sign s) {
    switch (s) {
        case Sign::Positive: return 1;
        case Sign::Negative: return -1;
        default: return 0;
    }
}

}  // namespace darboux
