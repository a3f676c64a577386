#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "darboux/domain.hpp"
#include "darboux/expr.hpp"

namespace darboux {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position);
    /// Zero-based offset into the input.
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/**
 * Parses the expression grammar:
 *
 *     expr    := term (('+' | '-') term)*
 *     term    := unary (('*' | '/') unary)*
 *     unary   := ('-' | '+') unary | power
 *     power   := primary ('^' exponent)?        right-associative
 *     exponent:= '-' exponent | power
 *     primary := integer | identifier | '(' expr ')'
 *              | ('log' | 'exp' | 'sqrt') '(' expr ')'
 *              | 'int' '(' expr ',' identifier ',' rational ')'
 *
 * Identifiers resolve to variables or parameters of `domain`.  Exponents must
 * reduce to rational constants.  The result is canonical.
 */
Expr parse(std::string_view text, const Domain& domain);

}  // namespace darboux
