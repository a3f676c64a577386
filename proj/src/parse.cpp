#include "darboux/parse.hpp"

#include <cctype>

namespace darboux {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)), position_(position) {}

namespace {

class Parser {
public:
    Parser(std::string_view text, const Domain& domain) : text_(text), domain_(domain) {}

    Expr parse_all() {
        Expr e = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    std::string_view text_;
    const Domain& domain_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }
    [[noreturn]] void fail_at(const std::string& message, std::size_t at) const { throw ParseError(message, at); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' but reached end of input");
            fail(std::string("expected '") + c + "'");
        }
    }

    Expr expr() {
        Expr acc = term();
        for (;;) {
            if (accept('+')) {
                acc = acc + term();
            } else if (accept('-')) {
                acc = acc - term();
            } else {
                return acc;
            }
        }
    }

    Expr term() {
        Expr acc = unary();
        for (;;) {
            if (accept('*')) {
                acc = acc * unary();
            } else if (accept('/')) {
                std::size_t at = pos_;
                Expr d = unary();
                if (d.is_zero()) fail_at("division by zero", at);
                acc = acc / d;
            } else {
                return acc;
            }
        }
    }

    Expr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        std::size_t at = pos_;
        Expr base = primary();
        if (!accept('^')) return base;
        std::size_t exp_at = pos_;
        Expr e = exponent();
        if (!e.is_constant()) fail_at("exponent must be a rational constant", exp_at);
        try {
            return pow(base, e.value());
        } catch (const ExprError& err) {
            fail_at(err.what(), at);
        }
    }

    Expr exponent() {
        if (accept('-')) return -exponent();
        return power();
    }

    std::string identifier() {
        skip_space();
        std::size_t start = pos_;
        if (pos_ >= text_.size() || !std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
            fail("expected identifier");
        }
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    mpz_class integer() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("expected integer");
        return mpz_class(std::string(text_.substr(start, pos_ - start)));
    }

    Rational signed_rational() {
        bool negative = accept('-');
        Rational q(integer());
        if (accept('/')) {
            std::size_t at = pos_;
            mpz_class d = integer();
            if (d == 0) fail_at("division by zero", at);
            q /= Rational(d);
        }
        return negative ? Rational(-q) : q;
    }

    bool next_is_call() {
        std::size_t save = pos_;
        bool call = accept('(');
        pos_ = save;
        return call;
    }

    Expr primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return Expr(Rational(integer()));
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected '" + std::string(1, c) + "'");

        std::size_t at = pos_;
        std::string name = identifier();
        if ((name == "log" || name == "exp" || name == "sqrt") && next_is_call()) {
            expect('(');
            std::size_t arg_at = pos_;
            Expr arg = expr();
            expect(')');
            try {
                if (name == "log") return log(arg);
                if (name == "exp") return exp(arg);
                return pow(arg, Rational(1, 2));
            } catch (const ExprError& err) {
                fail_at(err.what(), arg_at);
            }
        }
        if (name == "int" && next_is_call()) {
            expect('(');
            Expr integrand = expr();
            expect(',');
            std::size_t var_at = pos_;
            std::string var = identifier();
            if (!domain_.has_variable(var)) fail_at("'" + var + "' is not a declared variable", var_at);
            expect(',');
            Rational anchor = signed_rational();
            expect(')');
            auto vars = free_variables(integrand);
            if (vars.size() > 1 || (vars.size() == 1 && *vars.begin() != var)) {
                fail_at("integrand of int() must depend only on " + var, at);
            }
            return integral(integrand, var, anchor);
        }
        if (domain_.has_variable(name)) return Expr::variable(name);
        if (domain_.has_parameter(name)) return Expr::parameter(name);
        fail_at("undeclared identifier '" + name + "'", at);
    }
};

}  // namespace

Expr parse(std::string_view text, const Domain& domain) { return Parser(text, domain).parse_all(); }

}  // namespace darboux
