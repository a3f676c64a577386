#include "darboux/expr.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <ostream>
#include <utility>

namespace darboux {

struct Expr::Node {
    Kind kind;
    Rational value;
    std::string name;
    std::vector<Expr> ops;
    std::size_t hash = 0;
    std::size_t size = 1;
};

namespace {

constexpr int kMaxExpandedPower = 16;

std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_rational(const Rational& q) {
    std::size_t h = std::hash<long>{}(mpz_get_si(q.get_num_mpz_t()));
    h = mix(h, mpz_size(q.get_num_mpz_t()));
    h = mix(h, std::hash<long>{}(mpz_get_si(q.get_den_mpz_t())));
    return h;
}

int sign_of(int c) { return (c > 0) - (c < 0); }

bool is_integer(const Rational& q) { return q.get_den() == 1; }

Rational canonical(Rational q) {
    q.canonicalize();
    return q;
}

// Orders names so that x2 < x10.
int natural_compare(const std::string& a, const std::string& b) {
    auto split = [](const std::string& s) {
        std::size_t k = s.size();
        while (k > 0 && std::isdigit(static_cast<unsigned char>(s[k - 1]))) --k;
        return std::pair<std::string, std::string>{s.substr(0, k), s.substr(k)};
    };
    auto [pa, da] = split(a);
    auto [pb, db] = split(b);
    if (int c = pa.compare(pb)) return sign_of(c);
    if (da.size() != db.size()) return da.size() < db.size() ? -1 : 1;
    return sign_of(da.compare(db));
}

Rational rational_power(const Rational& c, const mpz_class& n) {
    unsigned long e = mpz_get_ui(n.get_mpz_t());
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), c.get_num_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), c.get_den_mpz_t(), e);
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Exact root of an integer, if any.
bool exact_root(const mpz_class& v, unsigned long k, mpz_class& out);

// Rational content c of a sum (so that sum/c has coprime integer coefficients)
// and the exact value of c^q.  Empty when c is 1 or c^q is irrational.  For
// integer q the sign of c makes the last term's coefficient positive.
std::optional<std::pair<Rational, Rational>> content_power(const Expr& sum, const Rational& q) {
    mpz_class num = 0, den = 1;
    for (const auto& t : sum.operands()) {
        const Rational c = t.is_constant() ? t.value() : split_coefficient(t).first;
        mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), c.get_num_mpz_t());
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
    }
    Rational content(num, den);
    content.canonicalize();
    const Expr& last = sum.operands().back();
    const Rational lead = last.is_constant() ? last.value() : split_coefficient(last).first;
    if (is_integer(q) && lead < 0) content = -content;
    if (content == 1) return std::nullopt;
    if (is_integer(q)) {
        const mpz_class n = q.get_num();
        Rational v = rational_power(content, n < 0 ? mpz_class(-n) : n);
        if (n < 0) v = 1 / v;
        return std::pair{content, v};
    }
    const unsigned long k = mpz_get_ui(q.get_den_mpz_t());
    mpz_class rn, rd;
    if (!exact_root(content.get_num(), k, rn) || !exact_root(content.get_den(), k, rd)) return std::nullopt;
    Rational root(rn, rd);
    root.canonicalize();
    const mpz_class n = q.get_num();
    Rational v = rational_power(root, n < 0 ? mpz_class(-n) : n);
    if (n < 0) v = 1 / v;
    return std::pair{content, v};
}

// Exact root of an integer, if any.
bool exact_root(const mpz_class& v, unsigned long k, mpz_class& out) {
    if (v < 0) {
        if (k % 2 == 0) return false;
        mpz_class pos = -v;
        if (!exact_root(pos, k, out)) return false;
        out = -out;
        return true;
    }
    return mpz_root(out.get_mpz_t(), v.get_mpz_t(), k) != 0;
}

Expr with_coefficient(const Rational& c, const Expr& monomial);

}  // namespace

Expr Expr::make(Kind kind, Rational value, std::string name, std::vector<Expr> ops) {
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->value = std::move(value);
    node->name = std::move(name);
    node->ops = std::move(ops);
    std::size_t h = std::hash<int>{}(static_cast<int>(kind));
    h = mix(h, hash_rational(node->value));
    h = mix(h, std::hash<std::string>{}(node->name));
    for (const auto& op : node->ops) {
        h = mix(h, op.hash());
        node->size += op.size();
    }
    node->hash = h;
    return Expr(std::shared_ptr<const Node>(std::move(node)));
}

Expr::Expr() : Expr(Rational(0)) {}
Expr::Expr(int value) : Expr(Rational(value)) {}
Expr::Expr(const Rational& value) : node_(make(Kind::Constant, canonical(value), {}, {}).node_) {}

Expr Expr::variable(const std::string& name) { return make(Kind::Variable, 0, name, {}); }
Expr Expr::parameter(const std::string& name) { return make(Kind::Parameter, 0, name, {}); }

Kind Expr::kind() const { return node_->kind; }
bool Expr::is_zero() const { return kind() == Kind::Constant && node_->value == 0; }
bool Expr::is_one() const { return kind() == Kind::Constant && node_->value == 1; }
const Rational& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
std::span<const Expr> Expr::operands() const { return node_->ops; }
std::size_t Expr::hash() const { return node_->hash; }
std::size_t Expr::size() const { return node_->size; }

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    return a.hash() == b.hash() && compare(a, b) == 0;
}

int compare(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return 0;
    const bool pa = a.kind() == Kind::Power;
    const bool pb = b.kind() == Kind::Power;
    if (pa || pb) {
        // Compare as (base, exponent) so that x, x^2 and x^-1 sit together.
        const Expr& ba = pa ? a.operand(0) : a;
        const Expr& bb = pb ? b.operand(0) : b;
        if (int c = compare(ba, bb)) return c;
        const Rational ea = pa ? a.value() : Rational(1);
        const Rational eb = pb ? b.value() : Rational(1);
        return sign_of(cmp(ea, eb));
    }
    if (a.kind() != b.kind()) return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
    switch (a.kind()) {
        case Kind::Constant:
            return sign_of(cmp(a.value(), b.value()));
        case Kind::Variable:
        case Kind::Parameter:
            return natural_compare(a.name(), b.name());
        case Kind::Integral:
            if (int c = natural_compare(a.name(), b.name())) return c;
            if (int c = sign_of(cmp(a.value(), b.value()))) return c;
            return compare(a.operand(0), b.operand(0));
        default: {
            auto x = a.operands();
            auto y = b.operands();
            const std::size_t n = std::min(x.size(), y.size());
            for (std::size_t k = 0; k < n; ++k) {
                if (int c = compare(x[k], y[k])) return c;
            }
            if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
            return 0;
        }
    }
}

std::pair<Rational, Expr> split_coefficient(const Expr& term) {
    if (term.is_constant()) return {term.value(), Expr(1)};
    if (term.kind() == Kind::Product && term.operand(0).is_constant()) {
        auto ops = term.operands();
        if (ops.size() == 2) return {ops[0].value(), ops[1]};
        return {ops[0].value(), mul(std::vector<Expr>(ops.begin() + 1, ops.end()))};
    }
    return {Rational(1), term};
}

namespace {

Expr with_coefficient(const Rational& c, const Expr& monomial) {
    if (c == 1) return monomial;
    return mul({Expr(c), monomial});
}

}  // namespace

Expr add(std::vector<Expr> terms) {
    Rational constant = 0;
    std::map<Expr, Rational, ExprLess> acc;
    std::function<void(const Expr&)> absorb = [&](const Expr& t) {
        switch (t.kind()) {
            case Kind::Sum:
                for (const auto& op : t.operands()) absorb(op);
                break;
            case Kind::Constant:
                constant += t.value();
                break;
            default: {
                auto [c, m] = split_coefficient(t);
                acc[m] += c;
            }
        }
    };
    for (const auto& t : terms) absorb(t);

    std::vector<Expr> out;
    for (const auto& [m, c] : acc) {
        if (c != 0) out.push_back(with_coefficient(c, m));
    }
    if (out.empty()) return Expr(constant);
    if (constant == 0 && out.size() == 1) return out.front();
    std::vector<Expr> ops;
    ops.reserve(out.size() + 1);
    if (constant != 0) ops.emplace_back(constant);
    for (auto& t : out) ops.push_back(std::move(t));
    return Expr::make(Kind::Sum, 0, {}, std::move(ops));
}

Expr mul(std::vector<Expr> factors) {
    Rational coef = 1;
    std::map<Expr, Rational, ExprLess> bases;
    std::vector<Expr> exp_args;
    std::function<void(const Expr&)> absorb = [&](const Expr& f) {
        switch (f.kind()) {
            case Kind::Constant:
                coef *= f.value();
                break;
            case Kind::Product:
                for (const auto& op : f.operands()) absorb(op);
                break;
            case Kind::Power:
                bases[f.operand(0)] += f.value();
                break;
            case Kind::Exp:
                exp_args.push_back(f.operand(0));
                break;
            default:
                bases[f] += 1;
        }
    };
    for (const auto& f : factors) absorb(f);
    if (coef == 0) return Expr(0);

    std::vector<Expr> items;
    bool needs_merge = false;
    for (const auto& [b, q] : bases) {
        if (q == 0) continue;
        if (b.kind() == Kind::Sum && is_integer(q) && q > 1 && q <= kMaxExpandedPower) {
            // Repeated sum factors are expanded by the distribution below.
            for (long k = 0; k < q.get_num().get_si(); ++k) items.push_back(b);
            continue;
        }
        Expr p = pow(b, q);
        if (p.kind() == Kind::Constant) {
            coef *= p.value();
            continue;
        }
        if (p.kind() == Kind::Product || p.kind() == Kind::Exp) needs_merge = true;
        items.push_back(std::move(p));
    }
    if (!exp_args.empty()) {
        Expr e = exp(add(std::move(exp_args)));
        if (e.kind() == Kind::Constant) {
            coef *= e.value();
        } else {
            if (e.kind() != Kind::Exp) needs_merge = true;
            items.push_back(std::move(e));
        }
    }
    if (needs_merge) {
        items.emplace_back(coef);
        return mul(std::move(items));
    }

    auto sum_it = std::find_if(items.begin(), items.end(),
                               [](const Expr& e) { return e.kind() == Kind::Sum; });
    if (sum_it != items.end()) {
        Expr sum = *sum_it;
        items.erase(sum_it);
        items.emplace_back(coef);
        std::vector<Expr> terms;
        terms.reserve(sum.operands().size());
        for (const auto& t : sum.operands()) {
            auto f = items;
            f.push_back(t);
            terms.push_back(mul(std::move(f)));
        }
        return add(std::move(terms));
    }

    std::sort(items.begin(), items.end(), ExprLess{});
    if (items.empty()) return Expr(coef);
    if (coef == 1 && items.size() == 1) return items.front();
    std::vector<Expr> ops;
    ops.reserve(items.size() + 1);
    if (coef != 1) ops.emplace_back(coef);
    for (auto& f : items) ops.push_back(std::move(f));
    return Expr::make(Kind::Product, 0, {}, std::move(ops));
}

Expr pow(const Expr& base, const Rational& exponent) {
    const Rational q = canonical(exponent);
    if (q == 0) return Expr(1);
    if (q == 1) return base;
    switch (base.kind()) {
        case Kind::Constant: {
            const Rational& c = base.value();
            if (c == 0) {
                if (q < 0) throw ExprError("division by zero");
                return Expr(0);
            }
            if (c == 1) return Expr(1);
            if (is_integer(q)) {
                mpz_class n = q.get_num();
                Rational r = rational_power(c, n < 0 ? mpz_class(-n) : n);
                if (n < 0) r = 1 / r;
                return Expr(r);
            }
            unsigned long k = mpz_get_ui(q.get_den_mpz_t());
            mpz_class rn, rd;
            if (exact_root(c.get_num(), k, rn) && exact_root(c.get_den(), k, rd)) {
                Rational root(rn, rd);
                root.canonicalize();
                return pow(Expr(root), Rational(q.get_num()));
            }
            return Expr::make(Kind::Power, q, {}, {base});
        }
        case Kind::Power:
            if (is_integer(q)) return pow(base.operand(0), base.value() * q);
            return Expr::make(Kind::Power, q, {}, {base});
        case Kind::Product:
            if (is_integer(q)) {
                std::vector<Expr> fs;
                for (const auto& f : base.operands()) fs.push_back(pow(f, q));
                return mul(std::move(fs));
            }
            return Expr::make(Kind::Power, q, {}, {base});
        case Kind::Exp:
            return exp(mul({Expr(q), base.operand(0)}));
        case Kind::Sum:
            if (is_integer(q) && q > 0 && q <= kMaxExpandedPower) {
                return mul(std::vector<Expr>(q.get_num().get_si(), base));
            }
            if (auto f = content_power(base, q)) {
                Expr primitive = mul({Expr(1 / f->first), base});
                return mul({Expr(f->second), Expr::make(Kind::Power, q, {}, {primitive})});
            }
            return Expr::make(Kind::Power, q, {}, {base});
        default:
            return Expr::make(Kind::Power, q, {}, {base});
    }
}

Expr exp(const Expr& argument) {
    if (argument.is_zero()) return Expr(1);
    if (argument.kind() == Kind::Log) return argument.operand(0);
    if (argument.kind() == Kind::Product && argument.operands().size() == 2 &&
        argument.operand(0).is_constant() && argument.operand(1).kind() == Kind::Log) {
        return pow(argument.operand(1).operand(0), argument.operand(0).value());
    }
    return Expr::make(Kind::Exp, 0, {}, {argument});
}

Expr log(const Expr& argument) {
    if (argument.is_constant()) {
        if (argument.value() <= 0) throw ExprError("log of a non-positive constant");
        if (argument.value() == 1) return Expr(0);
    }
    if (argument.kind() == Kind::Exp) return argument.operand(0);
    return Expr::make(Kind::Log, 0, {}, {argument});
}

Expr integral(const Expr& integrand, const std::string& variable, const Rational& anchor) {
    if (integrand.is_zero()) return Expr(0);
    return Expr::make(Kind::Integral, anchor, variable, {integrand});
}

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, mul({Expr(-1), b})}); }
Expr operator-(const Expr& a) { return mul({Expr(-1), a}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return mul({a, pow(b, -1)}); }

Expr simplify(const Expr& e) {
    switch (e.kind()) {
        case Kind::Constant:
        case Kind::Variable:
        case Kind::Parameter:
            return e;
        case Kind::Sum:
        case Kind::Product: {
            std::vector<Expr> ops;
            for (const auto& op : e.operands()) ops.push_back(simplify(op));
            return e.kind() == Kind::Sum ? add(std::move(ops)) : mul(std::move(ops));
        }
        case Kind::Power:
            return pow(simplify(e.operand(0)), e.value());
        case Kind::Log:
            return log(simplify(e.operand(0)));
        case Kind::Exp:
            return exp(simplify(e.operand(0)));
        case Kind::Integral:
            return integral(simplify(e.operand(0)), e.name(), e.value());
    }
    return e;
}

namespace {

void collect_symbols(const Expr& e, Kind wanted, std::set<std::string>& out) {
    if (e.kind() == wanted) out.insert(e.name());
    if (wanted == Kind::Variable && e.kind() == Kind::Integral) out.insert(e.name());
    for (const auto& op : e.operands()) collect_symbols(op, wanted, out);
}

}  // namespace

std::set<std::string> free_variables(const Expr& e) {
    std::set<std::string> out;
    collect_symbols(e, Kind::Variable, out);
    return out;
}

std::set<std::string> free_parameters(const Expr& e) {
    std::set<std::string> out;
    collect_symbols(e, Kind::Parameter, out);
    return out;
}

bool is_variable_free(const Expr& e) {
    if (e.kind() == Kind::Variable || e.kind() == Kind::Integral) return false;
    for (const auto& op : e.operands()) {
        if (!is_variable_free(op)) return false;
    }
    return true;
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements) {
    switch (e.kind()) {
        case Kind::Constant:
            return e;
        case Kind::Variable:
        case Kind::Parameter: {
            auto it = replacements.find(e.name());
            return it == replacements.end() ? e : it->second;
        }
        case Kind::Sum:
        case Kind::Product: {
            std::vector<Expr> ops;
            for (const auto& op : e.operands()) ops.push_back(substitute(op, replacements));
            return e.kind() == Kind::Sum ? add(std::move(ops)) : mul(std::move(ops));
        }
        case Kind::Power:
            return pow(substitute(e.operand(0), replacements), e.value());
        case Kind::Log:
            return log(substitute(e.operand(0), replacements));
        case Kind::Exp:
            return exp(substitute(e.operand(0), replacements));
        case Kind::Integral: {
            auto it = replacements.find(e.name());
            if (it != replacements.end() && it->second != Expr::variable(e.name())) {
                throw ExprError("cannot substitute the integration variable of " + to_text(e));
            }
            auto inner = replacements;
            inner.erase(e.name());
            return integral(substitute(e.operand(0), inner), e.name(), e.value());
        }
    }
    return e;
}

// ---------------------------------------------------------------------------
// printing

namespace {

enum Prec { kSum = 1, kProduct = 2, kPower = 3, kAtom = 4 };

struct Printed {
    std::string text;
    int prec;
};

Printed print(const Expr& e);

std::string wrap(const Printed& p, int min_prec) {
    return p.prec < min_prec ? "(" + p.text + ")" : p.text;
}

std::string exponent_text(const Rational& q) {
    if (is_integer(q) && q >= 0) return q.get_num().get_str();
    return "(" + to_text(q) + ")";
}

Printed print_power(const Expr& base, const Rational& q) {
    Printed b = print(base);
    return {wrap(b, kAtom) + "^" + exponent_text(q), kPower};
}

// Sum denominators are printed as separate divisions, and sums raised to an
// integer power below -1 keep their exponent, so that reparsing does not
// expand a product or power of sums that canonical form keeps factored.
Printed print_product(const Rational& coef, std::span<const Expr> factors) {
    std::vector<std::string> num, den, sum_den;
    for (const auto& f : factors) {
        const bool sum_base = f.kind() == Kind::Power && f.operand(0).kind() == Kind::Sum;
        if (f.kind() == Kind::Power && f.value() < 0 && !(sum_base && is_integer(f.value()) && f.value() < -1)) {
            const Rational q = -f.value();
            std::string d = q == 1 ? wrap(print(f.operand(0)), kPower) : print_power(f.operand(0), q).text;
            (sum_base ? sum_den : den).push_back(std::move(d));
        } else if (f.kind() == Kind::Power) {
            num.push_back(print_power(f.operand(0), f.value()).text);
        } else {
            num.push_back(wrap(print(f), kPower));
        }
    }
    std::string text = coef < 0 ? "-" : "";
    mpz_class cn = abs(coef.get_num());
    std::vector<std::string> numerator;
    if (cn != 1 || num.empty()) numerator.push_back(cn.get_str());
    numerator.insert(numerator.end(), num.begin(), num.end());
    for (std::size_t k = 0; k < numerator.size(); ++k) text += (k ? "*" : "") + numerator[k];
    if (coef.get_den() != 1) den.insert(den.begin(), coef.get_den().get_str());
    if (!den.empty()) {
        std::string d;
        for (std::size_t k = 0; k < den.size(); ++k) d += (k ? "*" : "") + den[k];
        text += "/" + (den.size() > 1 ? "(" + d + ")" : d);
    }
    for (const auto& d : sum_den) text += "/" + d;
    return {text, kProduct};
}

Printed print(const Expr& e) {
    switch (e.kind()) {
        case Kind::Constant: {
            const Rational& q = e.value();
            if (is_integer(q) && q >= 0) return {q.get_num().get_str(), kAtom};
            return {to_text(q), kProduct};
        }
        case Kind::Variable:
        case Kind::Parameter:
            return {e.name(), kAtom};
        case Kind::Log:
            return {"log(" + print(e.operand(0)).text + ")", kAtom};
        case Kind::Exp:
            return {"exp(" + print(e.operand(0)).text + ")", kAtom};
        case Kind::Integral:
            return {"int(" + print(e.operand(0)).text + "," + e.name() + "," + to_text(e.value()) + ")",
                    kAtom};
        case Kind::Power:
            if (e.value() < 0 && !(e.operand(0).kind() == Kind::Sum && is_integer(e.value()) && e.value() < -1))
                return print_product(1, std::span<const Expr>(&e, 1));
            return print_power(e.operand(0), e.value());
        case Kind::Product: {
            auto ops = e.operands();
            if (ops[0].is_constant()) return print_product(ops[0].value(), ops.subspan(1));
            return print_product(1, ops);
        }
        case Kind::Sum: {
            auto ops = e.operands();
            std::vector<Expr> ordered;
            for (std::size_t k = ops[0].is_constant() ? 1 : 0; k < ops.size(); ++k) ordered.push_back(ops[k]);
            if (ops[0].is_constant()) ordered.push_back(ops[0]);
            std::string text;
            for (std::size_t k = 0; k < ordered.size(); ++k) {
                std::string t = print(ordered[k]).text;
                if (k > 0 && t[0] != '-') text += "+";
                text += t;
            }
            return {text, kSum};
        }
    }
    return {"?", kAtom};
}

}  // namespace

std::string to_text(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_text(const Expr& e) { return print(e).text; }

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_text(e); }

}  // namespace darboux
