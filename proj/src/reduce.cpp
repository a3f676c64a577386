#include <algorithm>
#include <sstream>

#include "darboux/calculus.hpp"
#include "darboux/congruence.hpp"

namespace darboux {

std::string to_string(Status s) {
    switch (s) {
        case Status::JacobianCongruence: return "jacobian-congruence";
        case Status::CongruenceOnly: return "congruence-only";
        case Status::NttCongruence: return "ntt-congruence";
        case Status::Failed: return "failed";
    }
    return "failed";
}

Status status_from_string(const std::string& s) {
    if (s == "jacobian-congruence") return Status::JacobianCongruence;
    if (s == "congruence-only") return Status::CongruenceOnly;
    if (s == "ntt-congruence") return Status::NttCongruence;
    if (s == "failed") return Status::Failed;
    throw std::invalid_argument("unknown status: " + s);
}

namespace {

enum class Mode { Jetm, Ntt, Any };

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Jetm: return "jacobian elementary transforms";
        case Mode::Ntt: return "jacobian transforms with time reparametrization";
        case Mode::Any: return "unrestricted elementary transforms";
    }
    return "";
}

// Splits h into (factor depending on v alone, everything else); exp of a sum
// is split term by term.
std::pair<Expr, Expr> separate(const Expr& h, const std::string& v) {
    std::vector<Expr> mine, rest;
    auto place = [&](const Expr& f) {
        auto fv = free_variables(f);
        if (fv.size() == 1 && *fv.begin() == v)
            mine.push_back(f);
        else
            rest.push_back(f);
    };
    std::vector<Expr> factors;
    if (h.kind() == Kind::Product)
        factors.assign(h.operands().begin(), h.operands().end());
    else
        factors.push_back(h);
    for (const auto& f : factors) {
        if (f.kind() == Kind::Exp && f.operand(0).kind() == Kind::Sum) {
            std::vector<Expr> a, b;
            for (const auto& t : f.operand(0).operands()) {
                auto fv = free_variables(t);
                (fv.size() == 1 && *fv.begin() == v ? a : b).push_back(t);
            }
            if (!a.empty()) mine.push_back(exp(add(a)));
            if (!b.empty()) rest.push_back(exp(add(b)));
        } else {
            place(f);
        }
    }
    return {mul(std::move(mine)), mul(std::move(rest))};
}

// Scalings (row p, row q) that turn h into 1 while each depends on one variable.
std::optional<std::pair<Expr, Expr>> separated_normalizer(const Expr& h, const std::string& vp, const std::string& vq) {
    auto [fp, rest] = separate(h, vp);
    auto [fq, rest2] = separate(rest, vq);
    if (!is_variable_free(rest2)) return std::nullopt;
    auto [c, params] = split_coefficient(rest2);
    return std::make_pair(Expr(1) / (Expr(c) * fp), Expr(1) / (params * fq));
}

struct State {
    ExprMatrix M, K;
    std::vector<ReductionStep> steps;
    std::vector<bool> active;
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    std::vector<ElementaryTransform> pending;
    std::optional<Expr> g;
    std::vector<Expr> y;
    bool closed_form = true;
};

class Search {
public:
    Search(const StructureMatrix& J, const ReduceOptions& opts, Mode mode, std::size_t rank)
        : J_(J), opts_(opts), mode_(mode), rank_(rank), n_(J.dimension()) {
        max_steps_ = opts.max_steps ? opts.max_steps : 12 * n_ * n_;
    }

    State initial() const {
        State s;
        s.M = J_.entries;
        s.K = ExprMatrix::identity(n_);
        s.active.assign(n_, true);
        return s;
    }

    bool push(State& s, const ElementaryTransform& t) const {
        JetmCheck j = is_jetm(t, J_.domain);
        if (!j.jetm && mode_ != Mode::Any) return false;
        s.M = apply_step(s.M, t);
        s.K = apply_row(s.K, t);
        s.steps.push_back(ReductionStep{t, j.jetm, j.reason, s.M});
        return true;
    }

    std::optional<State> run(State s) {
        budget_ = opts_.backtrack_budget;
        exhausted_ = false;
        return search(std::move(s));
    }

    bool exhausted() const { return exhausted_; }
    const State& deepest() const { return deepest_; }

private:
    const std::string& var(std::size_t i) const { return J_.domain.variables()[i]; }

    bool vanishes(State& s, std::size_t i, std::size_t j) const {
        if (s.M(i, j).is_zero()) return true;
        if (!is_zero(s.M(i, j), J_.domain, opts_.cfg).is(Outcome::Zero)) return false;
        s.M(i, j) = Expr(0);
        s.M(j, i) = Expr(0);
        return true;
    }

    struct Candidate {
        int cls;
        std::size_t size, i, j;
        bool operator<(const Candidate& o) const {
            return std::tie(cls, size, i, j) < std::tie(o.cls, o.size, o.i, o.j);
        }
    };

    std::optional<State> search(State s) {
        if (s.steps.size() > max_steps_) {
            exhausted_ = true;
            return std::nullopt;
        }
        std::vector<Candidate> cands;
        bool all_zero = true;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j) {
                if (!s.active[i] || !s.active[j] || vanishes(s, i, j)) continue;
                all_zero = false;
                const Expr& h = s.M(i, j);
                if (!is_nonvanishing(h, J_.domain, opts_.cfg).is(Outcome::Nonvanishing)) continue;
                const std::size_t nv = free_variables(h).size();
                cands.push_back(Candidate{nv == 0 ? 0 : nv == 1 ? 1 : 2, h.size(), i, j});
            }
        if (all_zero) return finalize(std::move(s));
        if (s.steps.size() >= deepest_.steps.size()) deepest_ = s;
        std::sort(cands.begin(), cands.end());
        for (std::size_t c = 0; c < cands.size(); ++c) {
            if (c > 0) {
                if (budget_ == 0) {
                    exhausted_ = true;
                    return std::nullopt;
                }
                --budget_;
            }
            State t = s;
            if (!eliminate(t, cands[c].i, cands[c].j)) continue;
            if (auto done = search(std::move(t))) return done;
            if (exhausted_) return std::nullopt;
        }
        return std::nullopt;
    }

    bool eliminate(State& s, std::size_t p, std::size_t q) {
        const Expr h = s.M(p, q);
        for (std::size_t k = 0; k < n_; ++k) {
            if (!s.active[k] || k == p || k == q) continue;
            if (!vanishes(s, k, q) &&
                !push(s, ElementaryTransform::combine(n_, k, -s.M(k, q) / h, p)))
                return false;
            if (!vanishes(s, k, p) &&
                !push(s, ElementaryTransform::combine(n_, k, s.M(k, p) / h, q)))
                return false;
        }
        s.active[p] = s.active[q] = false;
        s.blocks.emplace_back(p, q);
        return plan_normalization(s, p, q, h);
    }

    bool plan_normalization(State& s, std::size_t p, std::size_t q, const Expr& h) const {
        auto schedule = [&](std::size_t row, const Expr& xi) {
            if (!xi.is_one()) s.pending.push_back(ElementaryTransform::scale(n_, row, xi));
        };
        if (mode_ == Mode::Any) {
            schedule(p, Expr(1) / h);
            return true;
        }
        Expr target = h;
        if (mode_ == Mode::Ntt) {
            if (!s.g) {
                Rational c = split_coefficient(h).first;
                s.g = h / Expr(c);
                schedule(p, Expr(Rational(1 / c)));
                return true;
            }
            target = h / *s.g;
        }
        auto scales = separated_normalizer(target, var(p), var(q));
        if (!scales) return false;
        schedule(p, scales->first);
        schedule(q, scales->second);
        return true;
    }

    std::optional<State> finalize(State s) {
        for (const auto& t : s.pending)
            if (!push(s, t)) return std::nullopt;
        s.pending.clear();
        if (2 * s.blocks.size() != rank_) return std::nullopt;

        std::vector<std::size_t> order;
        std::vector<bool> used(n_, false);
        for (auto [p, q] : s.blocks) {
            order.push_back(p);
            order.push_back(q);
            used[p] = used[q] = true;
        }
        for (std::size_t i = 0; i < n_; ++i)
            if (!used[i]) order.push_back(i);
        std::vector<std::size_t> cur(n_);
        for (std::size_t i = 0; i < n_; ++i) cur[i] = i;
        for (std::size_t pos = 0; pos < n_; ++pos) {
            auto loc = static_cast<std::size_t>(std::find(cur.begin(), cur.end(), order[pos]) - cur.begin());
            if (loc == pos) continue;
            push(s, ElementaryTransform::permute(n_, pos, loc));
            std::swap(cur[pos], cur[loc]);
        }

        const Expr g = s.g.value_or(Expr(1));
        const ExprMatrix S = canonical_matrix(n_, rank_).matrix;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if (!is_zero(s.M(i, j) - g * S(i, j), J_.domain, opts_.cfg).is(Outcome::Zero)) return std::nullopt;

        if (mode_ != Mode::Any) {
            if (!jacobian_condition(s.K, J_.domain, opts_.cfg).passed()) return std::nullopt;
            try {
                Diffeomorphism d = integrate_jacobian(s.K, J_.domain, opts_.cfg);
                s.y = std::move(d.y);
                s.closed_form = d.closed_form;
            } catch (const IntegrationError&) {
                return std::nullopt;
            }
        }
        return s;
    }

    const StructureMatrix& J_;
    const ReduceOptions& opts_;
    Mode mode_;
    std::size_t rank_, n_, max_steps_ = 0;
    std::size_t budget_ = 0;
    bool exhausted_ = false;
    State deepest_;
};

using Prescaling = std::vector<ElementaryTransform>;

// Row i loses a factor that depends on x_i alone and divides every entry of the row.
Prescaling row_factor_prescaling(const StructureMatrix& J, const SamplerConfig& cfg) {
    const std::size_t n = J.dimension();
    Prescaling out;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& v = J.domain.variables()[i];
        Expr f(1);
        bool first = true, ok = true;
        for (std::size_t j = 0; j < n && ok; ++j) {
            if (J(i, j).is_zero()) continue;
            if (first) {
                f = separate(J(i, j), v).first;
                first = false;
                if (f.is_one()) ok = false;
            } else if (free_variables(J(i, j) / f).count(v)) {
                ok = false;
            }
        }
        if (!ok || first) continue;
        if (!is_nonvanishing(f, J.domain, cfg).is(Outcome::Nonvanishing)) continue;
        out.push_back(ElementaryTransform::scale(n, i, Expr(1) / f));
    }
    return out;
}

// Row i multiplied by x_i for every sign-definite coordinate.
Prescaling coordinate_prescaling(const StructureMatrix& J) {
    Prescaling out;
    for (std::size_t i = 0; i < J.dimension(); ++i) {
        const std::string& v = J.domain.variables()[i];
        if (J.domain.sign(v) != Sign::Unrestricted) out.push_back(ElementaryTransform::scale(J.dimension(), i, Expr::variable(v)));
    }
    return out;
}

bool same_prescaling(const Prescaling& a, const Prescaling& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k].i != b[k].i || a[k].xi != b[k].xi) return false;
    return true;
}

ReductionTrace to_trace(const StructureMatrix& J, const State& s) {
    ReductionTrace t;
    t.initial = J.entries;
    t.steps = s.steps;
    t.K = s.K.rows() ? s.K : ExprMatrix::identity(J.dimension());
    return t;
}

std::optional<ExprMatrix> invert_constant(const ExprMatrix& K) {
    if (!K.is_constant()) return std::nullopt;
    const std::size_t n = K.rows();
    RationalMatrix a(n, std::vector<Rational>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = K(i, j).value();
        a[i][n + i] = 1;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[c], a[piv]);
        const Rational inv = 1 / a[c][c];
        for (auto& x : a[c]) x *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0) continue;
            const Rational f = a[r][c];
            for (std::size_t k = 0; k < 2 * n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    ExprMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = Expr(a[i][n + j]);
    return out;
}

std::string sign_word(Sign s) {
    switch (s) {
        case Sign::Positive: return ">0";
        case Sign::Negative: return "<0";
        case Sign::Nonzero: return "!=0";
        default: return " unrestricted";
    }
}

std::string branch_annotation(const Expr& g, const Domain& domain, const SamplerConfig& cfg) {
    std::string sign;
    switch (sign_class(g, domain)) {
        case SignClass::Positive: sign = "g>0"; break;
        case SignClass::Negative: sign = "g<0"; break;
        default: {
            PointSampler sampler(domain, cfg.seed);
            try {
                sign = evaluate(g, sampler.point(0)) > 0 ? "g>0 (sampled)" : "g<0 (sampled)";
            } catch (const EvaluationError&) {
                sign = "g sign undetermined";
            }
        }
    }
    std::ostringstream out;
    out << sign << " on";
    bool first = true;
    for (const auto& v : domain.variables()) {
        out << (first ? " " : ", ") << v << sign_word(domain.sign(v));
        first = false;
    }
    for (const auto& p : domain.parameters()) out << ", " << p << sign_word(domain.sign(p));
    return out.str();
}

std::string where(const CheckReport& c) {
    std::string s = "(";
    for (std::size_t k = 0; k < c.location.size(); ++k) s += (k ? "," : "") + std::to_string(c.location[k]);
    return s + ")";
}

DarbouxResult failed(const StructureMatrix& J, std::string note) {
    DarbouxResult r;
    r.status = Status::Failed;
    r.n = J.dimension();
    r.K = ExprMatrix::identity(r.n);
    r.trace.initial = J.entries;
    r.trace.K = r.K;
    r.notes.push_back(std::move(note));
    return r;
}

std::optional<RationalMatrix> as_rational(const ExprMatrix& M) {
    if (!M.is_constant()) return std::nullopt;
    RationalMatrix a(M.rows(), std::vector<Rational>(M.cols()));
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j) a[i][j] = M(i, j).value();
    return a;
}

void attach_ntt(const StructureMatrix& J, DarbouxResult& r, const Expr& g, const SamplerConfig& cfg) {
    r.ntt_factor = g;
    r.ntt_branch = branch_annotation(g, J.domain, cfg);
    const auto ynames = darboux_names(r.n);
    if (auto inv = invert_constant(r.K)) {
        std::map<std::string, Expr> sub;
        for (std::size_t i = 0; i < r.n; ++i) {
            std::vector<Expr> terms;
            for (std::size_t j = 0; j < r.n; ++j) terms.push_back((*inv)(i, j) * Expr::variable(ynames[j]));
            sub[J.domain.variables()[i]] = add(std::move(terms));
        }
        r.ntt_factor_darboux = substitute(g, sub);
    }
    std::set<std::string> casimir_coords(ynames.begin() + static_cast<std::ptrdiff_t>(r.r), ynames.end());
    if (r.ntt_factor_darboux) {
        Domain ydom;
        for (const auto& y : ynames) ydom.add_variable(y);
        for (const auto& p : J.domain.parameters()) ydom.add_parameter(p, J.domain.sign(p));
        r.reparam = reparam_validity(*r.ntt_factor_darboux, r.n, r.r, ydom, casimir_coords, cfg);
    } else {
        r.reparam = reparam_validity(g, r.n, r.r, J.domain, {}, cfg);
        // Without an explicit inverse, Casimir dependence is tested in the original coordinates.
        if (check_casimir(J, g, cfg).passed()) {
            r.reparam->casimir_dependent = true;
            r.reparam->verdict = Verdict::Pass;
        }
    }
}

}  // namespace

DarbouxResult reduce_functional(const StructureMatrix& J, const ReduceOptions& opts) {
    if (opts.require_jacobian && opts.allow_ntt)
        throw std::invalid_argument("require-jacobian and allow-ntt are mutually exclusive");
    const std::size_t n = J.dimension();
    const SamplerConfig& cfg = opts.cfg;

    CheckReport skew = check_skew(J, cfg);
    if (!skew.passed()) return failed(J, "skew-symmetry " + to_string(skew.verdict) + " at " + where(skew));
    CheckReport jac = check_jacobi(J, cfg);
    if (!jac.passed())
        return failed(J, "Jacobi identity " + to_string(jac.verdict) + " at " + where(jac) + ", residual " +
                             to_text(jac.residual));
    RankReport rank = generic_rank(J, cfg);
    if (!rank.consistent) return failed(J, "rank is not constant on the domain");

    if (auto A = as_rational(J.entries)) {
        ConstantReduction c = reduce_constant(*A);
        DarbouxResult r;
        r.status = Status::JacobianCongruence;
        r.n = n;
        r.r = c.rank;
        r.K = c.trace.K;
        r.trace = std::move(c.trace);
        r.y = integrate_jacobian(r.K, J.domain, cfg).y;
        r.casimirs = casimirs_from(J, r, cfg);
        r.notes.push_back("constant structure matrix reduced exactly");
        return r;
    }

    std::vector<Mode> modes{Mode::Jetm};
    if (opts.allow_ntt) modes.push_back(Mode::Ntt);
    modes.push_back(Mode::Any);

    State deepest;
    std::vector<std::string> notes;
    for (Mode mode : modes) {
        std::vector<Prescaling> options{{}};
        if (mode != Mode::Any) options.push_back(row_factor_prescaling(J, cfg));
        if (mode == Mode::Ntt) options.push_back(coordinate_prescaling(J));
        std::vector<Prescaling> tried;
        for (const auto& pre : options) {
            if (std::any_of(tried.begin(), tried.end(), [&](const Prescaling& p) { return same_prescaling(p, pre); }))
                continue;
            tried.push_back(pre);
            Search search(J, opts, mode, static_cast<std::size_t>(rank.rank));
            State s = search.initial();
            bool ok = true;
            for (const auto& t : pre) ok = ok && search.push(s, t);
            if (!ok) continue;
            std::optional<State> found = search.run(std::move(s));
            if (search.deepest().steps.size() >= deepest.steps.size()) deepest = search.deepest();
            if (search.exhausted()) notes.push_back(std::string("search budget exhausted for ") + mode_name(mode));
            if (!found) continue;

            DarbouxResult r;
            r.n = n;
            r.r = static_cast<std::size_t>(rank.rank);
            r.K = found->K;
            r.trace = to_trace(J, *found);
            r.notes = notes;
            if (mode == Mode::Any) {
                r.status = Status::CongruenceOnly;
                if (!opts.require_jacobian && jacobian_condition(r.K, J.domain, cfg).passed()) {
                    try {
                        Diffeomorphism d = integrate_jacobian(r.K, J.domain, cfg);
                        r.y = std::move(d.y);
                        r.closed_form = d.closed_form;
                        r.status = Status::JacobianCongruence;
                        r.notes.push_back("product of elementary transforms is a Jacobian matrix");
                    } catch (const IntegrationError& e) {
                        r.notes.push_back(std::string("Jacobian matrix could not be integrated: ") + e.what());
                    }
                }
                if (r.status == Status::CongruenceOnly) {
                    r.notes.push_back("congruence matrix is not a Jacobian matrix");
                    return r;
                }
            } else {
                r.y = found->y;
                r.closed_form = found->closed_form;
                r.status = Status::JacobianCongruence;
                if (mode == Mode::Ntt && found->g && !found->g->is_one()) {
                    r.status = Status::NttCongruence;
                    attach_ntt(J, r, *found->g, cfg);
                    if (r.reparam->verdict != Verdict::Pass) {
                        notes.push_back("time reparametrization factor " + to_text(*found->g) + " rejected: " +
                                        r.reparam->basis());
                        continue;
                    }
                }
            }
            if (!r.closed_form) r.notes.push_back("diffeomorphism contains unevaluated integrals");
            r.casimirs = casimirs_from(J, r, cfg);
            return r;
        }
    }
    DarbouxResult r = failed(J, "no reduction found");
    r.r = static_cast<std::size_t>(rank.rank);
    r.trace = to_trace(J, deepest);
    r.K = r.trace.K;
    r.notes.insert(r.notes.end(), notes.begin(), notes.end());
    return r;
}

}  // namespace darboux
