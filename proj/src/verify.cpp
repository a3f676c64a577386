#include "darboux/verify.hpp"

#include <algorithm>
#include <cmath>

#include "darboux/calculus.hpp"

namespace darboux {

namespace {

class Recorder {
public:
    explicit Recorder(std::string name) { rec_.name = std::move(name); }

    void observe(double residual, const Env& point) {
        if (!std::isfinite(residual)) residual = INFINITY;
        if (!rec_.worst_point || residual > rec_.max_residual) {
            rec_.max_residual = residual;
            rec_.worst_point = point;
        }
    }
    void count() { ++rec_.samples; }

    IdentityRecord finish(double tolerance) {
        rec_.passed = rec_.max_residual <= tolerance;
        return rec_;
    }

private:
    IdentityRecord rec_;
};

double eval_at(const Expr& e, const Env& p) { return e.is_constant() ? e.value().get_d() : evaluate(e, p); }

}  // namespace

VerificationReport verify_reduction(const StructureMatrix& J, const DarbouxResult& result, const VerifyConfig& cfg) {
    const std::size_t n = J.dimension();
    const auto& vars = J.domain.variables();
    if (result.status == Status::Failed) throw std::invalid_argument("cannot verify a failed reduction");
    if (result.K.rows() != n || result.K.cols() != n) throw std::invalid_argument("K has the wrong shape");

    const ExprMatrix S = canonical_matrix(n, result.r).matrix;
    const Expr g = result.ntt_factor.value_or(Expr(1));
    const bool jacobian = result.status != Status::CongruenceOnly;
    const bool has_y = result.y.size() == n;

    std::vector<std::pair<Expr, std::pair<Expr, Expr>>> cross;  // difference, (left, right)
    if (jacobian) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = j + 1; k < n; ++k) {
                    Expr a = differentiate(result.K(i, j), vars[k]);
                    Expr b = differentiate(result.K(i, k), vars[j]);
                    cross.push_back({a - b, {a, b}});
                }
    }
    std::vector<std::vector<Expr>> grads;
    for (const auto& c : result.casimirs) {
        std::vector<Expr> gr;
        for (const auto& v : vars) gr.push_back(differentiate(c, v));
        grads.push_back(std::move(gr));
    }

    Recorder congruence("congruence"), jac("jacobian"), diffeo("diffeomorphism");
    std::vector<Recorder> cas;
    for (std::size_t k = 0; k < result.casimirs.size(); ++k) cas.emplace_back("casimir:" + std::to_string(k + 1));

    PointSampler sampler(J.domain, cfg.seed);
    int used = 0;
    for (int s = 0; s < cfg.samples; ++s) {
        for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
            Env p = sampler.point(static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(attempt));
            try {
                std::vector<double> Jv(n * n), Kv(n * n);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j) {
                        Jv[i * n + j] = eval_at(J(i, j), p);
                        Kv[i * n + j] = eval_at(result.K(i, j), p);
                    }
                const double gv = eval_at(g, p);
                // Residuals for every identity at this point.
                double cong = 0, scale = 0;
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j) {
                        double v = 0, m = 0;
                        for (std::size_t a = 0; a < n; ++a)
                            for (std::size_t b = 0; b < n; ++b) {
                                const double t = Kv[i * n + a] * Jv[a * n + b] * Kv[j * n + b];
                                v += t;
                                m += std::abs(t);
                            }
                        const double target = gv * S(i, j).value().get_d();
                        cong = std::max(cong, std::abs(v - target));
                        scale = std::max(scale, m + std::abs(target));
                    }
                double jr = 0;
                for (const auto& [d, lr] : cross) {
                    const double r = std::abs(eval_at(d, p));
                    jr = std::max(jr, r / (1 + std::abs(eval_at(lr.first, p)) + std::abs(eval_at(lr.second, p))));
                }
                double dr = 0;
                if (has_y) {
                    for (std::size_t j = 0; j < n; ++j) {
                        const double step = 1e-6 * (1 + std::abs(p[vars[j]]));
                        Env plus = p, minus = p;
                        plus[vars[j]] += step;
                        minus[vars[j]] -= step;
                        for (std::size_t i = 0; i < n; ++i) {
                            const double yp = eval_at(result.y[i], plus), ym = eval_at(result.y[i], minus);
                            const double fd = (yp - ym) / (2 * step);
                            const double k = Kv[i * n + j];
                            dr = std::max(dr, std::abs(fd - k) / (1 + std::abs(k) + std::abs(yp) + std::abs(ym)));
                        }
                    }
                }
                std::vector<double> cr(grads.size(), 0.0);
                for (std::size_t c = 0; c < grads.size(); ++c) {
                    std::vector<double> gv2(n);
                    for (std::size_t l = 0; l < n; ++l) gv2[l] = eval_at(grads[c][l], p);
                    for (std::size_t i = 0; i < n; ++i) {
                        double v = 0, m = 0;
                        for (std::size_t l = 0; l < n; ++l) {
                            v += Jv[i * n + l] * gv2[l];
                            m += std::abs(Jv[i * n + l] * gv2[l]);
                        }
                        cr[c] = std::max(cr[c], std::abs(v) / (1 + m));
                    }
                }
                congruence.observe(cong / (1 + scale), p);
                congruence.count();
                if (jacobian) {
                    jac.observe(jr, p);
                    jac.count();
                }
                if (has_y) {
                    diffeo.observe(dr, p);
                    diffeo.count();
                }
                for (std::size_t c = 0; c < cas.size(); ++c) {
                    cas[c].observe(cr[c], p);
                    cas[c].count();
                }
                ++used;
                break;
            } catch (const EvaluationError&) {
            }
        }
    }
    if (used == 0) throw EvaluationError("every sample point hit a pole");

    VerificationReport report;
    report.seed = cfg.seed;
    report.tolerance = cfg.tolerance;
    report.samples = used;
    report.identities.push_back(congruence.finish(cfg.tolerance));
    if (jacobian) report.identities.push_back(jac.finish(cfg.tolerance));
    if (has_y) report.identities.push_back(diffeo.finish(cfg.tolerance));
    for (auto& c : cas) report.identities.push_back(c.finish(cfg.tolerance));
    for (const auto& r : report.identities) report.passed = report.passed && r.passed;
    return report;
}

namespace {

bool inside(const Domain& d, const std::vector<double>& x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) return false;
        switch (d.sign(d.variables()[i])) {
            case Sign::Positive: if (!(x[i] > 0)) return false; break;
            case Sign::Negative: if (!(x[i] < 0)) return false; break;
            case Sign::Nonzero: if (x[i] == 0) return false; break;
            default: break;
        }
    }
    return true;
}

}  // namespace

Trajectory simulate(const StructureMatrix& J, const Expr& H, const std::vector<double>& x0, const Env& params,
                    double t_end, double h, const std::vector<Expr>& casimirs) {
    const std::size_t n = J.dimension();
    const auto& vars = J.domain.variables();
    if (x0.size() != n) throw std::invalid_argument("initial point has the wrong dimension");
    if (!(h > 0) || !(t_end >= 0)) throw std::invalid_argument("step and end time must be positive");
    if (!inside(J.domain, x0)) throw std::invalid_argument("initial point lies outside the domain");

    std::vector<Expr> grad;
    for (const auto& v : vars) grad.push_back(differentiate(H, v));

    Env env = params;
    auto bind = [&](const std::vector<double>& x) {
        for (std::size_t i = 0; i < n; ++i) env[vars[i]] = x[i];
    };
    auto rhs = [&](const std::vector<double>& x) {
        bind(x);
        std::vector<double> gv(n), out(n, 0.0);
        for (std::size_t l = 0; l < n; ++l) gv[l] = eval_at(grad[l], env);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l)
                if (!J(i, l).is_zero() && gv[l] != 0) out[i] += eval_at(J(i, l), env) * gv[l];
        return out;
    };
    Trajectory tr;
    auto record = [&](double t, const std::vector<double>& x) {
        bind(x);
        tr.t.push_back(t);
        tr.x.push_back(x);
        tr.H.push_back(eval_at(H, env));
        std::vector<double> c;
        for (const auto& e : casimirs) c.push_back(eval_at(e, env));
        tr.C.push_back(std::move(c));
    };

    const auto steps = static_cast<long>(std::llround(t_end / h));
    std::vector<double> x = x0;
    record(0.0, x);
    for (long k = 0; k < steps; ++k) {
        try {
            auto axpy = [&](const std::vector<double>& d, double a) {
                std::vector<double> y = x;
                for (std::size_t i = 0; i < n; ++i) y[i] += a * d[i];
                return y;
            };
            auto k1 = rhs(x);
            auto k2 = rhs(axpy(k1, h / 2));
            auto k3 = rhs(axpy(k2, h / 2));
            auto k4 = rhs(axpy(k3, h));
            std::vector<double> next(n);
            for (std::size_t i = 0; i < n; ++i) next[i] = x[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            if (!inside(J.domain, next)) {
                tr.truncated = true;
                tr.truncation_reason = "state left the domain";
                break;
            }
            x = std::move(next);
            record(static_cast<double>(k + 1) * h, x);
        } catch (const EvaluationError& e) {
            tr.truncated = true;
            tr.truncation_reason = e.what();
            break;
        }
    }
    return tr;
}

double ConservationReport::max_drift() const {
    double m = hamiltonian_drift;
    for (double d : casimir_drift) m = std::max(m, d);
    return m;
}

ConservationReport conservation_report(const Trajectory& tr) {
    ConservationReport r;
    if (tr.t.empty()) return r;
    for (double v : tr.H) r.hamiltonian_drift = std::max(r.hamiltonian_drift, std::abs(v - tr.H.front()));
    const std::size_t m = tr.C.front().size();
    r.casimir_drift.assign(m, 0.0);
    for (const auto& c : tr.C)
        for (std::size_t s = 0; s < m; ++s) r.casimir_drift[s] = std::max(r.casimir_drift[s], std::abs(c[s] - tr.C.front()[s]));
    return r;
}

}  // namespace darboux
