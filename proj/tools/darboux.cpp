// Command-line front end: check, rank, reduce, verify, simulate, generate.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "darboux/fixtures.hpp"
#include "darboux/parse.hpp"
#include "darboux/problem_io.hpp"
#include "darboux/verify.hpp"

using namespace darboux;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kInputError = 2, kCongruenceOnly = 3, kReductionFailed = 4 };

constexpr std::uint64_t kDefaultSeed = 20240601;

std::string locate(const std::vector<std::size_t>& loc) {
    std::string s = "(";
    for (std::size_t k = 0; k < loc.size(); ++k) s += (k ? "," : "") + std::to_string(loc[k]);
    return s + ")";
}

std::string format_point(const Env& p) {
    std::map<std::string, double> sorted(p.begin(), p.end());
    std::ostringstream out;
    bool first = true;
    for (const auto& [k, v] : sorted) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << (first ? "" : ", ") << k << "=" << buf;
        first = false;
    }
    return out.str();
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

std::vector<double> parse_point(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError("bad coordinate '" + item + "'");
        }
    }
    return out;
}

Env parameter_env(const Problem& p) {
    Env env;
    for (const auto& q : p.J.domain.parameters()) {
        auto it = p.parameter_values.find(q);
        if (it == p.parameter_values.end()) throw InputError("parameter_values has no value for '" + q + "'");
        env[q] = it->second;
    }
    return env;
}

int cmd_check(const std::string& file, std::uint64_t seed) {
    Problem p = load_problem(file);
    SamplerConfig cfg;
    cfg.seed = seed;
    std::cout << "problem: " << p.name << " (n=" << p.J.dimension() << ")\n";
    CheckReport skew = check_skew(p.J, cfg);
    std::cout << "skew-symmetry: " << to_string(skew.verdict);
    if (!skew.passed()) std::cout << " at " << locate(skew.location);
    std::cout << "\n";
    if (!skew.passed()) return kCheckFailed;
    CheckReport jac = check_jacobi(p.J, cfg);
    std::cout << "jacobi: " << to_string(jac.verdict);
    if (!jac.passed()) {
        std::cout << " at " << locate(jac.location) << ", residual " << to_text(jac.residual);
        if (jac.evidence.witness) std::cout << ", witness " << format_point(*jac.evidence.witness);
    }
    std::cout << "\n";
    RankReport rank = generic_rank(p.J, cfg);
    std::cout << "rank: " << rank.rank << (rank.consistent ? " (constant" : " (NOT constant") << " over "
              << rank.samples << " samples)\n";
    if (!rank.consistent && rank.witness)
        std::cout << "rank " << rank.witness_rank << " at " << format_point(*rank.witness) << "\n";
    for (std::size_t k = 0; k < p.known_casimirs.size(); ++k) {
        CheckReport c = check_casimir(p.J, p.known_casimirs[k], cfg);
        std::cout << "known casimir " << k + 1 << " " << to_text(p.known_casimirs[k]) << ": " << to_string(c.verdict)
                  << "\n";
        if (!c.passed()) return kCheckFailed;
    }
    return jac.passed() && rank.consistent ? kOk : kCheckFailed;
}

int cmd_rank(const std::string& file, std::uint64_t seed, const std::string& at) {
    Problem p = load_problem(file);
    if (!at.empty()) {
        std::vector<double> x = parse_point(at);
        if (x.size() != p.J.dimension()) throw InputError("--at needs " + std::to_string(p.J.dimension()) + " coordinates");
        Env env = parameter_env(p);
        for (std::size_t i = 0; i < x.size(); ++i) env[p.J.domain.variables()[i]] = x[i];
        try {
            std::cout << "rank: " << numeric_rank(p.J, env) << "\n";
        } catch (const EvaluationError& e) {
            throw InputError(std::string("cannot evaluate at that point: ") + e.what());
        }
        return kOk;
    }
    SamplerConfig cfg;
    cfg.seed = seed;
    RankReport rank = generic_rank(p.J, cfg);
    std::cout << "rank: " << rank.rank << "\n"
              << "constant: " << (rank.consistent ? "yes" : "no") << "\n"
              << "samples: " << rank.samples << "\n";
    if (!rank.consistent && rank.witness)
        std::cout << "rank " << rank.witness_rank << " at " << format_point(*rank.witness) << "\n";
    return rank.consistent ? kOk : kCheckFailed;
}

struct ReduceFlags {
    bool require_jacobian = false;
    bool allow_ntt = false;
    std::size_t max_steps = 0;
    std::size_t backtrack = 64;
    std::uint64_t seed = kDefaultSeed;
    std::string out;
};

int cmd_reduce(const std::string& file, const ReduceFlags& f) {
    if (f.require_jacobian && f.allow_ntt) throw InputError("--require-jacobian and --allow-ntt are mutually exclusive");
    Problem p = load_problem(file);
    ReduceOptions opts;
    opts.require_jacobian = f.require_jacobian;
    opts.allow_ntt = f.allow_ntt;
    opts.max_steps = f.max_steps;
    opts.backtrack_budget = f.backtrack;
    opts.cfg.seed = f.seed;
    DarbouxResult r = reduce_functional(p.J, opts);
    std::optional<VerificationReport> report;
    if (r.status != Status::Failed) {
        VerifyConfig vc;
        vc.seed = f.seed;
        report = verify_reduction(p.J, r, vc);
    }
    const std::string text = dump(result_to_json(r, p, f.seed, report));
    if (f.out.empty()) {
        std::cout << text;
    } else {
        write_text(f.out, text);
        std::cout << "status: " << to_string(r.status) << "\n"
                  << "target: S(" << r.n << "," << r.r << ")\n";
        for (std::size_t k = 0; k < r.casimirs.size(); ++k)
            std::cout << "casimir " << k + 1 << ": " << to_text(r.casimirs[k]) << "\n";
        if (r.ntt_factor) std::cout << "time change: dtau = (" << to_text(*r.ntt_factor) << ")*dt, " << r.ntt_branch << "\n";
        if (report) std::cout << "verification: " << (report->passed ? "pass" : "FAIL") << "\n";
        for (const auto& n : r.notes) std::cout << "note: " << n << "\n";
    }
    switch (r.status) {
        case Status::JacobianCongruence:
        case Status::NttCongruence:
            return report && !report->passed ? kCheckFailed : kOk;
        case Status::CongruenceOnly: return kCongruenceOnly;
        case Status::Failed: return kReductionFailed;
    }
    return kReductionFailed;
}

int cmd_verify(const std::string& problem, const std::string& result, int samples, double tolerance,
               std::optional<std::uint64_t> seed) {
    Problem p = load_problem(problem);
    nlohmann::ordered_json doc = read_json(result);
    DarbouxResult r = result_from_json(doc, p);
    if (r.status == Status::Failed) throw InputError("result records a failed reduction; nothing to verify");
    VerifyConfig cfg;
    cfg.samples = samples;
    cfg.tolerance = tolerance;
    cfg.seed = seed.value_or(doc.value("seed", kDefaultSeed));
    VerificationReport rep = verify_reduction(p.J, r, cfg);
    std::cout << "status: " << to_string(r.status) << "\n"
              << "samples: " << rep.samples << ", seed " << rep.seed << ", tolerance " << sci(rep.tolerance) << "\n";
    for (const auto& id : rep.identities) {
        std::cout << id.name << ": " << (id.passed ? "pass" : "FAIL") << " max residual " << sci(id.max_residual) << "\n";
        if (!id.passed && id.worst_point) std::cout << "  witness: " << format_point(*id.worst_point) << "\n";
    }
    std::cout << "verification: " << (rep.passed ? "pass" : "FAIL") << "\n";
    return rep.passed ? kOk : kCheckFailed;
}

int cmd_simulate(const std::string& file, const std::string& x0_text, double t_end, double dt, const std::string& out,
                 const std::string& result) {
    Problem p = load_problem(file);
    if (!p.J.hamiltonian) throw InputError("problem has no hamiltonian");
    std::vector<double> x0 = parse_point(x0_text);
    if (x0.size() != p.J.dimension()) throw InputError("--x0 needs " + std::to_string(p.J.dimension()) + " coordinates");
    std::vector<Expr> casimirs = p.known_casimirs;
    if (!result.empty()) casimirs = result_from_json(read_json(result), p).casimirs;
    Trajectory tr;
    try {
        tr = simulate(p.J, *p.J.hamiltonian, x0, parameter_env(p), t_end, dt, casimirs);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    std::ostringstream csv;
    csv << "t";
    for (const auto& v : p.J.domain.variables()) csv << "," << v;
    csv << ",H";
    for (std::size_t k = 0; k < casimirs.size(); ++k) csv << ",C" << k + 1;
    csv << "\n";
    char buf[64];
    for (std::size_t s = 0; s < tr.t.size(); ++s) {
        std::snprintf(buf, sizeof buf, "%.17g", tr.t[s]);
        csv << buf;
        for (double v : tr.x[s]) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            csv << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g", tr.H[s]);
        csv << buf;
        for (double v : tr.C[s]) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            csv << buf;
        }
        csv << "\n";
    }
    std::ostream& report = out.empty() ? std::cerr : std::cout;
    if (out.empty())
        std::cout << csv.str();
    else
        write_text(out, csv.str());
    ConservationReport c = conservation_report(tr);
    report << "steps: " << (tr.t.size() - 1) << ", method " << tr.method << "\n";
    if (tr.truncated) report << "truncated: " << tr.truncation_reason << " at t=" << tr.t.back() << "\n";
    report << "H drift: " << sci(c.hamiltonian_drift) << "\n";
    for (std::size_t k = 0; k < c.casimir_drift.size(); ++k)
        report << "C" << k + 1 << " drift: " << sci(c.casimir_drift[k]) << " (" << to_text(casimirs[k]) << ")\n";
    return tr.truncated ? kCheckFailed : kOk;
}

int run(int argc, char** argv) {
    CLI::App app{"Darboux canonical form of Poisson structure matrices by congruence"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::uint64_t seed = kDefaultSeed;
    std::string file, result, out, at, x0, psi = "exp(z1+z2)";
    int samples = 100;
    double tolerance = 1e-8, t_end = 10, dt = 1e-3;
    std::optional<std::uint64_t> verify_seed;
    std::size_t max_n = 6;
    ReduceFlags rf;

    auto* check = app.add_subcommand("check", "Skew-symmetry, Jacobi identity and rank");
    check->add_option("problem", file, "Problem file")->required();
    check->add_option("--seed", seed, "Sampling seed");

    auto* rank = app.add_subcommand("rank", "Generic rank, or the rank at one point");
    rank->add_option("problem", file, "Problem file")->required();
    rank->add_option("--seed", seed, "Sampling seed");
    rank->add_option("--at", at, "Comma-separated point");

    auto* reduce = app.add_subcommand("reduce", "Reduce to Darboux canonical form");
    reduce->add_option("problem", file, "Problem file")->required();
    reduce->add_flag("--require-jacobian", rf.require_jacobian, "Admit only Jacobian elementary transforms");
    reduce->add_flag("--allow-ntt", rf.allow_ntt, "Allow a time reparametrization factor");
    reduce->add_option("--max-steps", rf.max_steps, "Step budget (default 12*n^2)");
    reduce->add_option("--backtrack", rf.backtrack, "Alternatives explored per search");
    reduce->add_option("--seed", rf.seed, "Sampling seed");
    reduce->add_option("--out", rf.out, "Result file (default: stdout)");

    auto* verify = app.add_subcommand("verify", "Sample every identity claimed by a result file");
    verify->add_option("problem", file, "Problem file")->required();
    verify->add_option("result", result, "Result file")->required();
    verify->add_option("--samples", samples, "Sample points")->check(CLI::PositiveNumber);
    verify->add_option("--tolerance", tolerance, "Relative tolerance")->check(CLI::PositiveNumber);
    verify->add_option("--seed", verify_seed, "Sampling seed (default: the result's)");

    auto* sim = app.add_subcommand("simulate", "Integrate dx/dt = J grad H with classical RK4");
    sim->add_option("problem", file, "Problem file")->required();
    sim->add_option("--x0", x0, "Initial point, comma-separated")->required();
    sim->add_option("--t-end", t_end, "Final time");
    sim->add_option("--dt", dt, "Step size")->check(CLI::PositiveNumber);
    sim->add_option("--out", out, "CSV file (default: stdout)");
    sim->add_option("--result", result, "Result file whose Casimirs are tracked");

    auto* gen = app.add_subcommand("generate", "Write a generated problem file");
    gen->require_subcommand(1);
    auto* gsep = gen->add_subcommand("separable", "Seeded separable structure matrix");
    gsep->add_option("--seed", seed, "Generator seed");
    gsep->add_option("--max-n", max_n, "Largest dimension")->check(CLI::Range(2, 12));
    gsep->add_option("--out", out, "Problem file (default: stdout)");
    auto* gpsi = gen->add_subcommand("dpsi", "4x4 structure matrix psi(v3.x, v4.x)*A");
    gpsi->add_option("--psi", psi, "Nonvanishing function of z1, z2");
    gpsi->add_option("--out", out, "Problem file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*check) return cmd_check(file, seed);
        if (*rank) return cmd_rank(file, seed, at);
        if (*reduce) return cmd_reduce(file, rf);
        if (*verify) return cmd_verify(file, result, samples, tolerance, verify_seed);
        if (*sim) return cmd_simulate(file, x0, t_end, dt, out, result);
        if (*gsep || *gpsi) {
            Problem p = *gsep ? random_separable(seed, max_n) : dpsi_example(psi);
            const std::string text = dump(problem_to_json(p));
            if (out.empty())
                std::cout << text;
            else
                write_text(out, text);
            return kOk;
        }
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const ExprError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kReductionFailed;
    }
}
