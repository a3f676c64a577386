#include "darboux/problem_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "darboux/parse.hpp"

namespace darboux {

using nlohmann::ordered_json;

namespace {

const ordered_json& field(const ordered_json& doc, const char* key) {
    if (!doc.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    return doc.at(key);
}

Expr parse_field(const ordered_json& v, const Domain& d, const std::string& where) {
    if (!v.is_string()) throw InputError(where + ": expected an expression string");
    try {
        return parse(v.get<std::string>(), d);
    } catch (const ParseError& e) {
        throw InputError(where + ": " + e.what() + " at position " + std::to_string(e.position()));
    } catch (const ExprError& e) {
        throw InputError(where + ": " + e.what());
    }
}

Sign parse_sign(const ordered_json& v, const std::string& where) {
    if (!v.is_string()) throw InputError(where + ": expected a sign name");
    try {
        return sign_from_string(v.get<std::string>());
    } catch (const std::exception& e) {
        throw InputError(where + ": " + e.what());
    }
}

ordered_json matrix_json(const ExprMatrix& M) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < M.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < M.cols(); ++j) row.push_back(to_text(M(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

ExprMatrix matrix_from(const ordered_json& v, std::size_t n, const Domain& d, const std::string& where) {
    if (!v.is_array() || v.size() != n) throw InputError(where + ": expected " + std::to_string(n) + " rows");
    ExprMatrix M(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!v[i].is_array() || v[i].size() != n)
            throw InputError(where + ": row " + std::to_string(i + 1) + " must have " + std::to_string(n) + " entries");
        for (std::size_t j = 0; j < n; ++j)
            M(i, j) = parse_field(v[i][j], d, where + "[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]");
    }
    return M;
}

ordered_json exprs_json(const std::vector<Expr>& es) {
    ordered_json a = ordered_json::array();
    for (const auto& e : es) a.push_back(to_text(e));
    return a;
}

std::vector<Expr> exprs_from(const ordered_json& v, const Domain& d, const std::string& where) {
    if (!v.is_array()) throw InputError(where + ": expected an array");
    std::vector<Expr> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(parse_field(v[k], d, where + "[" + std::to_string(k + 1) + "]"));
    return out;
}

}  // namespace

Problem problem_from_json(const ordered_json& doc) {
    if (!doc.is_object()) throw InputError("problem file must be a JSON object");
    if (doc.contains("format_version") && doc["format_version"] != kFormatVersion)
        throw InputError("unsupported format_version");
    Problem p;
    p.name = doc.value("name", std::string{});
    Domain d;
    const auto& vars = field(doc, "variables");
    if (!vars.is_array() || vars.empty()) throw InputError("'variables' must be a non-empty array");
    const ordered_json signs = doc.value("domain", ordered_json::object());
    try {
        for (const auto& v : vars) {
            const std::string name = v.get<std::string>();
            d.add_variable(name, signs.contains(name) ? parse_sign(signs[name], "domain." + name) : Sign::Unrestricted);
        }
        for (const auto& [name, _] : signs.items())
            if (!d.has_variable(name)) throw InputError("domain names unknown variable '" + name + "'");
        if (doc.contains("parameters"))
            for (const auto& q : doc["parameters"]) {
                const std::string name = field(q, "name").get<std::string>();
                d.add_parameter(name, q.contains("sign") ? parse_sign(q["sign"], "parameters." + name) : Sign::Unrestricted);
            }
    } catch (const ExprError& e) {
        throw InputError(e.what());
    } catch (const nlohmann::json::exception& e) {
        throw InputError(e.what());
    }
    const std::size_t n = d.dimension();
    ExprMatrix M = matrix_from(field(doc, "matrix"), n, d, "matrix");
    std::optional<Expr> H;
    if (doc.contains("hamiltonian") && !doc["hamiltonian"].is_null()) H = parse_field(doc["hamiltonian"], d, "hamiltonian");
    if (doc.contains("parameter_values"))
        for (const auto& [name, v] : doc["parameter_values"].items()) {
            if (!d.has_parameter(name)) throw InputError("parameter_values names unknown parameter '" + name + "'");
            if (!v.is_number()) throw InputError("parameter_values." + name + " must be a number");
            p.parameter_values[name] = v.get<double>();
        }
    if (doc.contains("known_casimirs")) p.known_casimirs = exprs_from(doc["known_casimirs"], d, "known_casimirs");
    p.J = make_structure(std::move(d), std::move(M), std::move(H));
    return p;
}

ordered_json problem_to_json(const Problem& p) {
    const Domain& d = p.J.domain;
    ordered_json doc;
    doc["format_version"] = kFormatVersion;
    doc["name"] = p.name;
    doc["variables"] = d.variables();
    ordered_json signs = ordered_json::object();
    for (const auto& v : d.variables()) signs[v] = to_string(d.sign(v));
    doc["domain"] = signs;
    ordered_json params = ordered_json::array();
    for (const auto& q : d.parameters()) params.push_back({{"name", q}, {"sign", to_string(d.sign(q))}});
    doc["parameters"] = params;
    if (!p.parameter_values.empty()) {
        ordered_json pv = ordered_json::object();
        for (const auto& q : d.parameters())
            if (p.parameter_values.count(q)) pv[q] = p.parameter_values.at(q);
        doc["parameter_values"] = pv;
    }
    doc["matrix"] = matrix_json(p.J.entries);
    if (p.J.hamiltonian) doc["hamiltonian"] = to_text(*p.J.hamiltonian);
    if (!p.known_casimirs.empty()) doc["known_casimirs"] = exprs_json(p.known_casimirs);
    return doc;
}

ordered_json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

Problem load_problem(const std::filesystem::path& path) {
    Problem p = problem_from_json(read_json(path));
    if (p.name.empty()) p.name = path.stem().string();
    return p;
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

ordered_json report_to_json(const VerificationReport& r) {
    ordered_json doc;
    doc["passed"] = r.passed;
    doc["seed"] = r.seed;
    doc["samples"] = r.samples;
    doc["tolerance"] = r.tolerance;
    ordered_json ids = ordered_json::array();
    for (const auto& id : r.identities) {
        ordered_json o;
        o["identity"] = id.name;
        o["samples"] = id.samples;
        o["max_residual"] = id.max_residual;
        o["passed"] = id.passed;
        if (id.worst_point) {
            ordered_json pt = ordered_json::object();
            std::map<std::string, double> sorted(id.worst_point->begin(), id.worst_point->end());
            for (const auto& [k, v] : sorted) pt[k] = v;
            o["worst_point"] = pt;
        }
        ids.push_back(std::move(o));
    }
    doc["identities"] = ids;
    return doc;
}

ordered_json result_to_json(const DarbouxResult& r, const Problem& p, std::uint64_t seed,
                            const std::optional<VerificationReport>& report) {
    ordered_json doc;
    doc["format_version"] = kFormatVersion;
    doc["tool"] = "darboux";
    doc["tool_version"] = kToolVersion;
    doc["problem"] = p.name;
    doc["seed"] = seed;
    doc["status"] = to_string(r.status);
    doc["target"] = {{"n", r.n}, {"r", r.r}};
    doc["K"] = matrix_json(r.K);
    doc["y"] = r.y.empty() ? ordered_json(nullptr) : exprs_json(r.y);
    doc["casimirs"] = exprs_json(r.casimirs);
    doc["closed_form"] = r.closed_form;
    ordered_json anchors = ordered_json::object();
    for (const auto& v : p.J.domain.variables()) anchors[v] = to_text(quadrature_anchor(p.J.domain.sign(v)));
    doc["quadrature_anchors"] = anchors;
    if (r.ntt_factor) {
        ordered_json ntt;
        ntt["factor"] = to_text(*r.ntt_factor);
        ntt["factor_darboux"] = r.ntt_factor_darboux ? ordered_json(to_text(*r.ntt_factor_darboux)) : ordered_json(nullptr);
        ntt["time_change"] = "dtau = (" + to_text(*r.ntt_factor) + ")*dt";
        ntt["branch"] = r.ntt_branch;
        if (r.reparam) {
            ntt["validity"] = to_string(r.reparam->verdict);
            ntt["validity_basis"] = r.reparam->basis();
        }
        doc["ntt"] = ntt;
    } else {
        doc["ntt"] = nullptr;
    }
    ordered_json trace = ordered_json::array();
    for (const auto& s : r.trace.steps) {
        ordered_json o;
        o["kind"] = to_string(s.transform.kind);
        o["i"] = s.transform.i + 1;
        if (s.transform.kind != ElementaryTransform::Kind::Scale) o["j"] = s.transform.j + 1;
        if (s.transform.kind != ElementaryTransform::Kind::Permute) o["xi"] = to_text(s.transform.xi);
        o["is_jetm"] = s.jetm;
        o["label"] = describe(s.transform);
        trace.push_back(std::move(o));
    }
    doc["trace"] = trace;
    doc["notes"] = r.notes;
    doc["verification"] = report ? report_to_json(*report) : ordered_json(nullptr);
    return doc;
}

DarbouxResult result_from_json(const ordered_json& doc, const Problem& p) {
    if (!doc.is_object()) throw InputError("result file must be a JSON object");
    if (doc.value("format_version", 0) != kFormatVersion) throw InputError("unsupported result format_version");
    const Domain& d = p.J.domain;
    DarbouxResult r;
    try {
        r.status = status_from_string(field(doc, "status").get<std::string>());
        r.n = field(doc, "target").at("n").get<std::size_t>();
        r.r = field(doc, "target").at("r").get<std::size_t>();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    } catch (const nlohmann::json::exception& e) {
        throw InputError(e.what());
    }
    if (r.n != d.dimension()) throw InputError("result dimension does not match the problem");
    if (r.r % 2 != 0 || r.r > r.n) throw InputError("result rank is invalid");
    r.K = matrix_from(field(doc, "K"), r.n, d, "K");
    if (doc.contains("y") && !doc["y"].is_null()) {
        r.y = exprs_from(doc["y"], d, "y");
        if (r.y.size() != r.n) throw InputError("y must have one component per variable");
    }
    r.casimirs = exprs_from(doc.value("casimirs", ordered_json::array()), d, "casimirs");
    if (doc.contains("ntt") && doc["ntt"].is_object()) r.ntt_factor = parse_field(doc["ntt"].at("factor"), d, "ntt.factor");
    r.closed_form = doc.value("closed_form", true);
    r.trace.initial = p.J.entries;
    r.trace.K = r.K;
    return r;
}

}  // namespace darboux
