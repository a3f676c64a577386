#include <doctest.h>

#include "darboux/verify.hpp"
#include "support.hpp"

using namespace darboux;
using testing::P;

namespace {

std::vector<double> start(std::initializer_list<double> v) { return v; }

}  // namespace

TEST_CASE("verify_reduction passes on the Kermack-McKendrick result") {
    auto p = testing::fixture("kermack");
    auto r = reduce_functional(p.J, ReduceOptions{});
    REQUIRE(r.status == Status::JacobianCongruence);
    VerifyConfig cfg;
    auto report = verify_reduction(p.J, r, cfg);
    CHECK(report.passed);
    CHECK(report.samples == 100);
    std::vector<std::string> names;
    for (const auto& rec : report.identities) {
        names.push_back(rec.name);
        CHECK(rec.passed);
        CHECK(rec.samples == 100);
        CHECK(rec.max_residual < 1e-10);
    }
    CHECK(names == std::vector<std::string>{"congruence", "jacobian", "diffeomorphism", "casimir:1"});
}

TEST_CASE("verify_reduction passes on the Toda result") {
    auto p = testing::fixture("toda3");
    auto r = reduce_functional(p.J, ReduceOptions{});
    auto report = verify_reduction(p.J, r, VerifyConfig{});
    CHECK(report.passed);
    for (const auto& rec : report.identities) CHECK(rec.max_residual < 1e-9);
}

TEST_CASE("verify_reduction passes on the shipped separable instance") {
    auto p = testing::fixture("separable");
    auto r = reduce_functional(p.J, ReduceOptions{});
    REQUIRE(r.status == Status::JacobianCongruence);
    CHECK(r.casimirs.size() == 3);
    CHECK(verify_reduction(p.J, r, VerifyConfig{}).passed);
}

TEST_CASE("verify_reduction passes on ntt results") {
    for (const char* name : {"so3", "dpsi", "planar_mixed"}) {
        CAPTURE(name);
        auto p = testing::fixture(name);
        ReduceOptions opts;
        opts.allow_ntt = true;
        auto r = reduce_functional(p.J, opts);
        REQUIRE(r.status == Status::NttCongruence);
        CHECK(verify_reduction(p.J, r, VerifyConfig{}).passed);
    }
}

TEST_CASE("a perturbed K entry is caught with a witness") {
    auto p = testing::fixture("kermack");
    auto r = reduce_functional(p.J, ReduceOptions{});
    r.K(2, 0) = r.K(2, 0) + Expr(Rational(1, 1000));
    auto report = verify_reduction(p.J, r, VerifyConfig{});
    CHECK_FALSE(report.passed);
    const auto& congruence = report.identities.front();
    CHECK(congruence.name == "congruence");
    CHECK_FALSE(congruence.passed);
    REQUIRE(congruence.worst_point.has_value());
    CHECK(congruence.max_residual > 1e-8);
    // the diffeomorphism no longer matches the perturbed Jacobian either
    bool diffeo_failed = false;
    for (const auto& rec : report.identities)
        if (rec.name == "diffeomorphism") diffeo_failed = !rec.passed;
    CHECK(diffeo_failed);
}

TEST_CASE("verify_reduction is reproducible from the seed") {
    auto p = testing::fixture("toda3");
    auto r = reduce_functional(p.J, ReduceOptions{});
    VerifyConfig cfg;
    cfg.seed = 99;
    auto a = verify_reduction(p.J, r, cfg);
    auto b = verify_reduction(p.J, r, cfg);
    CHECK(dump(report_to_json(a)) == dump(report_to_json(b)));
}

TEST_CASE("rigid body conserves energy and the sphere Casimir") {
    auto p = testing::fixture("so3_unrestricted");
    Expr C = P("(x1^2+x2^2+x3^2)/2", p.J.domain);
    auto tr = simulate(p.J, *p.J.hamiltonian, start({1, 1, 1}), {}, 10, 1e-3, {C});
    CHECK_FALSE(tr.truncated);
    CHECK(tr.method == "rk4");
    CHECK(tr.t.size() == 10001);
    CHECK(tr.t.back() == doctest::Approx(10).epsilon(1e-12));
    auto rep = conservation_report(tr);
    CHECK(rep.hamiltonian_drift <= 1e-8);
    REQUIRE(rep.casimir_drift.size() == 1);
    CHECK(rep.casimir_drift[0] <= 1e-8);
    // the state actually moves
    CHECK(std::abs(tr.x.back()[0] - 1) + std::abs(tr.x.back()[1] - 1) > 1e-2);
}

TEST_CASE("a constant Hamiltonian gives a stationary trajectory") {
    auto p = testing::fixture("constant_h");
    auto tr = simulate(p.J, *p.J.hamiltonian, start({0.3, 1.2, 2}), {}, 1, 1e-2);
    for (const auto& x : tr.x) CHECK(x == std::vector<double>{0.3, 1.2, 2});
}

TEST_CASE("Kermack-McKendrick conserves its Casimir for any Hamiltonian") {
    auto p = testing::fixture("kermack");
    Expr C = P("x1+x2+x3", p.J.domain);
    for (const char* h : {"x1+x2-log(x2)", "x1+x3", "log(x1)+x2"}) {
        CAPTURE(h);
        auto tr = simulate(p.J, P(h, p.J.domain), start({1, 0.5, 0.2}), p.parameter_values, 10, 1e-3, {C});
        CHECK_FALSE(tr.truncated);
        CHECK(conservation_report(tr).casimir_drift[0] <= 1e-8);
    }
}

TEST_CASE("conservation_report examples") {
    auto p = testing::fixture("so3_unrestricted");
    auto single = simulate(p.J, *p.J.hamiltonian, start({1, 2, 3}), {}, 0, 1e-3);
    CHECK(single.t.size() == 1);
    CHECK(conservation_report(single).max_drift() == 0);

    auto tr = simulate(p.J, *p.J.hamiltonian, start({1, 1, 1}), {}, 2, 1e-3, {P("x1", p.J.domain)});
    CHECK(conservation_report(tr).casimir_drift[0] > 1e-3);
}

TEST_CASE("leaving the domain truncates the trajectory") {
    auto p = testing::fixture("so3");
    auto tr = simulate(p.J, *p.J.hamiltonian, start({1, 1, 1}), {}, 10, 1e-3);
    CHECK(tr.truncated);
    CHECK_FALSE(tr.truncation_reason.empty());
    CHECK(tr.t.back() < 10);
    for (const auto& x : tr.x)
        for (double v : x) CHECK(v > 0);
}

TEST_CASE("Casimir drift shrinks like h^4") {
    // coarse steps, where truncation error dominates roundoff
    auto p = testing::fixture("so3_unrestricted");
    Expr C = P("(x1^2+x2^2+x3^2)/2", p.J.domain);
    auto coarse = conservation_report(simulate(p.J, *p.J.hamiltonian, start({1, 1, 1}), {}, 10, 0.1, {C}));
    auto fine = conservation_report(simulate(p.J, *p.J.hamiltonian, start({1, 1, 1}), {}, 10, 0.05, {C}));
    CHECK(coarse.casimir_drift[0] / fine.casimir_drift[0] >= 8);
    CHECK(coarse.hamiltonian_drift / fine.hamiltonian_drift >= 8);
}
