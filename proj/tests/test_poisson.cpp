#include <doctest.h>

#include "darboux/zero_test.hpp"
#include "support.hpp"

using namespace darboux;
using testing::P;

namespace {

const std::vector<std::string> kJacobiFixtures = {"kermack", "so3", "so3_unrestricted", "toda3", "planar_one_var",
                                                  "planar_constant", "planar_mixed", "dpsi", "zero3", "constant_h", "separable"};

}  // namespace

TEST_CASE("canonical_matrix layouts") {
    auto s32 = canonical_matrix(3, 2);
    Domain none;
    CHECK(s32.matrix == testing::matrix_of({{"0", "1", "0"}, {"-1", "0", "0"}, {"0", "0", "0"}}, none));
    CHECK(testing::all_zero(canonical_matrix(4, 0).matrix));
    auto s44 = canonical_matrix(4, 4);
    CHECK(s44.matrix ==
          testing::matrix_of({{"0", "1", "0", "0"}, {"-1", "0", "0", "0"}, {"0", "0", "0", "1"}, {"0", "0", "-1", "0"}},
                             none));
    CHECK_THROWS(canonical_matrix(3, 1));
    CHECK_THROWS(canonical_matrix(2, 4));
}

TEST_CASE("check_skew examples") {
    SamplerConfig cfg;
    CHECK(check_skew(testing::fixture("so3").J, cfg).passed());
    Domain d = testing::free_domain(2);
    auto bad = check_skew(testing::structure_of({{"0", "1"}, {"1", "0"}}, d), cfg);
    CHECK(bad.verdict == Verdict::Fail);
    CHECK(bad.location == std::vector<std::size_t>{1, 2});
    CHECK(check_skew(testing::fixture("zero3").J, cfg).passed());
}

TEST_CASE("check_jacobi examples") {
    SamplerConfig cfg;
    CHECK(check_jacobi(testing::fixture("so3").J, cfg).passed());
    auto constant = testing::structure_of({{"0", "2/3", "-5"}, {"-2/3", "0", "7"}, {"5", "-7", "0"}},
                                          testing::free_domain(3));
    CHECK(check_jacobi(constant, cfg).passed());

    auto nonjacobi = testing::fixture("nonjacobi").J;
    auto report = check_jacobi(nonjacobi, cfg);
    CHECK(report.verdict == Verdict::Fail);
    CHECK(report.location == std::vector<std::size_t>{1, 2, 3});
    // hand expansion: only J_12 * d1 J_31 survives, giving 1 * (-1)
    CHECK(report.residual == Expr(-1));
    CHECK(report.evidence.is(Outcome::Nonzero));
}

TEST_CASE("check_jacobi passes on every shipped structure matrix") {
    SamplerConfig cfg;
    for (const auto& name : kJacobiFixtures) {
        CAPTURE(name);
        auto J = testing::fixture(name).J;
        CHECK(check_skew(J, cfg).passed());
        CHECK(check_jacobi(J, cfg).passed());
    }
}

TEST_CASE("canonical forms satisfy the Jacobi identity") {
    SamplerConfig cfg;
    for (std::size_t n = 1; n <= 6; ++n)
        for (std::size_t r = 0; r <= n; r += 2) {
            CAPTURE(n);
            CAPTURE(r);
            auto S = make_structure(testing::free_domain(n), canonical_matrix(n, r).matrix);
            CHECK(check_jacobi(S, cfg).passed());
        }
}

TEST_CASE("numeric_rank examples") {
    CHECK(numeric_rank(testing::fixture("so3").J, {{"x1", 1}, {"x2", 1}, {"x3", 1}}) == 2);
    CHECK(numeric_rank(testing::fixture("zero3").J, {{"x1", 0.3}, {"x2", -2}, {"x3", 5}}) == 0);
    CHECK(numeric_rank(testing::fixture("toda3").J, {{"x1", 0.7}, {"x2", 1.9}, {"x3", 0.2}, {"x4", -1}, {"x5", 3}}) ==
          4);
    CHECK(numeric_rank(testing::fixture("so3_unrestricted").J, {{"x1", 0}, {"x2", 0}, {"x3", 0}}) == 0);
}

TEST_CASE("generic_rank examples") {
    SamplerConfig cfg;
    auto kermack = generic_rank(testing::fixture("kermack").J, cfg);
    CHECK(kermack.rank == 2);
    CHECK(kermack.consistent);
    auto dpsi = generic_rank(testing::fixture("dpsi").J, cfg);
    CHECK(dpsi.rank == 2);
    CHECK(dpsi.consistent);
    auto so3 = generic_rank(testing::fixture("so3_unrestricted").J, cfg);
    CHECK(so3.rank == 2);
    CHECK_FALSE(so3.consistent);
    REQUIRE(so3.witness.has_value());
    CHECK(so3.witness_rank == 0);
    for (const auto& [name, value] : *so3.witness) CHECK(std::abs(value) < 1e-12);
}

TEST_CASE("transform_structure examples") {
    auto kermack = testing::fixture("kermack").J;
    CHECK(transform_structure(kermack.entries, ExprMatrix::identity(3)) == kermack.entries);

    const Domain& d = kermack.domain;
    auto K = testing::matrix_of({{"1/x1", "0", "0"}, {"0", "1/(b*x2)", "0"}, {"1", "1", "1"}}, d);
    CHECK(transform_structure(kermack.entries, K) == canonical_matrix(3, 2).matrix);

    // three constant combines bring the kernel-psi matrix to psi times S(4,2)
    auto dpsi = testing::fixture("dpsi").J;
    const std::size_t n = 4;
    ExprMatrix Kd = ExprMatrix::identity(n);
    for (auto t : {ElementaryTransform::combine(n, 3, Expr(1), 0), ElementaryTransform::combine(n, 3, Expr(1), 1),
                   ElementaryTransform::combine(n, 2, Expr(1), 1)})
        Kd = etm_matrix(t) * Kd;
    Expr psi = P("exp(x1+2*x2+x3+x4)", dpsi.domain);
    auto lhs = transform_structure(dpsi.entries, Kd);
    CHECK(lhs == testing::scaled(psi, canonical_matrix(4, 2).matrix));
}

TEST_CASE("transform_structure stays skew and keeps the rank") {
    SamplerConfig cfg;
    auto so3 = testing::fixture("so3").J;
    const Domain& d = so3.domain;
    std::vector<ExprMatrix> Ks = {
        testing::matrix_of({{"-1/x3", "0", "0"}, {"0", "1", "0"}, {"x1/x3", "x2/x3", "1"}}, d),
        testing::matrix_of({{"-x1", "-x2", "0"}, {"0", "x2", "0"}, {"x1", "x2", "x3"}}, d),
        testing::matrix_of({{"1", "x1^2", "0"}, {"0", "exp(x2)", "x1"}, {"x3", "0", "2"}}, d),
    };
    PointSampler sampler(d, 31);
    for (const auto& K : Ks) {
        auto M = transform_structure(so3.entries, K);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK((M(i, j) + M(j, i)).is_zero());
        auto T = make_structure(d, M);
        for (int k = 0; k < 10; ++k) {
            Env env = sampler.point(k);
            CHECK(numeric_rank(T, env) == numeric_rank(so3, env));
        }
    }
}

TEST_CASE("check_casimir examples") {
    SamplerConfig cfg;
    auto kermack = testing::fixture("kermack").J;
    CHECK(check_casimir(kermack, P("x1+x2+x3", kermack.domain), cfg).passed());
    auto so3 = testing::fixture("so3").J;
    CHECK(check_casimir(so3, P("(x1^2+x2^2+x3^2)/2", so3.domain), cfg).passed());
    CHECK(check_casimir(so3, Expr(Rational(7, 3)), cfg).passed());
    CHECK(check_casimir(testing::fixture("toda3").J, Expr(5), cfg).passed());

    auto bad = check_casimir(so3, P("x1", so3.domain), cfg);
    CHECK(bad.verdict == Verdict::Fail);
    CHECK_FALSE(bad.location.empty());
}

TEST_CASE("make_structure rejects malformed input") {
    Domain d = testing::free_domain(2);
    CHECK_THROWS(make_structure(d, ExprMatrix(3, 3)));
    CHECK_THROWS(make_structure(d, ExprMatrix(2, 3)));
}
