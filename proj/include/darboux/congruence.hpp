#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "darboux/domain.hpp"
#include "darboux/matrix.hpp"
#include "darboux/poisson.hpp"
#include "darboux/zero_test.hpp"

namespace darboux {

/**
 * One elementary row operation; its column partner is the transpose.
 * Indices are 0-based in memory and 1-based in every printed or serialized form.
 *
 *   Permute{i,j}     swap rows i and j
 *   Scale{i,xi}      row i *= xi
 *   Combine{i,xi,j}  row i += xi * row j
 */
struct ElementaryTransform {
    enum class Kind { Permute, Scale, Combine };

    Kind kind = Kind::Permute;
    std::size_t n = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    Expr xi = Expr(1);

    static ElementaryTransform permute(std::size_t n, std::size_t i, std::size_t j);
    static ElementaryTransform scale(std::size_t n, std::size_t i, Expr xi);
    static ElementaryTransform combine(std::size_t n, std::size_t i, Expr xi, std::size_t j);
};

std::string to_string(ElementaryTransform::Kind k);
/// `P[1,2]`, `M[1;1/x1]`, `L[3;1,2]` with 1-based indices.
std::string describe(const ElementaryTransform& t);

ExprMatrix etm_matrix(const ElementaryTransform& t);

struct JetmCheck {
    bool jetm = false;
    std::string reason;
};
JetmCheck is_jetm(const ElementaryTransform& t, const Domain& domain);

struct Diffeomorphism {
    std::vector<Expr> y;
    bool closed_form = true;
};
/// The coordinate change whose Jacobian is etm_matrix(t); integration constants 0.
Diffeomorphism jetm_diffeomorphism(const ElementaryTransform& t, const Domain& domain);

/// E·M·Eᵀ, applied as a row operation followed by the matching column operation.
ExprMatrix apply_step(const ExprMatrix& M, const ElementaryTransform& t);
/// E·K, the row operation alone.
ExprMatrix apply_row(const ExprMatrix& K, const ElementaryTransform& t);

struct ReductionStep {
    ElementaryTransform transform;
    bool jetm = false;
    std::string reason;
    /// Working matrix after this step.
    ExprMatrix after;
};

struct ReductionTrace {
    ExprMatrix initial;
    std::vector<ReductionStep> steps;
    ExprMatrix K;

    const ExprMatrix& final_matrix() const { return steps.empty() ? initial : steps.back().after; }
};

using RationalMatrix = std::vector<std::vector<Rational>>;

struct ConstantReduction {
    ReductionTrace trace;
    std::size_t rank = 0;
};

/// Exact reduction of a rational skew matrix to its canonical form.
ConstantReduction reduce_constant(const RationalMatrix& A);

/// Passes iff dK_ij/dx_k = dK_ik/dx_j for all i and j<k; location is (i,j,k).
CheckReport jacobian_condition(const ExprMatrix& K, const Domain& domain, const SamplerConfig& cfg);

/// Path quadrature of a Jacobian matrix; throws IntegrationError on incompatibility.
Diffeomorphism integrate_jacobian(const ExprMatrix& K, const Domain& domain, const SamplerConfig& cfg);

struct ScalarFactor {
    Expr g;
    bool matches = false;
    ZeroVerdict nonvanishing;
    std::vector<std::size_t> mismatch;  // 1-based (i,j) when the pattern fails
};
ScalarFactor extract_scalar_factor(const ExprMatrix& M, std::size_t n, std::size_t r, const Domain& domain,
                                   const SamplerConfig& cfg);

struct ReparamVerdict {
    Verdict verdict = Verdict::Undetermined;
    bool rank_at_most_two = false;
    bool casimir_dependent = false;
    bool constant = false;
    bool symplectic_violation = false;
    std::optional<Verdict> direct_jacobi;

    /// Every property that holds, in a fixed order.
    std::vector<std::string> properties() const;
    /// properties() joined with "; ", or the direct check's outcome.
    std::string basis() const;
};

/**
 * Whether g·S(n,r) is again a structure matrix.  `coordinates` describes the
 * variables g is written in; `casimir_coordinates` are the ones among them that
 * are Casimirs of the canonical form.
 */
ReparamVerdict reparam_validity(const Expr& g, std::size_t n, std::size_t r, const Domain& coordinates,
                                const std::set<std::string>& casimir_coordinates, const SamplerConfig& cfg);

enum class Status { JacobianCongruence, CongruenceOnly, NttCongruence, Failed };
std::string to_string(Status s);
Status status_from_string(const std::string& s);

struct DarbouxResult {
    Status status = Status::Failed;
    std::size_t n = 0;
    std::size_t r = 0;
    ExprMatrix K;
    std::vector<Expr> y;
    std::vector<Expr> casimirs;
    std::optional<Expr> ntt_factor;
    /// ntt_factor written in the Darboux coordinates y1..yn, when K can be inverted exactly.
    std::optional<Expr> ntt_factor_darboux;
    std::string ntt_branch;
    std::optional<ReparamVerdict> reparam;
    ReductionTrace trace;
    bool closed_form = true;
    std::vector<std::string> notes;
};

struct ReduceOptions {
    bool require_jacobian = false;
    bool allow_ntt = false;
    /// 0 means 12*n*n.
    std::size_t max_steps = 0;
    /// Alternatives explored per search attempt.
    std::size_t backtrack_budget = 64;
    SamplerConfig cfg;
};

DarbouxResult reduce_functional(const StructureMatrix& J, const ReduceOptions& opts);

/// Last n-r components of y, each checked against J.  Throws std::logic_error on failure.
std::vector<Expr> casimirs_from(const StructureMatrix& J, const DarbouxResult& result, const SamplerConfig& cfg);

/// Names y1..yn used for Darboux coordinates.
std::vector<std::string> darboux_names(std::size_t n);

}  // namespace darboux
