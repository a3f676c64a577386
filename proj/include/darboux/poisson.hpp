#pragma once

#include <optional>
#include <string>
#include <vector>

#include "darboux/domain.hpp"
#include "darboux/evaluate.hpp"
#include "darboux/matrix.hpp"
#include "darboux/zero_test.hpp"

namespace darboux {

struct StructureMatrix {
    Domain domain;
    ExprMatrix entries;
    std::optional<Expr> hamiltonian;

    std::size_t dimension() const { return entries.rows(); }
    const Expr& operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
};

/// Checks shape, declared symbols and canonicalizes entries.
StructureMatrix make_structure(Domain domain, ExprMatrix entries, std::optional<Expr> hamiltonian = {});

struct CanonicalTarget {
    std::size_t n = 0;
    std::size_t r = 0;
    ExprMatrix matrix;
};

/// r/2 blocks [[0,1],[-1,0]] on the diagonal followed by an (n-r) zero block.
CanonicalTarget canonical_matrix(std::size_t n, std::size_t r);

enum class Verdict { Pass, Fail, Undetermined };
std::string to_string(Verdict v);

struct CheckReport {
    Verdict verdict = Verdict::Pass;
    /// 1-based indices of the offending entry, triple or component.
    std::vector<std::size_t> location;
    Expr residual;
    ZeroVerdict evidence;

    bool passed() const { return verdict == Verdict::Pass; }
};

CheckReport check_skew(const StructureMatrix& J, const SamplerConfig& cfg);

/// The Jacobi residual for one triple (0-based indices).
Expr jacobi_residual(const StructureMatrix& J, std::size_t i, std::size_t j, std::size_t k);
CheckReport check_jacobi(const StructureMatrix& J, const SamplerConfig& cfg);

/// Rank of J evaluated at `point` (variables and parameters).
int numeric_rank(const StructureMatrix& J, const Env& point);

struct RankReport {
    int rank = 0;
    bool consistent = true;
    int samples = 0;
    /// First point whose rank differs from the maximum.
    std::optional<Env> witness;
    int witness_rank = 0;
};

/// Rank at sampled interior points, plus a probe at the origin of the
/// unrestricted coordinates when it is not a pole.
RankReport generic_rank(const StructureMatrix& J, const SamplerConfig& cfg);

/// K·J·Kᵀ, computed on the upper triangle and mirrored.
ExprMatrix transform_structure(const ExprMatrix& J, const ExprMatrix& K);

/// Passes iff every component of J·∇C vanishes.
CheckReport check_casimir(const StructureMatrix& J, const Expr& C, const SamplerConfig& cfg);

}  // namespace darboux
