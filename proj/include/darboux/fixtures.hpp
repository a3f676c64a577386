#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "darboux/congruence.hpp"
#include "darboux/problem_io.hpp"

namespace darboux {

/// J_ij = a_ij * phi_i(x_i) * phi_j(x_j) on the positive orthant.
/// phi[i] must depend on x_i alone; A must be skew.
Problem separable_problem(const RationalMatrix& A, const std::vector<Expr>& phi, const std::string& name);

/// A seeded separable instance: dimension 2..max_n, random rational A of random
/// even rank, each phi_i drawn from {c, x_i, 1/x_i, exp(x_i)}.
Problem random_separable(std::uint64_t seed, std::size_t max_n = 6);

/**
 * J = psi(v_1·x, ..., v_m·x) * A where the v_k span the kernel of A.
 * `psi` is written in z1..zm.  Variables are unrestricted.
 */
Problem dpsi_problem(const RationalMatrix& A, const std::vector<std::vector<Rational>>& kernel, const std::string& psi,
                     const std::string& name);

/// The 4x4 instance with kernel vectors (0,1,1,0), (1,1,0,1) and the given psi.
Problem dpsi_example(const std::string& psi = "exp(z1+z2)");

/// Rank of a rational matrix by fraction-free elimination.
std::size_t rational_rank(const RationalMatrix& A);

}  // namespace darboux
