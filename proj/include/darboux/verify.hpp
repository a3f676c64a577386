#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "darboux/congruence.hpp"
#include "darboux/evaluate.hpp"
#include "darboux/poisson.hpp"

namespace darboux {

struct VerifyConfig {
    std::uint64_t seed = 0x5eed;
    int samples = 100;
    double tolerance = 1e-8;
    int max_attempts = 8;
};

struct IdentityRecord {
    std::string name;
    int samples = 0;
    double max_residual = 0.0;
    std::optional<Env> worst_point;
    bool passed = true;
};

struct VerificationReport {
    std::vector<IdentityRecord> identities;
    bool passed = true;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
    int samples = 0;
};

/**
 * Samples every identity a result claims:
 *   congruence     K·J·Kᵀ - g·S
 *   jacobian       dK_ij/dx_k - dK_ik/dx_j          (when K is claimed Jacobian)
 *   diffeomorphism central differences of y - K      (when y is present)
 *   casimir:k      J·grad(C_k)
 * Residuals are relative to the magnitude of the terms involved.
 */
VerificationReport verify_reduction(const StructureMatrix& J, const DarbouxResult& result, const VerifyConfig& cfg);

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> x;
    std::vector<double> H;
    /// C[k][s]: value of Casimir s at step k.
    std::vector<std::vector<double>> C;
    std::string method = "rk4";
    bool truncated = false;
    std::string truncation_reason;
};

/// Classical fixed-step RK4 on dx/dt = J(x)·grad H(x).  `params` binds parameters.
Trajectory simulate(const StructureMatrix& J, const Expr& H, const std::vector<double>& x0, const Env& params,
                    double t_end, double h, const std::vector<Expr>& casimirs = {});

struct ConservationReport {
    double hamiltonian_drift = 0.0;
    std::vector<double> casimir_drift;
    double max_drift() const;
};

ConservationReport conservation_report(const Trajectory& tr);

}  // namespace darboux
