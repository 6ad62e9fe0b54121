#pragma once

#include <optional>

#include "qbatt/collision.hpp"
#include "qbatt/operators.hpp"

namespace qbatt {

/// Residuals of the equilibrium condition for a candidate H0. The primary
/// condition is [U, H0 + H_A] = 0; the two commutator residuals are the
/// sufficient conditions the solver targets.
struct EquilibriumCertificate {
    HermitianOperator h0;
    double residual_u = 0.0;   // ||[U, H0 + H_A]||_F
    double residual_hs = 0.0;  // ||[H0, H_S]||_F
    double residual_v = 0.0;   // ||[H0 + H_A, V]||_F
    DensityMatrix pi;          // omega_beta(H0)
    double fixed_point_gap = 0.0;  // trace distance between E(pi) and pi
    double scale = 1.0;

    bool valid() const { return residual_u <= 1e-9 * scale && fixed_point_gap <= 1e-9; }
};

EquilibriumCertificate check_equilibrium(const CollisionModel& model,
                                         const HermitianOperator& h0);

struct H0Solution {
    HermitianOperator h0;     // gauge-fixed: Tr H0 = 0
    double residual = 0.0;    // ||[H0 + H_A, V]||_F at the solution
    int null_space_dim = 0;   // solution-space dimension beyond the trace gauge
};

/// Solve [H0 + H_A, V] = 0 for H0 in the commutant of H_S (blockwise over
/// degenerate eigenspaces). Returns nothing when only the trivial NESS
/// residual remains.
std::optional<H0Solution> find_h0(const CollisionModel& model);

struct Classification {
    std::optional<EquilibriumCertificate> certificate;  // engaged for equilibrium maps
    std::optional<H0Solution> solution;
    double sigma_rate = 0.0;  // per-step entropy production at the invariant state
    bool fixed_point_degenerate = false;

    bool is_equilibrium() const { return certificate.has_value(); }
};

Classification classify(const CollisionModel& model);

}  // namespace qbatt
