#pragma once

#include <utility>
#include <vector>

#include "qbatt/operators.hpp"

namespace qbatt {

/// One repeated-interaction problem instance: battery H_S, fresh thermal
/// ancillas H_A at inverse temperature beta, coupling V switched on for tau,
/// optionally followed by a free evolution of duration gap. gap = 0 recovers
/// the plain protocol.
struct CollisionModel {
    CollisionModel(HermitianOperator h_s_in, HermitianOperator h_a_in, HermitianOperator v_in,
                   double beta_in, double tau_in, double gap_in = 0.0);

    HermitianOperator h_s;
    HermitianOperator h_a;
    HermitianOperator v;
    double beta;
    double tau;
    double gap;

    Eigen::Index system_dim() const { return h_s.dim(); }
    Eigen::Index ancilla_dim() const { return h_a.dim(); }
    Eigen::Index composite_dim() const { return v.dim(); }
};

/// Thermodynamic ledger of one collision. The free-evolution gap contributes
/// nothing: all entries are evaluated on the pre-gap composite state, while
/// rho_after carries the post-gap battery state.
struct StepRecord {
    int n = 0;
    DensityMatrix rho_after;
    double work = 0.0;                // switching work, composite-energy change
    double heat = 0.0;                // minus the ancilla energy change
    double energy_change = 0.0;       // battery energy change; = work + heat
    double entropy_change = 0.0;      // von Neumann entropy change of the battery
    double entropy_production = 0.0;  // relative entropy to the decorrelated product
};

struct Trajectory {
    std::vector<StepRecord> records;
    bool converged = false;
    double total_work = 0.0;
    double total_heat = 0.0;
    double total_entropy_production = 0.0;
};

/// Prepared propagator for the collision map; builds the composite unitary
/// once so trajectories avoid one eigensolve per step.
class CollisionMap {
  public:
    explicit CollisionMap(CollisionModel model);

    const CollisionModel& model() const { return model_; }
    const DensityMatrix& ancilla_state() const { return omega_; }

    /// State update only: rho -> Tr_A[U (rho x omega) U†], then the free gap.
    DensityMatrix apply(const DensityMatrix& rho) const;

    /// State update plus the full thermodynamic ledger.
    StepRecord step(const DensityMatrix& rho, int n = 1) const;

  private:
    CollisionModel model_;
    DensityMatrix omega_;
    Matrix u_;
    Matrix gap_u_;      // identity when gap == 0
    Matrix h_joint_;    // H_S x I + I x H_A
};

StepRecord step(const CollisionModel& model, const DensityMatrix& rho);

/// Iterate the map from rho0 until the trace distance between successive
/// states drops to conv_tol or max_steps is reached.
Trajectory evolve(const CollisionModel& model, const DensityMatrix& rho0, int max_steps = 1000000,
                  double conv_tol = 1e-12);

/// Matrix of rho -> Tr_A[U (rho x omega) U†] (including the gap propagator)
/// acting on column-stacked density matrices.
Matrix superoperator_matrix(const CollisionModel& model);

enum class FixedPointMethod { Spectral, Iterate };

struct FixedPointResult {
    DensityMatrix state;
    bool degenerate = false;
    int fixed_space_dim = 1;  // multiplicity of the unit eigenvalue of the map
    double residual = 0.0;    // trace distance between E(state) and state
};

FixedPointResult fixed_point(const CollisionModel& model,
                             FixedPointMethod method = FixedPointMethod::Spectral);

struct LocalThermo {
    double heat = 0.0;
    double work = 0.0;
    double entropy_production = 0.0;
};

/// System-only forms of heat, work and entropy production, valid for maps
/// with equilibrium operator h0 ([h0, h_s] = 0 is required).
LocalThermo local_thermo(const HermitianOperator& h_s, const HermitianOperator& h0,
                         const DensityMatrix& rho_before, const DensityMatrix& rho_after,
                         const DensityMatrix& pi);

}  // namespace qbatt
