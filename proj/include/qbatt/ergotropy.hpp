#pragma once

#include <cstdint>
#include <vector>

#include "qbatt/operators.hpp"

namespace qbatt {

/// Maximal cyclic-unitary work extractable from rho against h, with the
/// passive state left behind and the thermal bound at matched entropy.
struct ErgotropyReport {
    double value = 0.0;
    DensityMatrix passive_state;
    Matrix optimal_unitary;  // maps the state eigenbasis onto the energy eigenbasis
    double bound = 0.0;
    double beta_star = 0.0;  // +infinity when rho is pure
};

ErgotropyReport ergotropy(const DensityMatrix& rho, const HermitianOperator& h);

struct BoundResult {
    double bound = 0.0;
    double beta_star = 0.0;
};

/// Thermal bound: Tr[h (rho - omega_beta*)] with beta* matching the entropy
/// of rho by bisection.
BoundResult ergotropy_bound(const DensityMatrix& rho, const HermitianOperator& h);

/// Extraction economics of the equilibrium state omega_beta(h0) of a battery
/// h_s, for commuting h0. Populations and energies are listed against the
/// common eigenbasis in ascending battery energy.
struct ChargingReport {
    double ergotropy = 0.0;
    double w_r = 0.0;  // recharging work sigma -> pi
    double q_r = 0.0;  // recharging heat, always <= 0
    double eta = 0.0;  // ergotropy / w_r; NaN when nothing to charge
    bool eta_defined = false;
    std::vector<int> permutation;  // 0-based ordering of h0 energies, ascending
    std::vector<double> battery_energies;
    std::vector<double> h0_energies;
    std::vector<double> populations;
    std::vector<double> passive_populations;
    Matrix basis;  // common eigenbasis, one column per level
};

ChargingReport charging_report(const HermitianOperator& h_s, const HermitianOperator& h0,
                               double beta);

struct NarrowBandPoint {
    double epsilon = 0.0;
    double ergotropy = 0.0;
    double w_r = 0.0;
    double q_r = 0.0;
    double eta = 0.0;
};

struct NarrowBandScan {
    std::vector<NarrowBandPoint> points;
    double ergotropy_slope = 0.0;  // log-log least-squares fit against epsilon
    double heat_slope = 0.0;       // same for |q_r|
};

/// Sweep of H0(eps) = sum_i (e0_center + offsets_i * eps) |E_i><E_i| over the
/// battery eigenbasis. Offsets must lie in [-1, 1]; epsilons must be > 0.
NarrowBandScan narrow_band_scan(const HermitianOperator& h_s, double e0_center,
                                const std::vector<double>& offsets,
                                const std::vector<double>& epsilons, double beta);

/// Best work extraction over `trials` Haar-distributed unitaries (QR of a
/// complex Gaussian matrix with phase fixing). Deterministic given the seed,
/// independent of thread count.
double random_unitary_dominance(const DensityMatrix& rho, const HermitianOperator& h, int trials,
                                std::uint64_t seed);

}  // namespace qbatt
