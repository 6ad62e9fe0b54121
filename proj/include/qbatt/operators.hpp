#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qbatt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Tolerances on normalized quantities. Constructors re-symmetrize and clamp
// before validating, since collision iterations accumulate rounding.
inline constexpr double kHermTol = 1e-12;
inline constexpr double kNullEigTol = 1e-12;   // eigenvalue below this counts as null space
inline constexpr double kNullWeightTol = 1e-10;
inline constexpr double kLogClamp = 1e-15;     // 0*ln(0) cutoff

/// Square complex matrix checked for Hermiticity and stored as (A + A†)/2.
class HermitianOperator {
  public:
    explicit HermitianOperator(Matrix a);

    const Matrix& matrix() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }

  private:
    Matrix mat_;
};

/// Hermitian, unit-trace, positive-semidefinite operator. Eigenvalues within
/// the tolerance window around [0, 1] are clamped; anything worse is rejected.
class DensityMatrix {
  public:
    explicit DensityMatrix(Matrix rho);

    const Matrix& matrix() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }

  private:
    Matrix mat_;
};

/// Eigenvalues ascending, orthonormal eigenvectors as columns.
struct SpectralDecomposition {
    RealVector eigenvalues;
    Matrix eigenvectors;
};

Matrix identity(Eigen::Index dim);

/// Kronecker product, system factor first: row index s * dim(b) + a.
Matrix tensor(const Matrix& a, const Matrix& b);

Matrix commutator(const Matrix& a, const Matrix& b);

/// Trace out the second (ancilla) factor of an operator on a d_s * d_a space.
Matrix partial_trace_ancilla(const Matrix& ab, Eigen::Index d_s, Eigen::Index d_a);

/// Trace out the first (system) factor.
Matrix partial_trace_system(const Matrix& ab, Eigen::Index d_s, Eigen::Index d_a);

SpectralDecomposition herm_eig(const HermitianOperator& a);

/// exp(-i t h) computed through the spectral decomposition of h.
Matrix unitary_from_hamiltonian(const HermitianOperator& h, double t);

/// Von Neumann entropy in nats.
double vn_entropy(const DensityMatrix& rho);

/// Relative entropy D(a||b) in nats. Returns +infinity when a puts more than
/// kNullWeightTol of weight on the numerical null space of b.
double rel_entropy(const DensityMatrix& a, const DensityMatrix& b);

/// Thermal state e^{-beta h} / Tr e^{-beta h}; beta must be finite positive.
DensityMatrix gibbs(const HermitianOperator& h, double beta);

/// beta = infinity limit: equal mixture over the minimal-eigenvalue eigenspace.
DensityMatrix ground_state(const HermitianOperator& h);

/// (1/2) sum |eigenvalues of a - b|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace qbatt
