#include "qbatt/operators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qbatt/errors.hpp"

namespace qbatt {

namespace {

void require_square_finite(const Matrix& a, const char* what) {
    if (a.rows() < 1 || a.rows() != a.cols()) {
        throw std::invalid_argument(std::string(what) + ": operator must be square, got " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
    if (!a.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": operator has non-finite entries");
    }
}

Eigen::SelfAdjointEigenSolver<Matrix> solve_hermitian(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
    if (solver.info() != Eigen::Success) {
        throw numeric_error("Hermitian eigendecomposition did not converge (dim " +
                            std::to_string(a.rows()) + ")");
    }
    return solver;
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix a) {
    require_square_finite(a, "HermitianOperator");
    const double defect = (a - a.adjoint()).cwiseAbs().maxCoeff();
    const double scale = 1.0 + a.cwiseAbs().maxCoeff();
    if (defect > kHermTol * scale) {
        throw std::invalid_argument("HermitianOperator: hermiticity defect " +
                                    std::to_string(defect) + " exceeds tolerance");
    }
    mat_ = 0.5 * (a + a.adjoint());
}

DensityMatrix::DensityMatrix(Matrix rho) {
    require_square_finite(rho, "DensityMatrix");
    const double defect = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    const double scale = 1.0 + rho.cwiseAbs().maxCoeff();
    if (defect > kHermTol * scale) {
        throw std::invalid_argument("DensityMatrix: hermiticity defect " + std::to_string(defect) +
                                    " exceeds tolerance");
    }
    Matrix sym = 0.5 * (rho + rho.adjoint());
    const double tr = sym.trace().real();
    if (std::abs(tr - 1.0) > kHermTol) {
        throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr) + " is not 1");
    }
    sym /= tr;

    auto solver = solve_hermitian(sym);
    const RealVector& ev = solver.eigenvalues();
    if (ev.minCoeff() < -kHermTol || ev.maxCoeff() > 1.0 + kHermTol) {
        throw std::invalid_argument("DensityMatrix: eigenvalue " +
                                    std::to_string(ev.minCoeff() < -kHermTol ? ev.minCoeff()
                                                                             : ev.maxCoeff()) +
                                    " outside [0, 1] tolerance window");
    }
    if (ev.minCoeff() < 0.0 || ev.maxCoeff() > 1.0) {
        RealVector clamped = ev.cwiseMax(0.0).cwiseMin(1.0);
        clamped /= clamped.sum();
        mat_ = solver.eigenvectors() * clamped.asDiagonal() *
               solver.eigenvectors().adjoint();
        mat_ = 0.5 * (mat_ + mat_.adjoint());
    } else {
        mat_ = std::move(sym);
    }
}

Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

Matrix tensor(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix partial_trace_ancilla(const Matrix& ab, Eigen::Index d_s, Eigen::Index d_a) {
    if (ab.rows() != d_s * d_a || ab.rows() != ab.cols()) {
        throw std::invalid_argument("partial_trace_ancilla: dimension mismatch (" +
                                    std::to_string(ab.rows()) + " vs " + std::to_string(d_s) +
                                    "*" + std::to_string(d_a) + ")");
    }
    Matrix out = Matrix::Zero(d_s, d_s);
    for (Eigen::Index i = 0; i < d_s; ++i) {
        for (Eigen::Index j = 0; j < d_s; ++j) {
            Complex acc = 0.0;
            for (Eigen::Index a = 0; a < d_a; ++a) {
                acc += ab(i * d_a + a, j * d_a + a);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix partial_trace_system(const Matrix& ab, Eigen::Index d_s, Eigen::Index d_a) {
    if (ab.rows() != d_s * d_a || ab.rows() != ab.cols()) {
        throw std::invalid_argument("partial_trace_system: dimension mismatch");
    }
    Matrix out = Matrix::Zero(d_a, d_a);
    for (Eigen::Index a = 0; a < d_a; ++a) {
        for (Eigen::Index b = 0; b < d_a; ++b) {
            Complex acc = 0.0;
            for (Eigen::Index s = 0; s < d_s; ++s) {
                acc += ab(s * d_a + a, s * d_a + b);
            }
            out(a, b) = acc;
        }
    }
    return out;
}

SpectralDecomposition herm_eig(const HermitianOperator& a) {
    auto solver = solve_hermitian(a.matrix());
    return SpectralDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

Matrix unitary_from_hamiltonian(const HermitianOperator& h, double t) {
    auto eig = herm_eig(h);
    Eigen::VectorXcd phases(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) {
        phases(i) = std::exp(Complex(0.0, -t * eig.eigenvalues(i)));
    }
    return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

double vn_entropy(const DensityMatrix& rho) {
    auto solver = solve_hermitian(rho.matrix());
    double s = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double lambda = std::min(std::max(solver.eigenvalues()(i), 0.0), 1.0);
        if (lambda > kLogClamp) {
            s -= lambda * std::log(lambda);
        }
    }
    return std::max(s, 0.0);
}

double rel_entropy(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("rel_entropy: dimension mismatch (" +
                                    std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) +
                                    ")");
    }
    auto ea = solve_hermitian(a.matrix());
    auto eb = solve_hermitian(b.matrix());

    double tr_a_ln_a = 0.0;
    for (Eigen::Index i = 0; i < ea.eigenvalues().size(); ++i) {
        const double lambda = std::min(std::max(ea.eigenvalues()(i), 0.0), 1.0);
        if (lambda > kLogClamp) {
            tr_a_ln_a += lambda * std::log(lambda);
        }
    }

    // Eigenvalues below kNullEigTol count as null space for the support test;
    // every positive eigenvalue still enters the log sum, so the finite branch
    // stays consistent with vn_entropy's clamping.
    double tr_a_ln_b = 0.0;
    double null_weight = 0.0;
    for (Eigen::Index j = 0; j < eb.eigenvalues().size(); ++j) {
        const double mu = eb.eigenvalues()(j);
        const auto vj = eb.eigenvectors().col(j);
        const double weight = std::real(vj.dot(a.matrix() * vj));
        if (mu < kNullEigTol) {
            null_weight += std::max(weight, 0.0);
        }
        if (mu > 0.0) {
            tr_a_ln_b += weight * std::log(std::min(mu, 1.0));
        }
    }
    if (null_weight > kNullWeightTol) {
        return std::numeric_limits<double>::infinity();
    }
    return tr_a_ln_a - tr_a_ln_b;
}

DensityMatrix gibbs(const HermitianOperator& h, double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("gibbs: beta must be finite and positive (use ground_state "
                                    "for the beta = infinity limit)");
    }
    auto eig = herm_eig(h);
    // Shift by the minimal eigenvalue so the largest weight is exactly 1.
    const double e_min = eig.eigenvalues.minCoeff();
    RealVector w(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        w(i) = std::exp(-beta * (eig.eigenvalues(i) - e_min));
    }
    w /= w.sum();
    Matrix rho = eig.eigenvectors * w.asDiagonal() * eig.eigenvectors.adjoint();
    return DensityMatrix(rho);
}

DensityMatrix ground_state(const HermitianOperator& h) {
    auto eig = herm_eig(h);
    const double e_min = eig.eigenvalues.minCoeff();
    const double tol = 1e-10 * (1.0 + std::abs(e_min));
    RealVector w = RealVector::Zero(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (eig.eigenvalues(i) <= e_min + tol) {
            w(i) = 1.0;
        }
    }
    w /= w.sum();
    Matrix rho = eig.eigenvectors * w.asDiagonal() * eig.eigenvectors.adjoint();
    return DensityMatrix(rho);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("trace_distance: dimension mismatch");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix() - b.matrix(),
                                                 Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw numeric_error("trace_distance: eigendecomposition did not converge");
    }
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace qbatt
