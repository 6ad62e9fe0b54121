#include "qbatt/equilibrium.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "qbatt/errors.hpp"

namespace qbatt {

namespace {

constexpr double kDegenRel = 1e-10;  // eigenvalue gap below this merges a block

std::vector<std::pair<Eigen::Index, Eigen::Index>> degenerate_blocks(const RealVector& ev) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;
    const double tol = kDegenRel * (1.0 + ev.cwiseAbs().maxCoeff());
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= ev.size(); ++i) {
        if (i == ev.size() || ev(i) - ev(i - 1) > tol) {
            blocks.emplace_back(start, i);
            start = i;
        }
    }
    return blocks;
}

}  // namespace

EquilibriumCertificate check_equilibrium(const CollisionModel& model,
                                         const HermitianOperator& h0) {
    if (h0.dim() != model.system_dim()) {
        throw std::invalid_argument("check_equilibrium: H0 dimension mismatch");
    }
    const Eigen::Index d_s = model.system_dim();
    const Eigen::Index d_a = model.ancilla_dim();

    const Matrix h0_joint =
        tensor(h0.matrix(), identity(d_a)) + tensor(identity(d_s), model.h_a.matrix());
    const Matrix h_total = tensor(model.h_s.matrix(), identity(d_a)) +
                           tensor(identity(d_s), model.h_a.matrix()) + model.v.matrix();
    const Matrix u = unitary_from_hamiltonian(HermitianOperator(h_total), model.tau);

    DensityMatrix pi = gibbs(h0, model.beta);
    const CollisionMap map(model);

    EquilibriumCertificate cert{
        h0,
        commutator(u, h0_joint).norm(),
        commutator(h0.matrix(), model.h_s.matrix()).norm(),
        commutator(h0_joint, model.v.matrix()).norm(),
        pi,
        trace_distance(map.apply(pi), pi),
        1.0 + h0_joint.norm(),
    };
    return cert;
}

std::optional<H0Solution> find_h0(const CollisionModel& model) {
    const Eigen::Index d_s = model.system_dim();
    const Eigen::Index d_a = model.ancilla_dim();
    const Eigen::Index d = d_s * d_a;

    auto eig = herm_eig(model.h_s);
    const auto blocks = degenerate_blocks(eig.eigenvalues);

    // Hermitian basis of the H_S commutant, block-diagonal over degenerate
    // eigenspaces, with the identity (pure gauge) direction projected out.
    std::vector<Matrix> basis;
    {
        // Traceless diagonal combinations first: P_k - P_last over all block
        // projectors in sequence, then intra-block off-diagonal pairs.
        std::vector<Matrix> diag_units;
        for (Eigen::Index i = 0; i < d_s; ++i) {
            const auto v_i = eig.eigenvectors.col(i);
            diag_units.push_back(v_i * v_i.adjoint());
        }
        for (Eigen::Index i = 0; i + 1 < d_s; ++i) {
            basis.push_back(diag_units[i] - diag_units[d_s - 1]);
        }
        for (const auto& [lo, hi] : blocks) {
            for (Eigen::Index i = lo; i < hi; ++i) {
                for (Eigen::Index j = i + 1; j < hi; ++j) {
                    const auto v_i = eig.eigenvectors.col(i);
                    const auto v_j = eig.eigenvectors.col(j);
                    basis.push_back(v_i * v_j.adjoint() + v_j * v_i.adjoint());
                    basis.push_back(Complex(0.0, 1.0) * (v_i * v_j.adjoint() - v_j * v_i.adjoint()));
                }
            }
        }
    }

    const Matrix rhs_op = -commutator(tensor(identity(d_s), model.h_a.matrix()), model.v.matrix());
    const double rhs_norm = rhs_op.norm();

    const Eigen::Index n_params = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd a(2 * d * d, n_params);
    Eigen::VectorXd b(2 * d * d);
    for (Eigen::Index k = 0; k < n_params; ++k) {
        const Matrix c = commutator(tensor(basis[k], identity(d_a)), model.v.matrix());
        a.col(k).head(d * d) = Eigen::Map<const Eigen::VectorXcd>(c.data(), d * d).real();
        a.col(k).tail(d * d) = Eigen::Map<const Eigen::VectorXcd>(c.data(), d * d).imag();
    }
    b.head(d * d) = Eigen::Map<const Eigen::VectorXcd>(rhs_op.data(), d * d).real();
    b.tail(d * d) = Eigen::Map<const Eigen::VectorXcd>(rhs_op.data(), d * d).imag();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    const Eigen::VectorXd x = svd.solve(b);
    const double residual = (a * x - b).norm();
    const int null_dim = static_cast<int>(n_params - svd.rank());

    const double tol = std::max(1e-9 * rhs_norm, 1e-12);
    if (residual > tol) {
        return std::nullopt;
    }

    Matrix h0 = Matrix::Zero(d_s, d_s);
    for (Eigen::Index k = 0; k < n_params; ++k) {
        h0 += x(k) * basis[k];
    }
    h0 -= (h0.trace() / static_cast<double>(d_s)) * identity(d_s);
    return H0Solution{HermitianOperator(h0), residual, null_dim};
}

Classification classify(const CollisionModel& model) {
    Classification result;
    result.solution = find_h0(model);

    const FixedPointResult fp = fixed_point(model);
    result.fixed_point_degenerate = fp.degenerate;

    if (result.solution) {
        EquilibriumCertificate cert = check_equilibrium(model, result.solution->h0);
        if (!cert.valid()) {
            throw numeric_error(
                "classify: H0 solver accepted a candidate whose certificate is invalid "
                "(residual_u " +
                std::to_string(cert.residual_u) + ", fixed-point gap " +
                std::to_string(cert.fixed_point_gap) + ")");
        }
        result.sigma_rate = step(model, cert.pi).entropy_production;
        result.certificate = std::move(cert);
    } else {
        result.sigma_rate = step(model, fp.state).entropy_production;
    }
    return result;
}

}  // namespace qbatt
