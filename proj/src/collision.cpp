#include "qbatt/collision.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qbatt/errors.hpp"

namespace qbatt {

namespace {

constexpr double kFirstLawTol = 1e-11;
constexpr double kEntropyBalanceTol = 1e-10;
constexpr double kSigmaFloor = -1e-10;
constexpr double kUnitEigTol = 1e-9;       // |lambda - 1| window for fixed-space counting
constexpr double kFixedPointResidual = 1e-10;

void check_record_identities(const StepRecord& r, double beta) {
    if (std::abs(r.energy_change - (r.work + r.heat)) >
        kFirstLawTol * (1.0 + std::abs(r.energy_change))) {
        throw numeric_error("step: first law violated beyond tolerance (dE - W - Q = " +
                            std::to_string(r.energy_change - r.work - r.heat) + ")");
    }
    if (std::isfinite(r.entropy_production)) {
        // Tolerances scale with the entropy flows involved; at desk scale the
        // scale factor is ~1 and these are the plain absolute bounds.
        const double scale =
            1.0 + std::abs(r.entropy_change) + std::abs(beta * r.heat);
        if (std::abs(r.entropy_change - (r.entropy_production + beta * r.heat)) >
            kEntropyBalanceTol * scale) {
            throw numeric_error("step: entropy balance violated beyond tolerance");
        }
        if (r.entropy_production < kSigmaFloor * scale) {
            throw numeric_error("step: negative entropy production " +
                                std::to_string(r.entropy_production));
        }
    }
}

}  // namespace

CollisionModel::CollisionModel(HermitianOperator h_s_in, HermitianOperator h_a_in,
                               HermitianOperator v_in, double beta_in, double tau_in,
                               double gap_in)
    : h_s(std::move(h_s_in)),
      h_a(std::move(h_a_in)),
      v(std::move(v_in)),
      beta(beta_in),
      tau(tau_in),
      gap(gap_in) {
    if (v.dim() != h_s.dim() * h_a.dim()) {
        throw std::invalid_argument("CollisionModel: V must act on the composite space (dim " +
                                    std::to_string(h_s.dim() * h_a.dim()) + ", got " +
                                    std::to_string(v.dim()) + ")");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("CollisionModel: beta must be finite positive");
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("CollisionModel: tau must be finite positive");
    }
    if (gap < 0.0 || !std::isfinite(gap)) {
        throw std::invalid_argument("CollisionModel: gap must be finite and >= 0");
    }
}

CollisionMap::CollisionMap(CollisionModel model)
    : model_(std::move(model)), omega_(gibbs(model_.h_a, model_.beta)) {
    const Eigen::Index d_s = model_.system_dim();
    const Eigen::Index d_a = model_.ancilla_dim();
    h_joint_ = tensor(model_.h_s.matrix(), identity(d_a)) +
               tensor(identity(d_s), model_.h_a.matrix());
    u_ = unitary_from_hamiltonian(HermitianOperator(h_joint_ + model_.v.matrix()), model_.tau);
    gap_u_ = model_.gap > 0.0 ? unitary_from_hamiltonian(model_.h_s, model_.gap)
                              : identity(d_s);
}

DensityMatrix CollisionMap::apply(const DensityMatrix& rho) const {
    if (rho.dim() != model_.system_dim()) {
        throw std::invalid_argument("CollisionMap: state dimension mismatch");
    }
    const Matrix joint = u_ * tensor(rho.matrix(), omega_.matrix()) * u_.adjoint();
    Matrix out = partial_trace_ancilla(joint, model_.system_dim(), model_.ancilla_dim());
    if (model_.gap > 0.0) {
        out = gap_u_ * out * gap_u_.adjoint();
    }
    return DensityMatrix(out);
}

StepRecord CollisionMap::step(const DensityMatrix& rho, int n) const {
    if (rho.dim() != model_.system_dim()) {
        throw std::invalid_argument("CollisionMap: state dimension mismatch");
    }
    const Eigen::Index d_s = model_.system_dim();
    const Eigen::Index d_a = model_.ancilla_dim();

    const Matrix product = tensor(rho.matrix(), omega_.matrix());
    const DensityMatrix joint(u_ * product * u_.adjoint());
    const DensityMatrix rho_s(partial_trace_ancilla(joint.matrix(), d_s, d_a));
    const Matrix rho_a = partial_trace_system(joint.matrix(), d_s, d_a);

    StepRecord record{
        n,
        rho_s,
        (h_joint_ * (joint.matrix() - product)).trace().real(),
        -(model_.h_a.matrix() * (rho_a - omega_.matrix())).trace().real(),
        (model_.h_s.matrix() * (rho_s.matrix() - rho.matrix())).trace().real(),
        vn_entropy(rho_s) - vn_entropy(rho),
        rel_entropy(joint, DensityMatrix(tensor(rho_s.matrix(), omega_.matrix()))),
    };
    check_record_identities(record, model_.beta);
    if (model_.gap > 0.0) {
        record.rho_after = DensityMatrix(gap_u_ * rho_s.matrix() * gap_u_.adjoint());
    }
    return record;
}

StepRecord step(const CollisionModel& model, const DensityMatrix& rho) {
    return CollisionMap(model).step(rho);
}

Trajectory evolve(const CollisionModel& model, const DensityMatrix& rho0, int max_steps,
                  double conv_tol) {
    if (max_steps < 1) {
        throw std::invalid_argument("evolve: max_steps must be >= 1");
    }
    if (!(conv_tol > 0.0)) {
        throw std::invalid_argument("evolve: conv_tol must be positive");
    }
    const CollisionMap map(model);
    Trajectory traj;
    DensityMatrix rho = rho0;
    for (int n = 1; n <= max_steps; ++n) {
        StepRecord record = map.step(rho, n);
        const double dist = trace_distance(record.rho_after, rho);
        rho = record.rho_after;
        traj.total_work += record.work;
        traj.total_heat += record.heat;
        traj.total_entropy_production += record.entropy_production;
        traj.records.push_back(std::move(record));
        if (dist <= conv_tol) {
            traj.converged = true;
            break;
        }
    }
    return traj;
}

Matrix superoperator_matrix(const CollisionModel& model) {
    const Eigen::Index d_s = model.system_dim();
    const Eigen::Index d_a = model.ancilla_dim();
    const DensityMatrix omega = gibbs(model.h_a, model.beta);
    auto omega_eig = herm_eig(HermitianOperator(omega.matrix()));

    const Matrix h_total = tensor(model.h_s.matrix(), identity(d_a)) +
                           tensor(identity(d_s), model.h_a.matrix()) + model.v.matrix();
    const Matrix u = unitary_from_hamiltonian(HermitianOperator(h_total), model.tau);
    const Matrix gap_u =
        model.gap > 0.0 ? unitary_from_hamiltonian(model.h_s, model.gap) : identity(d_s);

    // Kraus form: K_{mu,a} = sqrt(w_a) <mu|U|a>, each a d_s x d_s block in the
    // ancilla eigenbasis of omega; the map is sum_k K rho K†, so its matrix on
    // column-stacked states is sum_k conj(K) x K.
    Matrix m = Matrix::Zero(d_s * d_s, d_s * d_s);
    for (Eigen::Index a = 0; a < d_a; ++a) {
        const double w = omega_eig.eigenvalues(a);
        if (w <= 0.0) {
            continue;
        }
        const Eigen::VectorXcd ket = omega_eig.eigenvectors.col(a);
        for (Eigen::Index mu = 0; mu < d_a; ++mu) {
            const Eigen::VectorXcd bra = omega_eig.eigenvectors.col(mu);
            Matrix k(d_s, d_s);
            for (Eigen::Index i = 0; i < d_s; ++i) {
                for (Eigen::Index j = 0; j < d_s; ++j) {
                    Complex acc = 0.0;
                    for (Eigen::Index p = 0; p < d_a; ++p) {
                        for (Eigen::Index q = 0; q < d_a; ++q) {
                            acc += std::conj(bra(p)) * u(i * d_a + p, j * d_a + q) * ket(q);
                        }
                    }
                    k(i, j) = std::sqrt(w) * acc;
                }
            }
            if (model.gap > 0.0) {
                k = gap_u * k;
            }
            m += tensor(k.conjugate(), k);
        }
    }
    return m;
}

namespace {

int unit_eigenvalue_multiplicity(const Eigen::VectorXcd& eigenvalues) {
    int count = 0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        if (std::abs(eigenvalues(i) - Complex(1.0, 0.0)) <= kUnitEigTol) {
            ++count;
        }
    }
    return count;
}

DensityMatrix iterate_to_fixed_point(const CollisionMap& map) {
    const Eigen::Index d = map.model().system_dim();
    DensityMatrix rho{Matrix::Identity(d, d) / static_cast<double>(d)};
    for (int n = 0; n < 1000000; ++n) {
        DensityMatrix next = map.apply(rho);
        const double dist = trace_distance(next, rho);
        rho = std::move(next);
        if (dist <= 1e-13) {
            return rho;
        }
    }
    return rho;
}

}  // namespace

FixedPointResult fixed_point(const CollisionModel& model, FixedPointMethod method) {
    const Eigen::Index d = model.system_dim();
    const CollisionMap map(model);
    const Matrix m = superoperator_matrix(model);

    Eigen::ComplexEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw numeric_error("fixed_point: superoperator eigendecomposition did not converge");
    }
    const int multiplicity = unit_eigenvalue_multiplicity(solver.eigenvalues());
    if (multiplicity < 1) {
        throw numeric_error("fixed_point: no unit eigenvalue found (spectral radius " +
                            std::to_string(solver.eigenvalues().cwiseAbs().maxCoeff()) + ")");
    }

    FixedPointResult result{DensityMatrix{Matrix::Identity(d, d) / static_cast<double>(d)},
                            multiplicity > 1, multiplicity, 0.0};

    bool built = false;
    if (method == FixedPointMethod::Spectral) {
        // Pick the unit eigenvector with the largest |trace| after reshaping;
        // Hermitize, normalize, and clamp the rounding noise away.
        Eigen::Index best = -1;
        double best_trace = 0.0;
        for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
            if (std::abs(solver.eigenvalues()(i) - Complex(1.0, 0.0)) > kUnitEigTol) {
                continue;
            }
            Matrix candidate = Eigen::Map<const Matrix>(solver.eigenvectors().col(i).data(), d, d);
            const double tr = std::abs(candidate.trace());
            if (tr > best_trace) {
                best_trace = tr;
                best = i;
            }
        }
        if (best >= 0 && best_trace > 1e-8) {
            Matrix candidate = Eigen::Map<const Matrix>(solver.eigenvectors().col(best).data(), d, d);
            candidate /= candidate.trace();
            candidate = 0.5 * (candidate + candidate.adjoint());
            Eigen::SelfAdjointEigenSolver<Matrix> psd(candidate);
            RealVector clamped = psd.eigenvalues().cwiseMax(0.0);
            clamped /= clamped.sum();
            result.state = DensityMatrix(psd.eigenvectors() * clamped.asDiagonal() *
                                         psd.eigenvectors().adjoint());
            built = true;
        }
    }
    if (!built) {
        result.state = iterate_to_fixed_point(map);
    }

    result.residual = trace_distance(map.apply(result.state), result.state);
    if (result.residual > kFixedPointResidual) {
        // The spectral candidate can fall outside the state space when the
        // fixed space is degenerate; the iteration limit always lands on one.
        result.state = iterate_to_fixed_point(map);
        result.residual = trace_distance(map.apply(result.state), result.state);
        if (result.residual > kFixedPointResidual) {
            throw numeric_error("fixed_point: residual " + std::to_string(result.residual) +
                                " above tolerance");
        }
    }
    return result;
}

LocalThermo local_thermo(const HermitianOperator& h_s, const HermitianOperator& h0,
                         const DensityMatrix& rho_before, const DensityMatrix& rho_after,
                         const DensityMatrix& pi) {
    if (h0.dim() != h_s.dim() || rho_before.dim() != h_s.dim() ||
        rho_after.dim() != h_s.dim() || pi.dim() != h_s.dim()) {
        throw std::invalid_argument("local_thermo: dimension mismatch");
    }
    const double comm = commutator(h0.matrix(), h_s.matrix()).norm();
    if (comm > 1e-10 * (1.0 + h0.matrix().norm() * h_s.matrix().norm())) {
        throw physics_error("local_thermo: [H0, H_S] != 0 (norm " + std::to_string(comm) + ")");
    }
    const Matrix delta = rho_after.matrix() - rho_before.matrix();
    return LocalThermo{
        (h0.matrix() * delta).trace().real(),
        ((h_s.matrix() - h0.matrix()) * delta).trace().real(),
        rel_entropy(rho_before, pi) - rel_entropy(rho_after, pi),
    };
}

}  // namespace qbatt
