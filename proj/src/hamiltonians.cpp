#include "qbatt/hamiltonians.hpp"

#include <cmath>
#include <string>

#include "qbatt/errors.hpp"

namespace qbatt {

namespace {

Matrix pauli_2x2(PauliAxis axis) {
    Matrix m = Matrix::Zero(2, 2);
    switch (axis) {
        case PauliAxis::X:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            break;
        case PauliAxis::Y:
            m(0, 1) = Complex(0.0, -1.0);
            m(1, 0) = Complex(0.0, 1.0);
            break;
        case PauliAxis::Z:
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            break;
        case PauliAxis::Plus:
            m(0, 1) = 1.0;  // |0><1|, raising in the sigma_z basis
            break;
        case PauliAxis::Minus:
            m(1, 0) = 1.0;
            break;
    }
    return m;
}

}  // namespace

Matrix pauli(PauliLabel label, int register_size) {
    if (register_size < 1) {
        throw std::invalid_argument("pauli: register size must be >= 1");
    }
    if (label.site < 0 || label.site >= register_size) {
        throw std::invalid_argument("pauli: site " + std::to_string(label.site) +
                                    " out of range for register of " +
                                    std::to_string(register_size) + " qubits");
    }
    Matrix out = Matrix::Identity(1, 1);
    for (int s = 0; s < register_size; ++s) {
        out = tensor(out, s == label.site ? pauli_2x2(label.axis) : identity(2));
    }
    return out;
}

ModelOperators build_single_qubit(double h, double a) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("build_single_qubit: h must be positive");
    }
    Matrix sz = pauli({PauliAxis::Z}, 1);
    Matrix sp = pauli({PauliAxis::Plus}, 1);
    Matrix sm = pauli({PauliAxis::Minus}, 1);
    Matrix h_s = 0.5 * h * sz;
    Matrix v = a * (tensor(sp, sp) + tensor(sm, sm));
    return ModelOperators{HermitianOperator(h_s), HermitianOperator(h_s), HermitianOperator(v),
                          false};
}

ModelOperators build_two_qubit(double h, double j) {
    if (!(j > 0.0) || !(h > 0.0) || !(2.0 * j > h)) {
        throw std::invalid_argument("build_two_qubit: parameters must satisfy 2J > h > 0");
    }
    Matrix h_s = 0.5 * h * (pauli({PauliAxis::Z, 0}, 2) + pauli({PauliAxis::Z, 1}, 2)) +
                 j * (pauli({PauliAxis::X, 0}, 2) * pauli({PauliAxis::X, 1}, 2) +
                      pauli({PauliAxis::Y, 0}, 2) * pauli({PauliAxis::Y, 1}, 2));
    Matrix h_a = 0.5 * h * pauli({PauliAxis::Z}, 1);
    // Ancilla is the last tensor factor; V acts on battery qubit 1 (site 0).
    Matrix v = tensor(pauli({PauliAxis::X, 0}, 2), pauli({PauliAxis::X}, 1)) +
               tensor(pauli({PauliAxis::Y, 0}, 2), pauli({PauliAxis::Y}, 1));
    return ModelOperators{HermitianOperator(h_s), HermitianOperator(h_a), HermitianOperator(v),
                          false};
}

ModelOperators build_inversion_protocol(const HermitianOperator& h,
                                        const std::vector<LadderOperator>& ladder_ops) {
    const Eigen::Index d = h.dim();
    for (std::size_t k = 0; k < ladder_ops.size(); ++k) {
        const LadderOperator& lop = ladder_ops[k];
        if (lop.op.rows() != d || lop.op.cols() != d) {
            throw std::invalid_argument("build_inversion_protocol: ladder operator " +
                                        std::to_string(k) + " has wrong dimension");
        }
        const Matrix resid = commutator(h.matrix(), lop.op) - lop.bohr_frequency * lop.op;
        const double tol = 1e-10 * (1.0 + h.matrix().norm() * lop.op.norm());
        if (resid.norm() > tol) {
            throw std::invalid_argument(
                "build_inversion_protocol: ladder operator " + std::to_string(k) +
                " violates [H, S] = lambda S; residual norm " + std::to_string(resid.norm()));
        }
    }
    Matrix v = Matrix::Zero(d * d, d * d);
    for (const LadderOperator& lop : ladder_ops) {
        v += lop.strength * (tensor(lop.op, lop.op) +
                             tensor(lop.op.adjoint(), lop.op.adjoint()));
    }
    return ModelOperators{h, h, HermitianOperator(v), has_degenerate_spectrum(h)};
}

ModelOperators ModelSpec::build() const {
    switch (variant) {
        case ModelVariant::SingleQubit:
            return build_single_qubit(h, a);
        case ModelVariant::TwoQubit:
            return build_two_qubit(h, j);
        case ModelVariant::Custom:
            break;
    }
    if (!custom_h_s || !custom_h_a || !custom_v) {
        throw std::invalid_argument("ModelSpec: custom variant requires h_s, h_a and v matrices");
    }
    HermitianOperator h_s(*custom_h_s);
    HermitianOperator h_a(*custom_h_a);
    HermitianOperator v(*custom_v);
    if (v.dim() != h_s.dim() * h_a.dim()) {
        throw std::invalid_argument("ModelSpec: v must act on the composite space (dim " +
                                    std::to_string(h_s.dim() * h_a.dim()) + ", got " +
                                    std::to_string(v.dim()) + ")");
    }
    return ModelOperators{h_s, h_a, v, has_degenerate_spectrum(h_s)};
}

bool has_degenerate_spectrum(const HermitianOperator& h) {
    auto eig = herm_eig(h);
    const double scale = 1.0 + eig.eigenvalues.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i + 1 < eig.eigenvalues.size(); ++i) {
        if (eig.eigenvalues(i + 1) - eig.eigenvalues(i) <= 1e-10 * scale) {
            return true;
        }
    }
    return false;
}

}  // namespace qbatt
