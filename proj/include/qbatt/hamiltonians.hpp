#pragma once

#include <optional>
#include <vector>

#include "qbatt/operators.hpp"

namespace qbatt {

enum class PauliAxis { X, Y, Z, Plus, Minus };

struct PauliLabel {
    PauliAxis axis;
    int site = 0;
};

/// Single-site Pauli operator embedded in a register of qubits, identity on
/// all other sites. Site 0 is the leftmost tensor factor.
Matrix pauli(PauliLabel label, int register_size);

/// The triple (H_S, H_A, V) defining one collision; V lives on the composite
/// space with system-first ordering.
struct ModelOperators {
    HermitianOperator h_s;
    HermitianOperator h_a;
    HermitianOperator v;
    bool degenerate_h_s = false;
};

/// Battery and ancilla are identical qubits, coupled by the pair-creation
/// interaction a (s+ s+ + s- s-). Requires h > 0.
ModelOperators build_single_qubit(double h, double a);

/// Two-qubit XX-chain battery with a single-qubit ancilla coupled to battery
/// qubit 1 by a flip-flop interaction. Requires 2J > h > 0.
ModelOperators build_two_qubit(double h, double j);

/// Ladder operator S with [H, S] = lambda * S.
struct LadderOperator {
    Matrix op;
    double bohr_frequency = 0.0;
    double strength = 1.0;
};

/// Population-inversion protocol: the ancilla is a copy of the system and
/// V = sum_a strength_a (S_a x S_a + S_a† x S_a†), which commutes with
/// -H_S + H_A. The equilibrium operator is H0 = -H_S.
ModelOperators build_inversion_protocol(const HermitianOperator& h,
                                        const std::vector<LadderOperator>& ladder_ops);

enum class ModelVariant { SingleQubit, TwoQubit, Custom };

struct ModelSpec {
    ModelVariant variant = ModelVariant::SingleQubit;
    double h = 0.0;
    double j = 0.0;
    double a = 0.0;
    std::optional<Matrix> custom_h_s;
    std::optional<Matrix> custom_h_a;
    std::optional<Matrix> custom_v;

    ModelOperators build() const;
};

bool has_degenerate_spectrum(const HermitianOperator& h);

}  // namespace qbatt
