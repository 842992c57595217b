// Copyright 2026 The qcount Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Dense statevector simulation of verifier circuits.
 *
 * Basis convention: qubit k is bit k of the basis index (little endian).
 */
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "circuit.hpp"
#include "errors.hpp"

namespace qcount {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kUnitaryTol = 1e-9;
inline constexpr unsigned kStatevectorCap = 20;
inline constexpr unsigned kDefaultDenseCap = 14;

/// Dense unitary / eigendecomposition cap; QCOUNT_DENSE_CAP overrides.
inline unsigned dense_cap() {
    if (const char *env = std::getenv("QCOUNT_DENSE_CAP")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0 && v <= 30) {
            return static_cast<unsigned>(v);
        }
    }
    return kDefaultDenseCap;
}

inline void require_statevector_size(unsigned qubits) {
    if (qubits > kStatevectorCap) {
        throw CapacityError(std::to_string(qubits) + " qubits exceeds the statevector cap of " +
                            std::to_string(kStatevectorCap));
    }
}

inline void require_dense_size(unsigned qubits) {
    if (qubits > dense_cap()) {
        throw CapacityError(std::to_string(qubits) + " qubits exceeds the dense cap of " +
                            std::to_string(dense_cap()) + " (set QCOUNT_DENSE_CAP)");
    }
}

class StateVector {
  public:
    /// |index> on `qubits` qubits.
    StateVector(unsigned qubits, std::uint64_t index)
        : qubits_(qubits), amps_(std::size_t{1} << qubits, Complex{0.0, 0.0}) {
        detail::require(index < amps_.size(), "basis index out of range");
        amps_[index] = 1.0;
    }

    StateVector(unsigned qubits, std::vector<Complex> amps)
        : qubits_(qubits), amps_(std::move(amps)) {
        detail::require(amps_.size() == (std::size_t{1} << qubits),
                        "amplitude vector length must be 2^qubits");
    }

    [[nodiscard]] unsigned num_qubits() const noexcept { return qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amps_; }
    [[nodiscard]] std::span<Complex> amplitudes() noexcept { return amps_; }
    [[nodiscard]] const Complex &operator[](std::size_t i) const { return amps_[i]; }

    [[nodiscard]] double norm_squared() const noexcept {
        double s = 0.0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    /// Probability that `qubit` measures 1.
    [[nodiscard]] double probability_one(unsigned qubit) const noexcept {
        const std::size_t mask = std::size_t{1} << qubit;
        double p = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & mask) != 0U) {
                p += std::norm(amps_[i]);
            }
        }
        return p;
    }

    void apply(const Gate &g) {
        switch (g.kind) {
        case GateKind::H:
            apply_h(g.qubits[0]);
            break;
        case GateKind::S:
            apply_s(g.qubits[0]);
            break;
        case GateKind::Toffoli:
            apply_toffoli(g.qubits[0], g.qubits[1], g.qubits[2]);
            break;
        }
    }

  private:
    void apply_h(unsigned q) {
        constexpr double r = std::numbers::sqrt2 / 2.0;
        const std::size_t mask = std::size_t{1} << q;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & mask) == 0U) {
                const Complex a0 = amps_[i];
                const Complex a1 = amps_[i | mask];
                amps_[i] = r * (a0 + a1);
                amps_[i | mask] = r * (a0 - a1);
            }
        }
    }

    void apply_s(unsigned q) {
        const std::size_t mask = std::size_t{1} << q;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & mask) != 0U) {
                amps_[i] *= Complex{0.0, 1.0};
            }
        }
    }

    void apply_toffoli(unsigned c1, unsigned c2, unsigned t) {
        const std::size_t cmask = (std::size_t{1} << c1) | (std::size_t{1} << c2);
        const std::size_t tmask = std::size_t{1} << t;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cmask) == cmask && (i & tmask) == 0U) {
                std::swap(amps_[i], amps_[i | tmask]);
            }
        }
    }

    unsigned qubits_;
    std::vector<Complex> amps_;
};

/// Return g|state>.
inline StateVector apply_gate(StateVector state, const Gate &g) {
    for (unsigned i = 0; i < g.arity(); ++i) {
        detail::require(g.qubits[i] < state.num_qubits(), "gate qubit out of range");
    }
    state.apply(g);
    return state;
}

/// Basis index of |0^a>|x>|y> where y's bit j is witness qubit j.
inline std::uint64_t basis_index(const RegisterLayout &layout, const std::vector<bool> &x,
                                 std::uint64_t witness) {
    std::uint64_t idx = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j]) {
            idx |= std::uint64_t{1} << (layout.input_offset() + j);
        }
    }
    return idx | (witness << layout.witness_offset());
}

/// V|basis>.
inline StateVector simulate(const VerifierCircuit &circuit, std::uint64_t basis) {
    require_statevector_size(circuit.num_qubits());
    StateVector state(circuit.num_qubits(), basis);
    for (const auto &g : circuit.gates()) {
        state.apply(g);
    }
    return state;
}

/// Product of gate unitaries in circuit order.
inline ComplexMatrix circuit_unitary(const VerifierCircuit &circuit) {
    const unsigned n = circuit.num_qubits();
    require_dense_size(n);
    const std::size_t dim = std::size_t{1} << n;
    ComplexMatrix u(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t col = 0; col < dim; ++col) {
        const auto psi = simulate(circuit, col);
        for (std::size_t row = 0; row < dim; ++row) {
            u(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = psi[row];
        }
    }
    return u;
}

} // namespace qcount
