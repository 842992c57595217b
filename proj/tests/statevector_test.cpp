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

#include "qcount/statevector.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "support/random_circuits.hpp"

using namespace qcount;

namespace {

constexpr double kTol = 1e-9;

}

TEST(ApplyGate, HadamardOnZero) {
    const auto s = apply_gate(StateVector(1, 0), Gate::h(0));
    EXPECT_NEAR(s[0].real(), 1.0 / std::sqrt(2.0), kTol);
    EXPECT_NEAR(s[1].real(), 1.0 / std::sqrt(2.0), kTol);
}

TEST(ApplyGate, PhaseOnOne) {
    const auto s = apply_gate(StateVector(1, 1), Gate::s(0));
    EXPECT_NEAR(std::abs(s[0]), 0.0, kTol);
    EXPECT_NEAR(std::abs(s[1] - Complex(0.0, 1.0)), 0.0, kTol);
}

TEST(ApplyGate, ToffoliFlipsTarget) {
    // |110> with qubits 0,1 set and target qubit 2 clear.
    const auto s = apply_gate(StateVector(3, 0b011), Gate::toffoli(0, 1, 2));
    EXPECT_NEAR(std::abs(s[0b111] - Complex(1.0, 0.0)), 0.0, kTol);
    EXPECT_NEAR(s.norm_squared(), 1.0, kTol);
}

TEST(ApplyGate, OutOfRangeRejected) {
    EXPECT_THROW(apply_gate(StateVector(1, 0), Gate::h(1)), PreconditionError);
}

TEST(Simulate, IdentityCircuitKeepsBasis) {
    const VerifierCircuit c({1, 1, 1}, {});
    const auto s = simulate(c, 0);
    EXPECT_NEAR(std::abs(s[0] - Complex(1.0, 0.0)), 0.0, kTol);
}

TEST(Simulate, SingleHadamardSuperposes) {
    const VerifierCircuit c({1, 0, 0}, {Gate::h(0)});
    const auto s = simulate(c, 0);
    EXPECT_NEAR(std::norm(s[0]), 0.5, kTol);
    EXPECT_NEAR(std::norm(s[1]), 0.5, kTol);
}

TEST(Simulate, CapEnforced) {
    const VerifierCircuit c({1, 0, kStatevectorCap}, {});
    EXPECT_THROW(simulate(c, 0), CapacityError);
}

TEST(CircuitUnitary, Examples) {
    const auto id = circuit_unitary(VerifierCircuit({1, 0, 1}, {}));
    EXPECT_LE((id - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), kTol);

    const auto h = circuit_unitary(VerifierCircuit({1, 0, 0}, {Gate::h(0)}));
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(h(0, 0).real(), r, kTol);
    EXPECT_NEAR(h(0, 1).real(), r, kTol);
    EXPECT_NEAR(h(1, 0).real(), r, kTol);
    EXPECT_NEAR(h(1, 1).real(), -r, kTol);

    const auto z = circuit_unitary(VerifierCircuit({1, 0, 0}, {Gate::s(0), Gate::s(0)}));
    EXPECT_NEAR(std::abs(z(0, 0) - 1.0), 0.0, kTol);
    EXPECT_NEAR(std::abs(z(1, 1) + 1.0), 0.0, kTol);
    EXPECT_NEAR(std::abs(z(0, 1)), 0.0, kTol);
}

TEST(CircuitUnitary, DenseCapEnforced) {
    EXPECT_THROW(circuit_unitary(VerifierCircuit({1, 0, dense_cap()}, {})), CapacityError);
}

// Columns of the simulator agree with an independently assembled unitary.
TEST(SimulateProperty, MatchesReferenceUnitary) {
    StreamRng rng(21, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const auto shape = testkit::random_shape(rng, 3, 2, 3, 25);
        const auto c = testkit::random_circuit(shape, 500 + static_cast<std::uint64_t>(trial));
        ASSERT_LE(c.num_qubits(), 8U);
        const auto ref = testkit::reference_unitary(c);
        const auto u = circuit_unitary(c);
        EXPECT_LE((u - ref).cwiseAbs().maxCoeff(), kTol);
        const auto dim = static_cast<std::uint64_t>(ref.rows());
        for (std::uint64_t b = 0; b < dim; ++b) {
            const auto s = simulate(c, b);
            EXPECT_NEAR(s.norm_squared(), 1.0, kTol);
            for (std::uint64_t r = 0; r < dim; ++r) {
                ASSERT_LE(std::abs(s[r] - ref(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(b))),
                          kTol);
            }
        }
        const auto dev = (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()))
                             .cwiseAbs()
                             .maxCoeff();
        EXPECT_LE(dev, kTol);
    }
}

TEST(BasisIndex, LayoutOrder) {
    const RegisterLayout layout{2, 2, 3};
    // input bit 1 -> qubit 3, witness integer 0b101 -> qubits 4 and 6
    EXPECT_EQ(basis_index(layout, {false, true}, 0b101), (1ULL << 3) | (1ULL << 4) | (1ULL << 6));
}
