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

#include "qcount/spectral.hpp"

#include <gtest/gtest.h>

#include "support/random_circuits.hpp"

using namespace qcount;

namespace {

VerifierCircuit x_circuit() {
    return parse_circuit("registers: ancilla=1 input=0 witness=1\nX 0\n");
}

VerifierCircuit h_circuit() { return VerifierCircuit({1, 0, 1}, {Gate::h(0)}); }

VerifierCircuit identity_circuit() { return VerifierCircuit({1, 0, 1}, {}); }

double max_dev(const ComplexMatrix &a, const ComplexMatrix &b) {
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace

TEST(BuildAcceptanceOperator, Examples) {
    EXPECT_LE(max_dev(build_acceptance_operator(x_circuit(), {}).matrix(),
                      ComplexMatrix::Identity(2, 2)),
              1e-9);
    EXPECT_LE(max_dev(build_acceptance_operator(identity_circuit(), {}).matrix(),
                      ComplexMatrix::Zero(2, 2)),
              1e-9);
    EXPECT_LE(max_dev(build_acceptance_operator(h_circuit(), {}).matrix(),
                      0.5 * ComplexMatrix::Identity(2, 2)),
              1e-9);
}

TEST(BuildAcceptanceOperator, InputLengthChecked) {
    const VerifierCircuit c({1, 2, 1}, {});
    EXPECT_THROW(build_acceptance_operator(c, {true}), PreconditionError);
}

TEST(AcceptanceOperator, RejectsNonHermitian) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    EXPECT_THROW(AcceptanceOperator(m, 1), InvariantError);
}

TEST(AcceptanceOperator, RejectsSpectrumExcursion) {
    const AcceptanceOperator op(1.5 * ComplexMatrix::Identity(2, 2), 1);
    EXPECT_THROW((void)op.eigenvalues(), InvariantError);
}

TEST(AcceptanceOperator, ClampsSmallExcursion) {
    ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    m(0, 0) = 1.0 + 5e-10;
    m(1, 1) = -5e-10;
    const AcceptanceOperator op(m, 1);
    EXPECT_EQ(op.eigenvalues()[0], 1.0);
    EXPECT_EQ(op.eigenvalues()[1], 0.0);
}

TEST(CountEigsGeq, Examples) {
    EXPECT_EQ(count_eigs_geq(build_acceptance_operator(x_circuit(), {}), 0.99), 2U);
    const auto half = build_acceptance_operator(h_circuit(), {});
    EXPECT_EQ(count_eigs_geq(half, 0.5), 2U);
    EXPECT_EQ(count_eigs_geq(half, 0.6), 0U);
}

TEST(CountEigsGeq, MatchesIndependentEigensolve) {
    StreamRng rng(31, 0);
    for (int trial = 0; trial < 30; ++trial) {
        testkit::CircuitShape shape{2, 1, 3, 20};
        const auto c = testkit::random_circuit(shape, 900 + static_cast<std::uint64_t>(trial));
        const auto x = testkit::random_bits(rng, 1);
        const auto op = build_acceptance_operator(c, x);
        const auto ref = testkit::reference_eigenvalues(testkit::reference_acceptance(c, x));
        for (const double a : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
            EXPECT_EQ(count_eigs_geq(op, a), testkit::scan_count_geq(ref, a)) << "a=" << a;
        }
    }
}

TEST(ExactCountInterval, Examples) {
    const auto one = exact_count_interval(build_acceptance_operator(x_circuit(), {}), 2.0 / 3, 1.0 / 3);
    EXPECT_EQ(one.low, 2U);
    EXPECT_EQ(one.high, 2U);
    const auto half = exact_count_interval(build_acceptance_operator(h_circuit(), {}), 2.0 / 3, 1.0 / 3);
    EXPECT_EQ(half.low, 0U);
    EXPECT_EQ(half.high, 2U);
    EXPECT_THROW(exact_count_interval(Spectrum({0.5}), 0.3, 0.3), PreconditionError);
    EXPECT_THROW(exact_count_interval(Spectrum({0.5}), 0.3, 0.4), PreconditionError);
}

TEST(ExactCountInterval, EngineeredGapMatchesScan) {
    // witness_controlled sample: x=1 gives eigenvalues {1/2, 1/2, 0, 0}.
    const auto c = parse_circuit(
        "registers: ancilla=2 input=1 witness=2\nTOF 3 4 0\nTOF 2 3 1\nH 1\nTOF 1 3 0\n");
    const auto op = build_acceptance_operator(c, {true});
    const auto ref = testkit::reference_eigenvalues(testkit::reference_acceptance(c, {true}));
    const auto r = exact_count_interval(op, 0.75, 0.25);
    EXPECT_EQ(r.low, 0U);
    EXPECT_EQ(r.high, 2U);
    EXPECT_EQ(r.low, testkit::scan_count_geq(ref, 0.75));
    EXPECT_EQ(r.high, testkit::scan_count_geq(ref, 0.25));
}

TEST(TraceNormalized, Examples) {
    EXPECT_NEAR(trace_normalized(build_acceptance_operator(x_circuit(), {})), 1.0, 1e-12);
    EXPECT_NEAR(trace_normalized(build_acceptance_operator(identity_circuit(), {})), 0.0, 1e-12);
    EXPECT_NEAR(trace_normalized(build_acceptance_operator(h_circuit(), {})), 0.5, 1e-12);
}

TEST(AcceptProbability, Examples) {
    for (const char *y : {"0", "1"}) {
        EXPECT_NEAR(accept_probability(x_circuit(), {}, y), 1.0, 1e-12);
        EXPECT_NEAR(accept_probability(h_circuit(), {}, y), 0.5, 1e-12);
    }
    EXPECT_THROW(accept_probability(h_circuit(), {}, std::string_view("01")), PreconditionError);
}

TEST(AcceptProbability, MatchesDiagonal) {
    StreamRng rng(41, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto shape = testkit::random_shape(rng, 2, 2, 3, 20);
        const auto c = testkit::random_circuit(shape, 1300 + static_cast<std::uint64_t>(trial));
        const auto x = testkit::random_bits(rng, c.num_input());
        const auto ref = testkit::reference_acceptance(c, x);
        for (std::uint64_t y = 0; y < (1ULL << c.num_witness()); ++y) {
            const auto i = static_cast<Eigen::Index>(y);
            EXPECT_NEAR(accept_probability(c, x, y), ref(i, i).real(), 1e-9);
        }
    }
}

TEST(ValidateDqc1, Examples) {
    EXPECT_TRUE(validate_dqc1(VerifierCircuit({1, 0, 4}, {})));
    EXPECT_FALSE(validate_dqc1(VerifierCircuit({10, 0, 4}, {})));
    EXPECT_TRUE(validate_dqc1(VerifierCircuit({5, 0, 8}, {})));
}

TEST(Spectrum, IntervalPartitionOfDimension) {
    const Spectrum sp({1.0, 0.7, 0.5, 0.5, 0.2, 0.0}, 1);
    EXPECT_EQ(sp.dimension(), 12U);
    EXPECT_EQ(sp.count_geq(0.5), 8U);
    const double a = 0.3;
    const double b = 0.7;
    EXPECT_EQ(sp.count_interval(a, b), 6U);
    // N_[a,b] + N_{>b} + N_{<a} = dimension
    const std::uint64_t above = sp.count_geq(b) - sp.count_interval(b, b);
    const std::uint64_t below = sp.dimension() - sp.count_geq(a);
    EXPECT_EQ(sp.count_interval(a, b) + above + below, sp.dimension());
    EXPECT_NEAR(sp.partial_trace(a, b), 2.0 * 1.7, 1e-12);
    EXPECT_NEAR(sp.trace(), 2.0 * 2.9, 1e-12);
}

TEST(Spectrum, TieRule) {
    const Spectrum sp({0.5 - 5e-13, 0.5 - 1e-11});
    EXPECT_EQ(sp.count_geq(0.5), 1U);
}

// Spectrum, diagonal-sum, boundary-count and monotonicity properties over
// random circuits.
TEST(SpectralProperty, RandomCircuits) {
    StreamRng rng(51, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto shape = testkit::random_shape(rng, 3, 2, 4, 30);
        const auto c = testkit::random_circuit(shape, 2000 + static_cast<std::uint64_t>(trial));
        const auto x = testkit::random_bits(rng, c.num_input());
        const auto op = build_acceptance_operator(c, x);
        const ComplexMatrix ref = testkit::reference_acceptance(c, x);
        ASSERT_LE(max_dev(op.matrix(), ref), 1e-9);
        for (const double l : testkit::reference_eigenvalues(ref)) {
            EXPECT_GE(l, -1e-9);
            EXPECT_LE(l, 1.0 + 1e-9);
        }
        double diag = 0.0;
        for (std::uint64_t y = 0; y < op.dimension(); ++y) {
            diag += accept_probability(c, x, y);
        }
        EXPECT_NEAR(diag, op.trace(), 1e-7);
        EXPECT_EQ(count_eigs_geq(op, 0.0), op.dimension());
        EXPECT_EQ(count_eigs_geq(op, 1.0 + 1e-9), 0U);
        std::uint64_t prev = op.dimension();
        for (int k = 0; k <= 20; ++k) {
            const std::uint64_t n = count_eigs_geq(op, k / 20.0);
            EXPECT_LE(n, prev);
            prev = n;
        }
    }
}

TEST(FactoredSpectrum, MatchesDirect) {
    StreamRng rng(61, 0);
    for (int trial = 0; trial < 20; ++trial) {
        testkit::CircuitShape shape{2, 1, 2, 15};
        const auto c = testkit::random_circuit(shape, 3000 + static_cast<std::uint64_t>(trial));
        const auto x = testkit::random_bits(rng, 1);
        for (unsigned l = 1; l <= 3; ++l) {
            const auto padded = c.pad_witness(l);
            const auto direct = build_acceptance_operator(padded, x).spectrum();
            const auto fact = factored_spectrum(padded, x);
            ASSERT_EQ(fact.dimension(), direct.dimension());
            EXPECT_NEAR(fact.trace(), direct.trace(), 1e-9);
            for (const double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
                EXPECT_EQ(fact.count_geq(a), direct.count_geq(a));
            }
        }
    }
}

TEST(OperatorJson, RoundTrip) {
    const auto c = testkit::random_circuit({1, 1, 2, 12}, 77);
    const auto op = build_acceptance_operator(c, {true});
    const auto j = operator_to_json(op);
    EXPECT_EQ(j.at("dim").get<int>(), 4);
    const auto back = operator_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_LE(max_dev(back, op.matrix()), 1e-15);
}

TEST(SampleCircuits, DqcMixedSpectrum) {
    const auto c = parse_circuit(
        "registers: ancilla=2 input=0 witness=3\nTOF 2 3 0\nH 1\nTOF 1 4 0\n");
    ASSERT_TRUE(validate_dqc1(c));
    const auto &ev = build_acceptance_operator(c, {}).eigenvalues();
    const std::vector<double> want{1.0, 0.5, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0};
    ASSERT_EQ(ev.size(), want.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
        EXPECT_NEAR(ev[i], want[i], 1e-9);
    }
}
