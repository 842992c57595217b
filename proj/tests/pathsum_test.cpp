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

#include "qcount/pathsum.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "qcount/spectral.hpp"
#include "support/random_circuits.hpp"

using namespace qcount;

namespace {

VerifierCircuit x_circuit() {
    return parse_circuit("registers: ancilla=1 input=0 witness=1\nX 0\n");
}

/// Random circuit small enough to enumerate literally: T <= 4, a + w <= 2.
VerifierCircuit small_circuit(StreamRng &rng, std::uint64_t seed, unsigned max_input) {
    testkit::CircuitShape shape;
    shape.ancilla = 1 + static_cast<unsigned>(rng.below(2));
    shape.witness = static_cast<unsigned>(rng.below(3 - shape.ancilla));
    shape.input = static_cast<unsigned>(rng.below(max_input + 1));
    shape.gates = 1 + static_cast<unsigned>(rng.below(4));
    return testkit::random_circuit(shape, seed);
}

} // namespace

TEST(RescaledEntry, Values) {
    const auto h = Gate::h(0);
    EXPECT_EQ(rescaled_entry(h, 0, 0).phase, 0U);
    EXPECT_EQ(rescaled_entry(h, 1, 1).phase, 2U);
    EXPECT_TRUE(rescaled_entry(h, 1, 0).nonzero);
    EXPECT_FALSE(rescaled_entry(h, 2, 0).nonzero);
    EXPECT_EQ(rescaled_entry(Gate::s(0), 1, 1).phase, 1U);
    EXPECT_FALSE(rescaled_entry(Gate::s(0), 0, 1).nonzero);
    const auto t = Gate::toffoli(0, 1, 2);
    EXPECT_TRUE(rescaled_entry(t, 0b111, 0b011).nonzero);
    EXPECT_FALSE(rescaled_entry(t, 0b011, 0b011).nonzero);
}

// Every rescaled entry matches sqrt(2)^[H] times the dense gate matrix.
TEST(RescaledEntry, MatchesDenseGate) {
    const std::vector<Gate> gates{Gate::h(1), Gate::s(2), Gate::toffoli(2, 0, 1)};
    const Complex phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (const auto &g : gates) {
        const ComplexMatrix m =
            testkit::reference_gate(g, 3) * (g.kind == GateKind::H ? std::sqrt(2.0) : 1.0);
        for (std::uint64_t to = 0; to < 8; ++to) {
            for (std::uint64_t from = 0; from < 8; ++from) {
                const auto e = rescaled_entry(g, to, from);
                const Complex v = e.nonzero ? phases[e.phase & 3U] : Complex{0, 0};
                EXPECT_LE(std::abs(v - m(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from))),
                          1e-12);
            }
        }
    }
}

TEST(PathSumExact, SingleHadamard) {
    const auto r = path_sum_exact(VerifierCircuit({1, 0, 0}, {Gate::h(0)}), {});
    EXPECT_EQ(r.g, 1U);
    EXPECT_EQ(r.f, 0U);
    EXPECT_EQ(r.h, 1U);
    EXPECT_EQ(r.n_star, 0U);
    EXPECT_DOUBLE_EQ(r.trace, 0.5);
}

TEST(PathSumExact, PhaseOnlyCircuitNeverAccepts) {
    const auto r = path_sum_exact(VerifierCircuit({1, 0, 0}, {Gate::s(0)}), {});
    EXPECT_EQ(r.g, 0U);
    EXPECT_EQ(r.f, 0U);
    EXPECT_DOUBLE_EQ(r.trace, 0.0);
}

TEST(PathSumExact, XCircuit) {
    const auto r = path_sum_exact(x_circuit(), {});
    EXPECT_EQ(r.h, 2U);
    EXPECT_NEAR(r.trace, 2.0, 1e-12);
}

TEST(PathSumExact, CapEnforced) {
    const VerifierCircuit c({2, 1, 2}, std::vector<Gate>(4, Gate::h(0)));
    EXPECT_GT(path_bit_count(c), kPathEnumerationCap);
    EXPECT_THROW(path_sum_exact(c, {false}), CapacityError);
}

// The tallies equal a literal enumeration of every path tuple, and the
// identity (g - f)/2^h = Tr holds against the dense acceptance operator.
TEST(PathSumProperty, MatchesBruteForceAndSpectralTrace) {
    StreamRng rng(91, 0);
    for (std::uint64_t trial = 0; trial < 60; ++trial) {
        const auto c = small_circuit(rng, 6000 + trial, 1);
        const auto x = testkit::random_bits(rng, c.num_input());
        const auto r = path_sum_exact(c, x, false);
        const auto bf = testkit::brute_force_paths(c, x);
        EXPECT_EQ(static_cast<std::int64_t>(r.g), bf.g) << to_qcv(c);
        EXPECT_EQ(static_cast<std::int64_t>(r.f), bf.f);
        EXPECT_EQ(bf.plus_i, bf.minus_i);
        EXPECT_EQ(static_cast<std::int64_t>(r.plus_i), bf.plus_i);
        EXPECT_EQ(r.n_star, bf.bits);
        const double tr = testkit::reference_acceptance(c, x).trace().real();
        EXPECT_NEAR(r.trace, tr, 1e-9);
        if (c.num_input() == 0) {
            EXPECT_EQ(static_cast<std::int64_t>(r.n_star), path_bit_formula(c));
        }
    }
}

TEST(PathSumProperty, IdentityOnLargerCircuits) {
    StreamRng rng(92, 0);
    for (std::uint64_t trial = 0; trial < 40; ++trial) {
        testkit::CircuitShape shape{1, static_cast<unsigned>(rng.below(2)), 1,
                                    1 + static_cast<unsigned>(rng.below(5))};
        const auto c = testkit::random_circuit(shape, 7000 + trial);
        if (path_bit_count(c) > kPathEnumerationCap) {
            continue;
        }
        const auto x = testkit::random_bits(rng, c.num_input());
        const auto r = path_sum_exact(c, x);
        EXPECT_EQ(r.plus_i, r.minus_i);
        EXPECT_NEAR(r.trace, build_acceptance_operator(c, x).trace(), 1e-9);
    }
}

TEST(PathSumEstimator, PointPathSpace) {
    const VerifierCircuit c({1, 0, 0}, {Gate::h(0)});
    for (const std::uint64_t s : {1ULL, 10ULL, 1000ULL}) {
        const auto e = path_sum_estimator(c, {}, s, 3);
        EXPECT_DOUBLE_EQ(e.value, 0.5);
        EXPECT_DOUBLE_EQ(e.normalization, 0.5);
    }
}

TEST(PathSumEstimator, CoverageOnXCircuit) {
    const auto c = x_circuit();
    const double eps = 0.5;
    const auto samples = static_cast<std::uint64_t>(std::ceil(8.0 / (eps * eps)));
    std::size_t covered = 0;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const auto e = path_sum_estimator(c, {}, samples, trial, 0.05, 1);
        covered += std::abs(e.value - 2.0) <= eps * e.normalization ? 1 : 0;
    }
    EXPECT_GE(covered, 950U);
}

// Empirical mean of 2^{N*} Re(product) matches g - f within 5 standard errors.
TEST(PathSumProperty, EstimatorUnbiased) {
    StreamRng rng(93, 0);
    for (std::uint64_t trial = 0; trial < 8; ++trial) {
        const auto c = small_circuit(rng, 8000 + trial, 0);
        const auto exact = path_sum_exact(c, {});
        const std::uint64_t samples = 100000;
        const auto e = path_sum_estimator(c, {}, samples, trial);
        const double scale = std::ldexp(1.0, static_cast<int>(exact.n_star));
        const double mean = e.value * std::ldexp(1.0, static_cast<int>(exact.h));
        // Re(product) is in {-1, 0, 1}; its variance is bounded by the
        // fraction of nonzero real paths.
        const double p_nonzero = static_cast<double>(exact.g + exact.f) / scale;
        const double p_mean = (static_cast<double>(exact.g) - static_cast<double>(exact.f)) / scale;
        const double sd = std::sqrt(std::max(p_nonzero - p_mean * p_mean, 1e-12));
        const double se = scale * sd / std::sqrt(static_cast<double>(samples));
        EXPECT_LE(std::abs(mean - (static_cast<double>(exact.g) - static_cast<double>(exact.f))),
                  5.0 * se + 1e-9)
            << to_qcv(c);
    }
}

TEST(PathSumEstimator, ExhaustiveLimitMatchesExact) {
    // With S far above 2^{N*} the estimate approaches the exact trace.
    const auto c = testkit::random_circuit({1, 0, 0, 2}, 17);
    const auto exact = path_sum_exact(c, {});
    const auto e = path_sum_estimator(c, {}, 200000, 5);
    EXPECT_NEAR(e.value, exact.trace, 5.0 * e.normalization / std::sqrt(200000.0));
}

TEST(PathSumEstimator, Determinism) {
    const auto c = testkit::random_circuit({1, 1, 1, 4}, 21);
    const auto a = path_sum_estimator(c, {true}, 20000, 9, 0.05, 1);
    const auto b = path_sum_estimator(c, {true}, 20000, 9, 0.05, 8);
    EXPECT_EQ(a.value, b.value);
}

TEST(PathSamplesFor, Hoeffding) {
    const auto s = path_samples_for(0.1, 0.05);
    EXPECT_GE(2.0 * std::exp(-static_cast<double>(s) * 0.01 / 2.0), 0.0);
    EXPECT_LE(2.0 * std::exp(-static_cast<double>(s) * 0.01 / 2.0), 0.05 + 1e-12);
}

TEST(PathSumJson, Fields) {
    const auto j = to_json(path_sum_exact(VerifierCircuit({1, 0, 0}, {Gate::h(0)}), {}));
    EXPECT_EQ(j.at("g").get<int>(), 1);
    EXPECT_EQ(j.at("f").get<int>(), 0);
    EXPECT_EQ(j.at("trace").get<double>(), 0.5);
    EXPECT_EQ(j.at("mode").get<std::string>(), "exact");
}
