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
 * Feynman path sums for Tr[A_x] over the {H, S, Toffoli} gate set.
 *
 * With rescaled gates q = sqrt(2) H, S, Toffoli every matrix entry lies in
 * {0, +-1, +-i}. Expanding
 *
 *   Tr[A_x] = sum_wit <s| g_1^dag .. g_T^dag |1,y><1,y| g_T .. g_1 |s>,
 *   s = |0^a, x, wit>,
 *
 * over computational basis intermediates gives paths
 * (wit, y, b_1..b_{T-1}, f_1..f_{T-1}) whose products are in {0, +-1, +-i}.
 * With g (f) the number of +1 (-1) paths, (g - f) / 2^h = Tr[A_x].
 *
 * Free path bits: w + (a+n+w-1) + 2(T-1)(a+n+w); with no input register this
 * is 2T(w+a) - (a+1).
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "circuit.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace qcount {

inline constexpr unsigned kPathEnumerationCap = 24;

/// Phase i^k as k in {0,1,2,3}; a zero entry has no phase.
struct PathEntry {
    bool nonzero{false};
    unsigned phase{0};
};

/// <to| q |from> for a rescaled core gate.
inline PathEntry rescaled_entry(const Gate &g, std::uint64_t to, std::uint64_t from) noexcept {
    switch (g.kind) {
    case GateKind::H: {
        const std::uint64_t m = std::uint64_t{1} << g.qubits[0];
        if ((to & ~m) != (from & ~m)) {
            return {};
        }
        return {true, ((to & m) != 0U && (from & m) != 0U) ? 2U : 0U};
    }
    case GateKind::S: {
        if (to != from) {
            return {};
        }
        return {true, (from >> g.qubits[0]) & 1U ? 1U : 0U};
    }
    case GateKind::Toffoli: {
        const std::uint64_t cm = (std::uint64_t{1} << g.qubits[0]) | (std::uint64_t{1} << g.qubits[1]);
        const std::uint64_t image = (from & cm) == cm ? from ^ (std::uint64_t{1} << g.qubits[2]) : from;
        return {to == image, 0U};
    }
    }
    return {};
}

/// Number of free bits describing one path, for T >= 1.
inline std::uint64_t path_bit_count(const VerifierCircuit &c) {
    const std::uint64_t q = c.num_qubits();
    const std::uint64_t t = c.gate_count();
    const std::uint64_t inter = t >= 1 ? 2 * (t - 1) * q : 0;
    return c.num_witness() + (q - 1) + inter;
}

/// 2T(w+a) - (a+1), the closed form for circuits without an input register.
inline std::int64_t path_bit_formula(const VerifierCircuit &c) {
    const auto t = static_cast<std::int64_t>(c.gate_count());
    const auto a = static_cast<std::int64_t>(c.num_ancilla());
    const auto w = static_cast<std::int64_t>(c.num_witness());
    return 2 * t * (w + a) - (a + 1);
}

struct PathSumResult {
    std::uint64_t g{0};
    std::uint64_t f{0};
    std::uint64_t plus_i{0};
    std::uint64_t minus_i{0};
    std::uint64_t h{0};
    std::uint64_t n_star{0};
    double trace{0.0};
};

namespace detail {

struct PhaseCounts {
    std::uint64_t by_phase[4]{0, 0, 0, 0};
};

/// Forward branches of s through all T gates that end with the output qubit
/// set, bucketed by end state and phase.
inline void enumerate_branches(const std::vector<Gate> &gates, std::size_t depth,
                               std::uint64_t state, unsigned phase,
                               std::unordered_map<std::uint64_t, PhaseCounts> &leaves) {
    if (depth == gates.size()) {
        if ((state & 1U) != 0U) {
            ++leaves[state].by_phase[phase & 3U];
        }
        return;
    }
    const Gate &g = gates[depth];
    switch (g.kind) {
    case GateKind::H: {
        const std::uint64_t m = std::uint64_t{1} << g.qubits[0];
        const unsigned sign = (state & m) != 0U ? 2U : 0U;
        enumerate_branches(gates, depth + 1, state & ~m, phase, leaves);
        enumerate_branches(gates, depth + 1, state | m, phase + sign, leaves);
        break;
    }
    case GateKind::S:
        enumerate_branches(gates, depth + 1, state,
                           phase + (((state >> g.qubits[0]) & 1U) != 0U ? 1U : 0U), leaves);
        break;
    case GateKind::Toffoli: {
        const std::uint64_t cm =
            (std::uint64_t{1} << g.qubits[0]) | (std::uint64_t{1} << g.qubits[1]);
        const std::uint64_t next =
            (state & cm) == cm ? state ^ (std::uint64_t{1} << g.qubits[2]) : state;
        enumerate_branches(gates, depth + 1, next, phase, leaves);
        break;
    }
    }
}

} // namespace detail

/**
 * Exact path sum. Each path pairs a forward branch with a backward branch
 * that meet at the same |1,y>; zero-product paths are skipped without being
 * visited. When `cross_check` is set and the circuit fits the dense cap, the
 * result is compared with the spectral oracle.
 */
inline PathSumResult path_sum_exact(const VerifierCircuit &circuit, const std::vector<bool> &x,
                                    bool cross_check = true) {
    detail::require(x.size() == circuit.num_input(), "input string length mismatch");
    PathSumResult out;
    out.h = circuit.hadamard_count();
    out.n_star = path_bit_count(circuit);
    if (out.n_star > kPathEnumerationCap) {
        throw CapacityError("path space of " + std::to_string(out.n_star) +
                            " bits exceeds the enumeration cap of " +
                            std::to_string(kPathEnumerationCap));
    }
    const auto &layout = circuit.layout();
    const std::uint64_t witnesses = std::uint64_t{1} << layout.witness;
    for (std::uint64_t wit = 0; wit < witnesses; ++wit) {
        std::unordered_map<std::uint64_t, detail::PhaseCounts> leaves;
        detail::enumerate_branches(circuit.gates(), 0, basis_index(layout, x, wit), 0, leaves);
        for (const auto &[end, counts] : leaves) {
            const auto &c = counts.by_phase;
            for (unsigned k = 0; k < 4; ++k) {
                // forward phase k times conj(backward phase j) = i^(k - j)
                out.g += c[k] * c[k];
                out.f += c[k] * c[(k + 2) % 4];
                out.plus_i += c[k] * c[(k + 3) % 4];
                out.minus_i += c[k] * c[(k + 1) % 4];
            }
        }
    }
    detail::ensure(out.plus_i == out.minus_i, "imaginary parts of the path sum do not cancel");
    out.trace = (static_cast<double>(out.g) - static_cast<double>(out.f)) /
                std::ldexp(1.0, static_cast<int>(out.h));
    if (cross_check && circuit.num_qubits() <= dense_cap()) {
        const double tr = build_acceptance_operator(circuit, x).trace();
        detail::ensure(std::abs(tr - out.trace) <= 1e-9,
                       "path sum trace " + std::to_string(out.trace) +
                           " disagrees with spectral trace " + std::to_string(tr));
    }
    return out;
}

/// A sampled path: wit, y, backward b_1..b_{T-1}, forward f_1..f_{T-1}.
struct Path {
    std::uint64_t witness{0};
    std::uint64_t y{0};
    std::vector<std::uint64_t> backward;
    std::vector<std::uint64_t> forward;
};

/// Phase of one chain s -> z_1 -> .. -> z_{T-1} -> |1,y>, or nullopt if zero.
inline std::optional<unsigned> chain_phase(const std::vector<Gate> &gates, std::uint64_t start,
                                           const std::vector<std::uint64_t> &mid,
                                           std::uint64_t end) {
    unsigned phase = 0;
    std::uint64_t from = start;
    for (std::size_t k = 0; k < gates.size(); ++k) {
        const std::uint64_t to = k + 1 < gates.size() ? mid[k] : end;
        const auto e = rescaled_entry(gates[k], to, from);
        if (!e.nonzero) {
            return std::nullopt;
        }
        phase += e.phase;
        from = to;
    }
    return phase & 3U;
}

/// Product of rescaled entries along a path, as i^k, or nullopt if zero.
inline std::optional<unsigned> path_phase(const VerifierCircuit &circuit,
                                          const std::vector<bool> &x, const Path &p) {
    if (circuit.gate_count() == 0) {
        return std::nullopt; // <s|1,y> = 0: the output qubit starts at 0
    }
    const std::uint64_t start = basis_index(circuit.layout(), x, p.witness);
    const std::uint64_t end = (p.y << 1U) | 1U;
    const auto fwd = chain_phase(circuit.gates(), start, p.forward, end);
    if (!fwd) {
        return std::nullopt;
    }
    const auto bwd = chain_phase(circuit.gates(), start, p.backward, end);
    if (!bwd) {
        return std::nullopt;
    }
    return (*fwd + 4U - *bwd) & 3U;
}

/// Real part of i^k for an optional phase.
inline int real_part(std::optional<unsigned> phase) noexcept {
    if (!phase) {
        return 0;
    }
    return *phase == 0 ? 1 : (*phase == 2 ? -1 : 0);
}

/**
 * Monte Carlo estimate of Tr[A_x]: average the real part of S uniform path
 * products, scale by 2^{N*} and divide by 2^h. The normalization is
 * u = 2^{N* - h}; by Hoeffding, |estimate - Tr| < eps u except with
 * probability 2 exp(-S eps^2 / 2).
 */
inline AdditiveEstimate path_sum_estimator(const VerifierCircuit &circuit,
                                           const std::vector<bool> &x, std::uint64_t samples,
                                           std::uint64_t seed, double delta = 0.05,
                                           unsigned workers = 0) {
    detail::require(samples >= 1, "sample count S must be >= 1");
    detail::require(x.size() == circuit.num_input(), "input string length mismatch");
    detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
    detail::require(circuit.num_qubits() <= 63, "path sampling supports at most 63 qubits");
    const std::uint64_t n_star = path_bit_count(circuit);
    const std::uint64_t h = circuit.hadamard_count();
    detail::require(n_star < 1000, "path space too large to normalize in double precision");
    const unsigned q = circuit.num_qubits();
    const unsigned w = circuit.num_witness();
    const std::size_t mids = circuit.gate_count() >= 1 ? circuit.gate_count() - 1 : 0;

    std::vector<std::int8_t> contrib(samples, 0);
    parallel_chunks(samples, workers, [&](std::size_t b, std::size_t e) {
        Path p;
        p.backward.resize(mids);
        p.forward.resize(mids);
        for (std::size_t i = b; i < e; ++i) {
            StreamRng rng(seed, i);
            p.witness = rng.bits(w);
            p.y = rng.bits(q - 1);
            for (auto &z : p.backward) {
                z = rng.bits(q);
            }
            for (auto &z : p.forward) {
                z = rng.bits(q);
            }
            contrib[i] = static_cast<std::int8_t>(real_part(path_phase(circuit, x, p)));
        }
    });
    std::int64_t sum = 0;
    for (const auto v : contrib) {
        sum += v;
    }
    AdditiveEstimate out;
    out.normalization = std::ldexp(1.0, static_cast<int>(n_star) - static_cast<int>(h));
    out.value = static_cast<double>(sum) / static_cast<double>(samples) * out.normalization;
    out.delta = delta;
    out.epsilon = std::sqrt(2.0 * std::log(2.0 / delta) / static_cast<double>(samples));
    out.samples = samples;
    out.seed = seed;
    return out;
}

/// S = ceil(2 ln(2/delta) / eps^2) samples reach precision eps.
inline std::uint64_t path_samples_for(double eps, double delta) {
    detail::require(eps > 0.0 && delta > 0.0 && delta < 1.0, "need eps > 0, delta in (0,1)");
    return static_cast<std::uint64_t>(std::ceil(2.0 * std::log(2.0 / delta) / (eps * eps)));
}

inline nlohmann::json to_json(const PathSumResult &r) {
    return {{"g", r.g},         {"f", r.f},           {"h", r.h},
            {"N_star", r.n_star}, {"trace", r.trace}, {"mode", "exact"}};
}

} // namespace qcount
