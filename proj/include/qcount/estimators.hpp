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
 * Sampling estimators for the normalized trace of an acceptance operator.
 *
 * Draw M uniformly random witness basis states, run each through the
 * verifier and count acceptances; scaled by 2^w/M this is an unbiased
 * estimate of Tr[A_x] with variance Tr (2^w - Tr) / M.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "circuit.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace qcount {

struct AdditiveEstimate {
    double value{0.0};
    double normalization{1.0}; ///< u: error is measured in units of u
    double epsilon{1.0};       ///< precision, relative to u
    double delta{0.25};        ///< failure probability of the precision claim
    std::uint64_t samples{1};
    std::uint64_t seed{0};
};

/// Chebyshev precision of an M-sample trace estimate at failure rate delta.
inline double chebyshev_epsilon(std::uint64_t samples, double delta) {
    return std::sqrt(1.0 / (static_cast<double>(samples) * delta));
}

/// Per-witness acceptance probabilities, indexed by witness integer.
class AcceptanceTable {
  public:
    AcceptanceTable(std::vector<double> probs, unsigned witness_qubits)
        : probs_(std::move(probs)), witness_(witness_qubits) {
        detail::require(probs_.size() == (std::size_t{1} << witness_),
                        "acceptance table must have 2^w entries");
    }

    double operator()(std::uint64_t y) const { return probs_[y]; }
    [[nodiscard]] unsigned witness_qubits() const noexcept { return witness_; }
    [[nodiscard]] const std::vector<double> &probabilities() const noexcept { return probs_; }

  private:
    std::vector<double> probs_;
    unsigned witness_;
};

inline AcceptanceTable acceptance_table(const VerifierCircuit &circuit,
                                        const std::vector<bool> &x) {
    const std::uint64_t dim = std::uint64_t{1} << circuit.num_witness();
    std::vector<double> probs(dim);
    for (std::uint64_t y = 0; y < dim; ++y) {
        probs[y] = accept_probability(circuit, x, y);
    }
    return {std::move(probs), circuit.num_witness()};
}

/// Diagonal of an acceptance operator, e.g. an amplified one.
inline AcceptanceTable acceptance_table(const AcceptanceOperator &op) {
    std::vector<double> probs(op.dimension());
    for (std::uint64_t y = 0; y < op.dimension(); ++y) {
        const auto i = static_cast<Eigen::Index>(y);
        probs[y] = std::clamp(op.matrix()(i, i).real(), 0.0, 1.0);
    }
    return {std::move(probs), op.witness_qubits()};
}

/**
 * Number of accepting runs among M. Sample i uses stream i of `seed`: it draws
 * the witness y, then a Bernoulli(p(y)) outcome.
 */
template <std::invocable<std::uint64_t> AcceptFn>
std::uint64_t count_accepts(const AcceptFn &accept, unsigned witness_qubits,
                            std::uint64_t samples, std::uint64_t seed, unsigned workers = 0) {
    std::vector<std::uint8_t> hit(samples, 0);
    parallel_chunks(samples, workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            StreamRng rng(seed, i);
            const std::uint64_t y = rng.bits(witness_qubits);
            hit[i] = rng.bernoulli(accept(y)) ? 1 : 0;
        }
    });
    std::uint64_t n = 0;
    for (const auto h : hit) {
        n += h;
    }
    return n;
}

/// X = (2^w / M) * sum_i X_i for any per-witness acceptance function.
template <std::invocable<std::uint64_t> AcceptFn>
AdditiveEstimate sample_trace(const AcceptFn &accept, unsigned witness_qubits,
                              std::uint64_t samples, std::uint64_t seed, unsigned workers = 0) {
    detail::require(samples >= 1, "sample count M must be >= 1");
    const std::uint64_t hits = count_accepts(accept, witness_qubits, samples, seed, workers);
    const double scale = std::ldexp(1.0, static_cast<int>(witness_qubits));
    AdditiveEstimate est;
    est.value = scale * static_cast<double>(hits) / static_cast<double>(samples);
    est.normalization = scale;
    est.delta = 0.25;
    est.epsilon = chebyshev_epsilon(samples, est.delta);
    est.samples = samples;
    est.seed = seed;
    return est;
}

inline AdditiveEstimate quantum_trace_estimator(const VerifierCircuit &circuit,
                                                const std::vector<bool> &x,
                                                std::uint64_t samples, std::uint64_t seed,
                                                unsigned workers = 0) {
    detail::require(x.size() == circuit.num_input(), "input string length mismatch");
    require_statevector_size(circuit.num_qubits());
    const unsigned w = circuit.num_witness();
    // Tabulating costs 2^w simulations; only worth it when M covers that.
    if (w < 63 && (std::uint64_t{1} << w) <= samples) {
        return sample_trace(acceptance_table(circuit, x), w, samples, seed, workers);
    }
    return sample_trace(
        [&](std::uint64_t y) { return accept_probability(circuit, x, y); }, w, samples, seed,
        workers);
}

/// k = ceil(8 ln(1/delta')) repetitions push a 1/4 failure rate below delta'.
inline std::uint64_t median_repetitions(double delta_prime) {
    detail::require(delta_prime > 0.0 && delta_prime < 1.0, "delta' must lie in (0,1)");
    return static_cast<std::uint64_t>(std::ceil(8.0 * std::log(1.0 / delta_prime)));
}

/**
 * Median of k independent runs of `base(sub_seed)`. Run j gets
 * derive_seed(seed, j). For even k the two middle values are averaged.
 */
template <class BaseEstimator>
AdditiveEstimate median_amplify(const BaseEstimator &base, std::uint64_t k, std::uint64_t seed) {
    detail::require(k >= 1, "repetition count k must be >= 1");
    std::vector<AdditiveEstimate> runs;
    runs.reserve(k);
    for (std::uint64_t j = 0; j < k; ++j) {
        runs.push_back(base(derive_seed(seed, j)));
    }
    std::vector<double> values;
    values.reserve(k);
    for (const auto &r : runs) {
        values.push_back(r.value);
    }
    std::sort(values.begin(), values.end());
    AdditiveEstimate out = runs.front();
    out.value = (k % 2 == 1) ? values[k / 2] : 0.5 * (values[k / 2 - 1] + values[k / 2]);
    // Hoeffding on the indicator of per-run success.
    const double base_delta = std::min(runs.front().delta, 0.25);
    out.delta = std::exp(-2.0 * static_cast<double>(k) * (0.5 - base_delta) * (0.5 - base_delta));
    out.samples = runs.front().samples * k;
    out.seed = seed;
    return out;
}

enum class Decision { Yes, No };

inline const char *to_string(Decision d) { return d == Decision::Yes ? "YES" : "NO"; }

struct DeciderResult {
    Decision decision{Decision::No};
    double mean{0.0}; ///< fraction of accepting runs
    double epsilon{0.0};
    std::uint64_t samples{0};
    /// Set when the exact oracle was consulted.
    std::optional<double> exact_normalized_trace;
    /// True when the exact normalized trace lies strictly inside (s, c).
    std::optional<bool> promise_violated;
};

/// Default decider precision: min(1/6, (c - s)/3).
inline double decider_epsilon(double c, double s) {
    return std::min(1.0 / 6.0, (c - s) / 3.0);
}

/// M = ceil(3/eps^2) + 1, strictly above 3/eps^2.
inline std::uint64_t decider_samples(double eps) {
    detail::require(eps > 0.0 && eps < 1.0, "decider precision must lie in (0,1)");
    return static_cast<std::uint64_t>(std::ceil(3.0 / (eps * eps))) + 1;
}

/**
 * Decide Tr/2^w >= c versus Tr/2^w <= s from M = ceil(3/eps^2) + 1 runs on
 * uniformly random witnesses. Answers YES when the acceptance fraction is at
 * least (c + s)/2. Correct with probability >= 2/3 under the promise.
 */
template <std::invocable<std::uint64_t> AcceptFn>
DeciderResult avg_accept_decider(const AcceptFn &accept, unsigned witness_qubits, double c,
                                 double s, std::uint64_t seed, std::optional<double> eps = {},
                                 unsigned workers = 0) {
    require_thresholds(c, s);
    const double e = eps.value_or(decider_epsilon(c, s));
    detail::require(e > 0.0 && e < 1.0 / 6.0 + 1e-15, "decider precision must lie in (0, 1/6]");
    detail::require(e < (c - s) / 2.0, "decider precision must be below half the promise gap");
    DeciderResult out;
    out.epsilon = e;
    out.samples = decider_samples(e);
    const auto hits = count_accepts(accept, witness_qubits, out.samples, seed, workers);
    out.mean = static_cast<double>(hits) / static_cast<double>(out.samples);
    out.decision = out.mean >= 0.5 * (c + s) ? Decision::Yes : Decision::No;
    return out;
}

inline DeciderResult avg_accept_decider(const VerifierCircuit &circuit,
                                        const std::vector<bool> &x, double c, double s,
                                        std::uint64_t seed, std::optional<double> eps = {},
                                        bool consult_oracle = true, unsigned workers = 0) {
    detail::require(x.size() == circuit.num_input(), "input string length mismatch");
    require_thresholds(c, s);
    const unsigned w = circuit.num_witness();
    DeciderResult out;
    const auto m = decider_samples(eps.value_or(decider_epsilon(c, s)));
    if (w < 63 && (std::uint64_t{1} << w) <= m) {
        out = avg_accept_decider(acceptance_table(circuit, x), w, c, s, seed, eps, workers);
    } else {
        auto accept = [&](std::uint64_t y) { return accept_probability(circuit, x, y); };
        out = avg_accept_decider(accept, w, c, s, seed, eps, workers);
    }
    if (consult_oracle && circuit.num_qubits() <= dense_cap()) {
        const double tr = trace_normalized(build_acceptance_operator(circuit, x));
        out.exact_normalized_trace = tr;
        out.promise_violated = tr > s + kTieTol && tr < c - kTieTol;
    }
    return out;
}

inline nlohmann::json to_json(const AdditiveEstimate &e) {
    return {{"value", e.value},     {"normalization", e.normalization},
            {"epsilon", e.epsilon}, {"delta", e.delta},
            {"M", e.samples},       {"seed", e.seed}};
}

} // namespace qcount
