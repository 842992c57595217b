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
 * Classical reductions driven by a simulated additive counting oracle.
 *
 * interval_partition_trace recovers Tr[A_x] from M-1 miscounted threshold
 * counts; padding_reduction recovers an exact count from an oracle whose
 * normalization is 2^{c(w+l)} by padding the witness register with l idle
 * qubits and rounding.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "circuit.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "svt.hpp"

namespace qcount {

/// How much of the miscount interval N_{[s,c)} the oracle adds.
enum class DeltaStrategy { Zero, Max, Random };
/// How the additive error is signed.
enum class EpsStrategy { Zero, Adversarial, Random };

inline DeltaStrategy parse_delta_strategy(std::string_view s) {
    if (s == "zero") {
        return DeltaStrategy::Zero;
    }
    if (s == "max") {
        return DeltaStrategy::Max;
    }
    if (s == "random") {
        return DeltaStrategy::Random;
    }
    throw PreconditionError("unknown delta strategy '" + std::string(s) + "'");
}

inline EpsStrategy parse_eps_strategy(std::string_view s) {
    if (s == "zero") {
        return EpsStrategy::Zero;
    }
    if (s == "adversarial") {
        return EpsStrategy::Adversarial;
    }
    if (s == "random") {
        return EpsStrategy::Random;
    }
    throw PreconditionError("unknown eps strategy '" + std::string(s) + "'");
}

inline const char *to_string(DeltaStrategy s) {
    switch (s) {
    case DeltaStrategy::Zero:
        return "zero";
    case DeltaStrategy::Max:
        return "max";
    case DeltaStrategy::Random:
        return "random";
    }
    return "?";
}

inline const char *to_string(EpsStrategy s) {
    switch (s) {
    case EpsStrategy::Zero:
        return "zero";
    case EpsStrategy::Adversarial:
        return "adversarial";
    case EpsStrategy::Random:
        return "random";
    }
    return "?";
}

struct OracleConfig {
    DeltaStrategy delta{DeltaStrategy::Zero};
    EpsStrategy eps_strategy{EpsStrategy::Zero};
    double eps{0.0};  ///< |eps_i| <= eps * u
    int eps_sign{+1}; ///< direction of adversarial error
    std::uint64_t seed{0};
};

/// Sampling backing: amplify with singular-value thresholds sqrt(c), sqrt(s),
/// then estimate the amplified trace by witness sampling with a median.
struct SampledBacking {
    double svt_eps{0.0};          ///< 0 selects eps/4
    std::uint64_t samples{0};     ///< per run; 0 selects ceil(4/(eps/2)^2)
    std::uint64_t repetitions{0}; ///< 0 selects median_repetitions(0.01)
};

struct OracleAnswer {
    double c{0.0};
    double s{0.0};
    double value{0.0};
    std::uint64_t n_geq_c{0};
    std::uint64_t n_geq_s{0};
    double delta{0.0};     ///< miscount slack in [0, N_{>=s} - N_{>=c}]
    double eps_error{0.0}; ///< additive error, |.| <= eps u
    bool in_range{true};
};

/**
 * Simulated oracle answering threshold-count queries (c, s) with
 *   N_{>=c} + delta + eps_error,
 * where delta in [0, N_{>=s} - N_{>=c}] and |eps_error| <= eps * u.
 * Every answer is range-checked against the exact spectrum and logged.
 */
class MiscountingOracle {
  public:
    MiscountingOracle(Spectrum spectrum, OracleConfig config)
        : spectrum_(std::move(spectrum)), config_(config),
          normalization_(static_cast<double>(spectrum_.dimension())),
          log_(std::make_shared<Log>()) {
        detail::require(config_.eps >= 0.0, "oracle eps must be non-negative");
        detail::require(config_.eps_sign == 1 || config_.eps_sign == -1, "eps sign must be +-1");
    }

    /// Exact-backed oracle for a circuit; idle witness qubits are factored out.
    static MiscountingOracle exact(const VerifierCircuit &circuit, const std::vector<bool> &x,
                                   OracleConfig config) {
        return {factored_spectrum(circuit, x), config};
    }

    /// Estimator-backed oracle. Delta/eps strategies are ignored: the error is
    /// whatever the sampling produces, and range misses are only logged.
    static MiscountingOracle sampled(const VerifierCircuit &circuit, const std::vector<bool> &x,
                                     OracleConfig config, SampledBacking backing = {}) {
        MiscountingOracle o(build_acceptance_operator(circuit, x).spectrum(), config);
        o.encoding_ = std::make_shared<BlockEncoding>(build_block_encoding(circuit, x));
        o.backing_ = backing;
        return o;
    }

    [[nodiscard]] const OracleConfig &config() const noexcept { return config_; }
    [[nodiscard]] const Spectrum &spectrum() const noexcept { return spectrum_; }
    [[nodiscard]] std::uint64_t dimension() const noexcept { return spectrum_.dimension(); }
    [[nodiscard]] bool is_sampled() const noexcept { return encoding_ != nullptr; }

    /// u in the error bound |eps_i| <= eps * u. Defaults to 2^w.
    [[nodiscard]] double normalization() const noexcept { return normalization_; }
    void set_normalization(double u) {
        detail::require(u > 0.0, "normalization must be positive");
        normalization_ = u;
    }

    /// Answer query (c, s). `stream` keys the randomness of this query.
    OracleAnswer query(double c, double s, std::uint64_t stream) const {
        require_thresholds(c, s);
        OracleAnswer a;
        a.c = c;
        a.s = s;
        a.n_geq_c = spectrum_.count_geq(c);
        a.n_geq_s = spectrum_.count_geq(s);
        const std::uint64_t slack = a.n_geq_s - a.n_geq_c;
        const double bound = config_.eps * normalization_;
        if (encoding_) {
            a.value = sampled_value(c, s, stream);
            a.delta = std::clamp(a.value - static_cast<double>(a.n_geq_c), 0.0,
                                 static_cast<double>(slack));
            a.eps_error = a.value - static_cast<double>(a.n_geq_c) - a.delta;
        } else {
            StreamRng rng(config_.seed, stream);
            switch (config_.delta) {
            case DeltaStrategy::Zero:
                a.delta = 0.0;
                break;
            case DeltaStrategy::Max:
                a.delta = static_cast<double>(slack);
                break;
            case DeltaStrategy::Random:
                a.delta = static_cast<double>(rng.below(slack + 1));
                break;
            }
            switch (config_.eps_strategy) {
            case EpsStrategy::Zero:
                a.eps_error = 0.0;
                break;
            case EpsStrategy::Adversarial:
                a.eps_error = config_.eps_sign * bound;
                break;
            case EpsStrategy::Random:
                a.eps_error = (2.0 * rng.uniform() - 1.0) * bound;
                break;
            }
            a.value = static_cast<double>(a.n_geq_c) + a.delta + a.eps_error;
        }
        const double tol = 1e-9 * std::max(1.0, normalization_);
        a.in_range = a.delta >= 0.0 && a.delta <= static_cast<double>(slack) &&
                     std::abs(a.eps_error) <= bound + tol;
        {
            std::lock_guard<std::mutex> lock(log_->mutex);
            log_->answers.push_back(a);
        }
        return a;
    }

    /// All answers so far, in arrival order.
    [[nodiscard]] std::vector<OracleAnswer> log() const {
        std::lock_guard<std::mutex> lock(log_->mutex);
        return log_->answers;
    }

  private:
    struct Log {
        std::mutex mutex;
        std::vector<OracleAnswer> answers;
    };

    double sampled_value(double c, double s, std::uint64_t stream) const {
        detail::require(config_.eps > 0.0, "a sampled oracle needs eps > 0");
        const double svt_eps = backing_.svt_eps > 0.0 ? backing_.svt_eps : config_.eps / 4.0;
        const double run_eps = config_.eps / 2.0;
        const std::uint64_t m = backing_.samples > 0
                                    ? backing_.samples
                                    : static_cast<std::uint64_t>(std::ceil(4.0 / (run_eps * run_eps)));
        const std::uint64_t k =
            backing_.repetitions > 0 ? backing_.repetitions : median_repetitions(0.01);
        const auto amplified =
            amplify(*encoding_, singular_threshold(c), singular_threshold(s), svt_eps);
        const auto table = acceptance_table(amplified.op);
        const auto est = median_amplify(
            [&](std::uint64_t sub) {
                return sample_trace(table, encoding_->witness_qubits(), m, sub);
            },
            k, derive_seed(config_.seed, stream));
        return est.value;
    }

    Spectrum spectrum_;
    OracleConfig config_;
    double normalization_;
    std::shared_ptr<Log> log_;
    std::shared_ptr<BlockEncoding> encoding_;
    SampledBacking backing_;
};

/// Thresholds c_i = (M-i)/M, s_i = c_i - 1/(4M) for 1 <= i <= M-1 and
/// weights Delta_i = c_i + 1/(2M) for 1 <= i <= M.
struct IntervalPartition {
    std::uint64_t m{2};
    std::vector<double> c; ///< c[i] for i = 0..M (c[0] = 1, c[M] = 0)
    std::vector<double> s; ///< s[i] for i = 1..M-1; s[0], s[M] unused

    explicit IntervalPartition(std::uint64_t parts) : m(parts) {
        detail::require(parts >= 2, "partition needs M >= 2");
        const double md = static_cast<double>(parts);
        c.resize(parts + 1);
        s.resize(parts + 1);
        for (std::uint64_t i = 0; i <= parts; ++i) {
            c[i] = static_cast<double>(parts - i) / md;
            s[i] = c[i] - 1.0 / (4.0 * md);
        }
    }

    [[nodiscard]] double weight(std::uint64_t i) const {
        return c[i] + 1.0 / (2.0 * static_cast<double>(m));
    }

    /// [s_i, c_i] and [s_j, c_j] are disjoint for all queried i != j.
    [[nodiscard]] bool disjoint() const {
        for (std::uint64_t i = 1; i + 1 < m; ++i) {
            // intervals are ordered by decreasing c: the next one must end below s_i
            if (!(c[i + 1] < s[i])) {
                return false;
            }
        }
        return true;
    }
};

struct IntervalTraceResult {
    double estimate{0.0};
    double bound{0.0}; ///< (5/2) 2^w / M
    std::uint64_t m{0};
    double dimension{0.0};
    std::vector<double> n_hat;    ///< n_hat[0..M]
    std::vector<double> chi_hat;  ///< chi_hat[1..M] (index 0 unused)
    std::uint64_t range_violations{0};
    std::optional<double> exact_trace;

    [[nodiscard]] std::optional<double> error() const {
        if (!exact_trace) {
            return std::nullopt;
        }
        return std::abs(estimate - *exact_trace);
    }
};

/**
 * Recover Tr[A_x] from oracle answers n_hat_i at thresholds (c_i, s_i):
 * sum_i Delta_i (n_hat_i - n_hat_{i-1}) with n_hat_0 = 0 and n_hat_M = 2^w.
 * Guarantee: |estimate - Tr| <= (5/2) 2^w / M when the oracle honours its
 * ranges with eps <= 1/M.
 */
inline IntervalTraceResult interval_partition_trace(const MiscountingOracle &oracle,
                                                    std::uint64_t m) {
    detail::require(m >= 2, "partition needs M >= 2");
    detail::require(oracle.config().eps <= 1.0 / static_cast<double>(m) + 1e-15,
                    "oracle eps must be at most 1/M");
    detail::require(oracle.normalization() == static_cast<double>(oracle.dimension()),
                    "interval reduction needs normalization 2^w");
    const IntervalPartition part(m);
    IntervalTraceResult r;
    r.m = m;
    r.dimension = static_cast<double>(oracle.dimension());
    r.n_hat.assign(m + 1, 0.0);
    r.chi_hat.assign(m + 1, 0.0);
    r.n_hat[m] = r.dimension;
    for (std::uint64_t i = 1; i < m; ++i) {
        const auto a = oracle.query(part.c[i], part.s[i], i);
        if (!a.in_range) {
            ++r.range_violations;
        }
        r.n_hat[i] = a.value;
    }
    if (r.range_violations > 0 && !oracle.is_sampled()) {
        throw InvariantError("oracle answered outside its declared range");
    }
    for (std::uint64_t i = 1; i <= m; ++i) {
        r.chi_hat[i] = r.n_hat[i] - r.n_hat[i - 1];
        r.estimate += part.weight(i) * r.chi_hat[i];
    }
    r.bound = 2.5 * r.dimension / static_cast<double>(m);
    r.exact_trace = oracle.spectrum().trace();
    return r;
}

/// Smallest partition size strictly above 5/(c - s).
inline std::uint64_t decision_partition_size(double c, double s) {
    require_thresholds(c, s);
    return static_cast<std::uint64_t>(std::ceil(5.0 / (c - s))) + 1;
}

/// Decide Tr/2^w >= c vs <= s by comparing the recovered trace to (c+s)/2.
inline Decision decide_by_reduction(const IntervalTraceResult &r, double c, double s) {
    return r.estimate / r.dimension >= 0.5 * (c + s) ? Decision::Yes : Decision::No;
}

struct PaddingResult {
    unsigned padding{0}; ///< l
    double normalization{0.0};
    double error_bound{0.0}; ///< eps 2^{w - (1-c) l}, must be < 1/2
    double raw{0.0};         ///< oracle answer on the padded circuit
    double scaled{0.0};      ///< raw / 2^l
    std::int64_t count{0};   ///< round(scaled)
    CountRange exact;        ///< [N_{>=c'} .. N_{>=s'}] of the original circuit
    OracleAnswer answer;

    [[nodiscard]] bool in_range() const noexcept {
        return count >= 0 && exact.contains(static_cast<double>(count));
    }
};

/// l = floor(w / (1 - c)) + 2, which satisfies l > w/(1-c) + 1.
inline unsigned padding_qubits(unsigned w, double norm_exponent) {
    return static_cast<unsigned>(std::floor(static_cast<double>(w) / (1.0 - norm_exponent))) + 2U;
}

/**
 * Exact count from an additive oracle with normalization 2^{c(w+l)}. The
 * oracle sees V' = V (x) I^{(x)l}, whose counts are 2^l times those of V;
 * dividing by 2^l leaves error at most eps 2^{w-(1-c)l} < 1/2, so rounding
 * lands in [N_{>=c'} .. N_{>=s'}].
 */
inline PaddingResult padding_reduction(const VerifierCircuit &circuit, const std::vector<bool> &x,
                                       double norm_exponent, double c_thr, double s_thr,
                                       const OracleConfig &config) {
    detail::require(norm_exponent > 0.0 && norm_exponent < 1.0,
                    "normalization exponent c must lie in (0,1)");
    detail::require(1.0 - norm_exponent >= 0.05, "need 1 - c >= 0.05");
    detail::require(config.eps >= 0.0 && config.eps < 1.0, "oracle precision must lie in [0,1)");
    require_thresholds(c_thr, s_thr);
    PaddingResult r;
    const unsigned w = circuit.num_witness();
    r.padding = padding_qubits(w, norm_exponent);
    r.error_bound = config.eps * std::exp2(static_cast<double>(w) -
                                           (1.0 - norm_exponent) * static_cast<double>(r.padding));
    detail::require(r.error_bound < 0.5, "oracle error " + std::to_string(r.error_bound) +
                                             " would not round to an exact count");
    const auto padded = circuit.pad_witness(r.padding);
    auto oracle = MiscountingOracle::exact(padded, x, config);
    r.normalization = std::exp2(norm_exponent * static_cast<double>(w + r.padding));
    oracle.set_normalization(r.normalization);
    r.answer = oracle.query(c_thr, s_thr, 0);
    detail::ensure(r.answer.in_range, "oracle answered outside its declared range");
    r.raw = r.answer.value;
    r.scaled = r.raw / std::exp2(static_cast<double>(r.padding));
    r.count = static_cast<std::int64_t>(std::llround(r.scaled));
    r.exact = exact_count_interval(factored_spectrum(circuit, x), c_thr, s_thr);
    return r;
}

inline nlohmann::json to_json(const OracleAnswer &a) {
    return {{"c", a.c},         {"s", a.s},
            {"value", a.value}, {"N_geq_c", a.n_geq_c},
            {"N_geq_s", a.n_geq_s}, {"delta", a.delta},
            {"eps_error", a.eps_error}, {"in_range", a.in_range}};
}

} // namespace qcount
