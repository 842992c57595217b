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
 * Counter-derived random streams and a small deterministic parallel loop.
 *
 * Every stochastic routine in qcount addresses randomness by (seed, stream),
 * where the stream is usually a sample index. A sample's draws therefore do
 * not depend on which worker ran it, so results are reproducible under any
 * thread count.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace qcount {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

/// Derive an independent seed for a named sub-computation.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                           std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/**
 * SplitMix64 generator keyed by (seed, stream). Satisfies
 * UniformRandomBitGenerator, but the helpers below are preferred over the
 * std distributions because their output is identical on every platform.
 */
class StreamRng {
  public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : state_(derive_seed(seed, stream)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31U);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>((*this)() >> 11U) * 0x1.0p-53;
    }

    /// Uniform integer in [0, 2^bits), bits <= 64.
    std::uint64_t bits(unsigned nbits) noexcept {
        if (nbits == 0) {
            return 0;
        }
        const auto v = (*this)();
        return nbits >= 64 ? v : (v >> (64U - nbits));
    }

    /// Uniform integer in [0, n) by rejection; n >= 1.
    std::uint64_t below(std::uint64_t n) noexcept {
        if (n <= 1) {
            return 0;
        }
        const std::uint64_t limit = max() - (max() % n);
        std::uint64_t v = 0;
        do {
            v = (*this)();
        } while (v >= limit);
        return v % n;
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

  private:
    std::uint64_t state_;
};

/// Worker count: QCOUNT_THREADS if set, else hardware concurrency.
inline unsigned default_workers() {
    if (const char *env = std::getenv("QCOUNT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

/**
 * Run body(begin, end) over contiguous chunks of [0, n) on up to `workers`
 * threads. Callers write results into per-index slots and reduce afterwards
 * in index order, which keeps floating point sums independent of the
 * schedule.
 */
template <class Body>
void parallel_chunks(std::size_t n, unsigned workers, Body &&body) {
    if (workers == 0) {
        workers = default_workers();
    }
    const std::size_t nthreads =
        std::min<std::size_t>(workers, std::max<std::size_t>(1, n / 256));
    if (nthreads <= 1) {
        body(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    const std::size_t chunk = (n + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
        const std::size_t b = t * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) {
            break;
        }
        pool.emplace_back([&body, b, e] { body(b, e); });
    }
    for (auto &th : pool) {
        th.join();
    }
}

} // namespace qcount
