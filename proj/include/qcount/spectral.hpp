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
 * Acceptance operators and the exact spectral oracle.
 *
 * For a verifier V and input x the acceptance operator on the witness space is
 *
 *   A_x = (<x| <0^a| (x) I_W) V^dag P_out V (|x> |0^a> (x) I_W),
 *
 * with P_out = |1><1| on qubit 0. With no input register this is the
 * one-clean-qubit operator D_x. Its eigenvalues are acceptance probabilities
 * of the optimal witnesses; everything here counts and sums them exactly.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "circuit.hpp"
#include "errors.hpp"
#include "statevector.hpp"

namespace qcount {

/// An eigenvalue l counts as >= a when l >= a - kTieTol.
inline constexpr double kTieTol = 1e-12;
inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kSpectrumTol = 1e-9;

/// Eigenvalues (descending) with a uniform multiplicity factor 2^idle.
class Spectrum {
  public:
    Spectrum() = default;
    Spectrum(std::vector<double> descending, unsigned idle_qubits = 0)
        : values_(std::move(descending)), idle_(idle_qubits) {}

    [[nodiscard]] const std::vector<double> &values() const noexcept { return values_; }
    [[nodiscard]] std::uint64_t multiplicity() const noexcept {
        return std::uint64_t{1} << idle_;
    }
    [[nodiscard]] std::uint64_t dimension() const noexcept {
        return values_.size() * multiplicity();
    }

    /// N_{>=a}.
    [[nodiscard]] std::uint64_t count_geq(double a) const noexcept {
        const auto it = std::find_if(values_.begin(), values_.end(),
                                     [a](double l) { return l < a - kTieTol; });
        return static_cast<std::uint64_t>(it - values_.begin()) * multiplicity();
    }

    /// N_{[a,b]}, closed at both ends under the tie rule.
    [[nodiscard]] std::uint64_t count_interval(double a, double b) const noexcept {
        std::uint64_t n = 0;
        for (const double l : values_) {
            if (l >= a - kTieTol && l <= b + kTieTol) {
                ++n;
            }
        }
        return n * multiplicity();
    }

    /// Tr_{[a,b]}: sum of eigenvalues in the closed interval.
    [[nodiscard]] double partial_trace(double a, double b) const noexcept {
        double t = 0.0;
        for (const double l : values_) {
            if (l >= a - kTieTol && l <= b + kTieTol) {
                t += l;
            }
        }
        return t * static_cast<double>(multiplicity());
    }

    [[nodiscard]] double trace() const noexcept {
        double t = 0.0;
        for (const double l : values_) {
            t += l;
        }
        return t * static_cast<double>(multiplicity());
    }

  private:
    std::vector<double> values_;
    unsigned idle_{0};
};

/// Clamp a raw spectrum into [0,1]; excursions beyond kSpectrumTol throw.
inline std::vector<double> validated_spectrum(const RealVector &raw) {
    std::vector<double> vals(raw.data(), raw.data() + raw.size());
    for (auto &l : vals) {
        detail::ensure(l >= -kSpectrumTol && l <= 1.0 + kSpectrumTol,
                       "acceptance operator eigenvalue " + std::to_string(l) +
                           " outside [0,1]");
        l = std::clamp(l, 0.0, 1.0);
    }
    std::sort(vals.begin(), vals.end(), std::greater<>());
    return vals;
}

/**
 * Hermitian PSD operator on 2^w witness states with spectrum in [0,1].
 * Immutable; the spectrum is computed once on first use and then shared.
 */
class AcceptanceOperator {
  public:
    AcceptanceOperator(ComplexMatrix matrix, unsigned witness_qubits)
        : matrix_(std::move(matrix)), witness_(witness_qubits),
          cache_(std::make_shared<Cache>()) {
        const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << witness_);
        detail::ensure(matrix_.rows() == dim && matrix_.cols() == dim,
                       "acceptance operator must be 2^w x 2^w");
        const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
        detail::ensure(herm <= kHermitianTol,
                       "acceptance operator is not Hermitian (deviation " +
                           std::to_string(herm) + ")");
    }

    [[nodiscard]] const ComplexMatrix &matrix() const noexcept { return matrix_; }
    [[nodiscard]] unsigned witness_qubits() const noexcept { return witness_; }
    [[nodiscard]] std::uint64_t dimension() const noexcept {
        return std::uint64_t{1} << witness_;
    }

    /// Eigenvalues sorted descending, validated and clamped to [0,1].
    [[nodiscard]] const std::vector<double> &eigenvalues() const {
        std::call_once(cache_->once, [this] {
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
            detail::ensure(solver.info() == Eigen::Success, "eigensolver failed");
            cache_->spectrum = Spectrum(validated_spectrum(solver.eigenvalues()));
        });
        return cache_->spectrum.values();
    }

    [[nodiscard]] const Spectrum &spectrum() const {
        (void)eigenvalues();
        return cache_->spectrum;
    }

    [[nodiscard]] double trace() const noexcept { return matrix_.trace().real(); }

  private:
    struct Cache {
        std::once_flag once;
        Spectrum spectrum;
    };

    ComplexMatrix matrix_;
    unsigned witness_;
    std::shared_ptr<Cache> cache_;
};

/**
 * Block of V restricted to output qubit = 1 (rows) and |0^a>|x>|y> inputs
 * (columns). Row r is basis index 2r+1. U^dag U is the acceptance operator.
 */
inline ComplexMatrix output_block(const VerifierCircuit &circuit, const std::vector<bool> &x) {
    detail::require(x.size() == circuit.num_input(),
                    "input string length " + std::to_string(x.size()) + " != n = " +
                        std::to_string(circuit.num_input()));
    require_dense_size(circuit.num_qubits());
    const auto &layout = circuit.layout();
    const std::uint64_t cols = std::uint64_t{1} << layout.witness;
    const std::uint64_t rows = std::uint64_t{1} << (layout.total() - 1);
    ComplexMatrix u(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::uint64_t y = 0; y < cols; ++y) {
        const auto psi = simulate(circuit, basis_index(layout, x, y));
        for (std::uint64_t r = 0; r < rows; ++r) {
            u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(y)) = psi[2 * r + 1];
        }
    }
    return u;
}

inline AcceptanceOperator build_acceptance_operator(const VerifierCircuit &circuit,
                                                    const std::vector<bool> &x) {
    const ComplexMatrix u = output_block(circuit, x);
    ComplexMatrix op = u.adjoint() * u;
    // Symmetrise away rounding in the product.
    op = (0.5 * (op + op.adjoint())).eval();
    return {std::move(op), circuit.num_witness()};
}

inline std::uint64_t count_eigs_geq(const AcceptanceOperator &op, double a) {
    detail::require(a >= 0.0 && a <= 1.0 + kSpectrumTol, "threshold must lie in [0,1]");
    return op.spectrum().count_geq(a);
}

/// Output set of the counting relation: every integer in [low, high].
struct CountRange {
    std::uint64_t low{0};  ///< N_{>=c}
    std::uint64_t high{0}; ///< N_{>=s}

    [[nodiscard]] bool contains(double v) const noexcept {
        return v >= static_cast<double>(low) && v <= static_cast<double>(high);
    }
};

inline void require_thresholds(double c, double s) {
    detail::require(s >= 0.0 && c <= 1.0 && s < c,
                    "thresholds must satisfy 0 <= s < c <= 1");
}

inline CountRange exact_count_interval(const Spectrum &spectrum, double c, double s) {
    require_thresholds(c, s);
    return {spectrum.count_geq(c), spectrum.count_geq(s)};
}

inline CountRange exact_count_interval(const AcceptanceOperator &op, double c, double s) {
    return exact_count_interval(op.spectrum(), c, s);
}

/// Tr[A]/2^w.
inline double trace_normalized(const AcceptanceOperator &op) {
    return op.trace() / static_cast<double>(op.dimension());
}

/// Probability that the output qubit reads 1 on |0^a>|x>|y>.
inline double accept_probability(const VerifierCircuit &circuit, const std::vector<bool> &x,
                                 std::uint64_t y) {
    detail::require(x.size() == circuit.num_input(), "input string length mismatch");
    detail::require(circuit.num_witness() >= 64 || y < (std::uint64_t{1} << circuit.num_witness()),
                    "witness index out of range");
    return simulate(circuit, basis_index(circuit.layout(), x, y))
        .probability_one(VerifierCircuit::output_qubit);
}

/// Witness string -> integer; character j is witness qubit j.
inline std::uint64_t witness_index(std::string_view y, unsigned w) {
    const auto bits = parse_bits(y, w, "witness string");
    std::uint64_t idx = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) {
        if (bits[j]) {
            idx |= std::uint64_t{1} << j;
        }
    }
    return idx;
}

inline double accept_probability(const VerifierCircuit &circuit, const std::vector<bool> &x,
                                 std::string_view y) {
    return accept_probability(circuit, x, witness_index(y, circuit.num_witness()));
}

/// Concrete log-ancilla test: a <= ceil(log2(max(w,2))) + 2.
inline bool validate_dqc1(const VerifierCircuit &circuit) {
    const unsigned w = std::max(circuit.num_witness(), 2U);
    unsigned ceil_log = 0;
    while ((1ULL << ceil_log) < w) {
        ++ceil_log;
    }
    return circuit.num_ancilla() <= ceil_log + 2;
}

/**
 * Witness qubits that no gate touches. They tensor an identity onto the
 * acceptance operator, so they only scale multiplicities.
 */
inline std::vector<unsigned> idle_witness_qubits(const VerifierCircuit &circuit) {
    const auto &layout = circuit.layout();
    std::vector<bool> used(layout.total(), false);
    for (const auto &g : circuit.gates()) {
        for (unsigned i = 0; i < g.arity(); ++i) {
            used[g.qubits[i]] = true;
        }
    }
    std::vector<unsigned> idle;
    for (unsigned q = layout.witness_offset(); q < layout.total(); ++q) {
        if (!used[q]) {
            idle.push_back(q);
        }
    }
    return idle;
}

/// Spectrum of A_x computed on the active qubits only, idle witness qubits
/// folded into the multiplicity.
inline Spectrum factored_spectrum(const VerifierCircuit &circuit, const std::vector<bool> &x) {
    const auto idle = idle_witness_qubits(circuit);
    if (idle.empty()) {
        return build_acceptance_operator(circuit, x).spectrum();
    }
    const auto &layout = circuit.layout();
    std::vector<unsigned> relabel(layout.total());
    unsigned next = 0;
    for (unsigned q = 0; q < layout.total(); ++q) {
        if (std::find(idle.begin(), idle.end(), q) == idle.end()) {
            relabel[q] = next++;
        }
    }
    std::vector<Gate> gates = circuit.gates();
    for (auto &g : gates) {
        for (unsigned i = 0; i < g.arity(); ++i) {
            g.qubits[i] = relabel[g.qubits[i]];
        }
    }
    RegisterLayout active = layout;
    active.witness -= static_cast<unsigned>(idle.size());
    const auto op = build_acceptance_operator(VerifierCircuit(active, std::move(gates)), x);
    return {op.eigenvalues(), static_cast<unsigned>(idle.size())};
}

/// Row-major dump: {"dim": d, "witness_qubits": w, "data": [[re, im], ...]}.
inline nlohmann::json operator_to_json(const ComplexMatrix &m, unsigned witness_qubits) {
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            data.push_back({m(r, c).real(), m(r, c).imag()});
        }
    }
    return {{"dim", m.rows()}, {"witness_qubits", witness_qubits}, {"data", std::move(data)}};
}

inline nlohmann::json operator_to_json(const AcceptanceOperator &op) {
    return operator_to_json(op.matrix(), op.witness_qubits());
}

inline ComplexMatrix operator_from_json(const nlohmann::json &j) {
    const auto dim = j.at("dim").get<Eigen::Index>();
    const auto &data = j.at("data");
    detail::require(data.size() == static_cast<std::size_t>(dim * dim), "matrix dump size mismatch");
    ComplexMatrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            const auto &e = data[static_cast<std::size_t>(r * dim + c)];
            m(r, c) = Complex{e.at(0).get<double>(), e.at(1).get<double>()};
        }
    }
    return m;
}

} // namespace qcount
