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
 * Verifier circuits over the {H, S, Toffoli} gate set and the qcv v1 text
 * format.
 *
 * Qubit layout is fixed: [0, a) ancillas with qubit 0 the output qubit,
 * [a, a+n) input, [a+n, a+n+w) witness.
 */
#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace qcount {

enum class GateKind : std::uint8_t { H, S, Toffoli };

struct Gate {
    GateKind kind{GateKind::H};
    /// Qubit indices; for Toffoli {control, control, target}. Unused slots
    /// are ignored.
    std::array<unsigned, 3> qubits{};

    static Gate h(unsigned q) { return {GateKind::H, {q, 0, 0}}; }
    static Gate s(unsigned q) { return {GateKind::S, {q, 0, 0}}; }
    static Gate toffoli(unsigned c1, unsigned c2, unsigned t) {
        return {GateKind::Toffoli, {c1, c2, t}};
    }

    [[nodiscard]] unsigned arity() const noexcept {
        return kind == GateKind::Toffoli ? 3U : 1U;
    }
    [[nodiscard]] unsigned target() const noexcept {
        return kind == GateKind::Toffoli ? qubits[2] : qubits[0];
    }

    friend bool operator==(const Gate &lhs, const Gate &rhs) noexcept {
        if (lhs.kind != rhs.kind) {
            return false;
        }
        for (unsigned i = 0; i < lhs.arity(); ++i) {
            if (lhs.qubits[i] != rhs.qubits[i]) {
                return false;
            }
        }
        return true;
    }
};

/// Counts of the three registers of a verifier circuit.
struct RegisterLayout {
    unsigned ancilla{1};
    unsigned input{0};
    unsigned witness{0};

    [[nodiscard]] unsigned total() const noexcept {
        return ancilla + input + witness;
    }
    [[nodiscard]] unsigned input_offset() const noexcept { return ancilla; }
    [[nodiscard]] unsigned witness_offset() const noexcept {
        return ancilla + input;
    }

    friend bool operator==(const RegisterLayout &, const RegisterLayout &) = default;
};

/**
 * Immutable verifier circuit. The gate list only ever holds core gates; the
 * gate count t and Hadamard count h are derived from it on demand.
 */
class VerifierCircuit {
  public:
    static constexpr unsigned output_qubit = 0;

    VerifierCircuit(RegisterLayout layout, std::vector<Gate> gates)
        : layout_(layout), gates_(std::move(gates)) {
        detail::require(layout_.ancilla >= 1,
                        "verifier circuit needs at least one ancilla (output qubit)");
        for (const auto &g : gates_) {
            check_gate(g);
        }
    }

    [[nodiscard]] const RegisterLayout &layout() const noexcept { return layout_; }
    [[nodiscard]] unsigned num_ancilla() const noexcept { return layout_.ancilla; }
    [[nodiscard]] unsigned num_input() const noexcept { return layout_.input; }
    [[nodiscard]] unsigned num_witness() const noexcept { return layout_.witness; }
    [[nodiscard]] unsigned num_qubits() const noexcept { return layout_.total(); }
    [[nodiscard]] const std::vector<Gate> &gates() const noexcept { return gates_; }

    /// t: total core gate count.
    [[nodiscard]] std::size_t gate_count() const noexcept { return gates_.size(); }

    /// h: number of Hadamard gates.
    [[nodiscard]] std::size_t hadamard_count() const noexcept {
        return static_cast<std::size_t>(
            std::count_if(gates_.begin(), gates_.end(),
                          [](const Gate &g) { return g.kind == GateKind::H; }));
    }

    /// The same circuit with `extra` untouched witness qubits appended.
    [[nodiscard]] VerifierCircuit pad_witness(unsigned extra) const {
        RegisterLayout padded = layout_;
        padded.witness += extra;
        return {padded, gates_};
    }

    friend bool operator==(const VerifierCircuit &, const VerifierCircuit &) = default;

  private:
    void check_gate(const Gate &g) const {
        const unsigned n = layout_.total();
        for (unsigned i = 0; i < g.arity(); ++i) {
            detail::require(g.qubits[i] < n, "qubit index " + std::to_string(g.qubits[i]) +
                                                 " out of range for " + std::to_string(n) +
                                                 " qubits");
            for (unsigned j = 0; j < i; ++j) {
                detail::require(g.qubits[i] != g.qubits[j],
                                "repeated qubit index within a gate");
            }
        }
    }

    RegisterLayout layout_;
    std::vector<Gate> gates_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto *ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
            ++i;
        }
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') {
            ++j;
        }
        if (j > i) {
            out.push_back(s.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

inline unsigned parse_uint(std::string_view tok, std::size_t line) {
    unsigned v = 0;
    const auto *end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError(line, "expected non-negative integer, got '" + std::string(tok) + "'");
    }
    return v;
}

inline RegisterLayout parse_header(std::string_view text, std::size_t line) {
    constexpr std::string_view prefix = "registers:";
    if (text.substr(0, prefix.size()) != prefix) {
        throw ParseError(line, "expected 'registers: ancilla=<a> input=<n> witness=<w>'");
    }
    RegisterLayout layout{0, 0, 0};
    bool seen[3] = {false, false, false};
    for (auto tok : split_ws(text.substr(prefix.size()))) {
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(line, "malformed register field '" + std::string(tok) + "'");
        }
        const auto key = tok.substr(0, eq);
        const unsigned value = parse_uint(tok.substr(eq + 1), line);
        int slot = -1;
        if (key == "ancilla") {
            slot = 0;
            layout.ancilla = value;
        } else if (key == "input") {
            slot = 1;
            layout.input = value;
        } else if (key == "witness") {
            slot = 2;
            layout.witness = value;
        } else {
            throw ParseError(line, "unknown register '" + std::string(key) + "'");
        }
        if (seen[slot]) {
            throw ParseError(line, "register '" + std::string(key) + "' given twice");
        }
        seen[slot] = true;
    }
    if (!(seen[0] && seen[1] && seen[2])) {
        throw ParseError(line, "header must set ancilla, input and witness");
    }
    if (layout.ancilla == 0) {
        throw ParseError(line, "ancilla=0: the output qubit must be an ancilla");
    }
    return layout;
}

} // namespace detail

/**
 * Parse a qcv v1 circuit. Sugar mnemonics are expanded into the core set:
 * X -> H S S H, Z -> S S, SDG -> S S S.
 */
inline VerifierCircuit parse_circuit(std::string_view text) {
    std::vector<Gate> gates;
    RegisterLayout layout{};
    bool have_header = false;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        ++lineno;
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        if (!have_header) {
            layout = detail::parse_header(line, lineno);
            have_header = true;
            continue;
        }
        const auto toks = detail::split_ws(line);
        const auto mnemonic = toks.front();
        std::vector<unsigned> qs;
        for (std::size_t i = 1; i < toks.size(); ++i) {
            qs.push_back(detail::parse_uint(toks[i], lineno));
        }
        const unsigned want = mnemonic == "TOF" ? 3U : 1U;
        const bool known = mnemonic == "H" || mnemonic == "S" || mnemonic == "SDG" ||
                           mnemonic == "Z" || mnemonic == "X" || mnemonic == "TOF";
        if (!known) {
            throw ParseError(lineno, "unknown gate '" + std::string(mnemonic) + "'");
        }
        if (qs.size() != want) {
            throw ParseError(lineno, "gate '" + std::string(mnemonic) + "' takes " +
                                         std::to_string(want) + " qubit(s)");
        }
        for (unsigned i = 0; i < want; ++i) {
            if (qs[i] >= layout.total()) {
                throw ParseError(lineno, "qubit index " + std::to_string(qs[i]) +
                                             " out of range");
            }
            for (unsigned j = 0; j < i; ++j) {
                if (qs[i] == qs[j]) {
                    throw ParseError(lineno, "repeated qubit index within a gate");
                }
            }
        }
        const unsigned q = qs[0];
        if (mnemonic == "H") {
            gates.push_back(Gate::h(q));
        } else if (mnemonic == "S") {
            gates.push_back(Gate::s(q));
        } else if (mnemonic == "Z") {
            gates.insert(gates.end(), {Gate::s(q), Gate::s(q)});
        } else if (mnemonic == "SDG") {
            gates.insert(gates.end(), {Gate::s(q), Gate::s(q), Gate::s(q)});
        } else if (mnemonic == "X") {
            gates.insert(gates.end(), {Gate::h(q), Gate::s(q), Gate::s(q), Gate::h(q)});
        } else {
            gates.push_back(Gate::toffoli(qs[0], qs[1], qs[2]));
        }
    }
    if (!have_header) {
        throw ParseError(lineno, "missing 'registers:' header");
    }
    return {layout, std::move(gates)};
}

/// Canonical qcv v1 text (core gates only). parse_circuit(to_qcv(c)) == c.
inline std::string to_qcv(const VerifierCircuit &c) {
    std::ostringstream out;
    out << "registers: ancilla=" << c.num_ancilla() << " input=" << c.num_input()
        << " witness=" << c.num_witness() << '\n';
    for (const auto &g : c.gates()) {
        switch (g.kind) {
        case GateKind::H:
            out << "H " << g.qubits[0] << '\n';
            break;
        case GateKind::S:
            out << "S " << g.qubits[0] << '\n';
            break;
        case GateKind::Toffoli:
            out << "TOF " << g.qubits[0] << ' ' << g.qubits[1] << ' ' << g.qubits[2] << '\n';
            break;
        }
    }
    return out.str();
}

/// FNV-1a over the canonical text, as 16 hex digits.
inline std::string circuit_hash(const VerifierCircuit &c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : to_qcv(c)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xFU];
        h >>= 4U;
    }
    return out;
}

/// Parse a bit string like "0110" into a vector of bits, checking length.
inline std::vector<bool> parse_bits(std::string_view s, std::size_t expected,
                                    const char *what) {
    detail::require(s.size() == expected, std::string(what) + " has length " +
                                              std::to_string(s.size()) + ", expected " +
                                              std::to_string(expected));
    std::vector<bool> bits;
    bits.reserve(s.size());
    for (const char ch : s) {
        detail::require(ch == '0' || ch == '1', std::string(what) + " must be a 0/1 string");
        bits.push_back(ch == '1');
    }
    return bits;
}

} // namespace qcount
