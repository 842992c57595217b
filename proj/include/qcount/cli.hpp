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
 * The qcount command line: one subcommand per operation, JSON-lines output.
 *
 * Exit codes: 0 success, 1 unknown subcommand or bad usage, 2 precondition or
 * file error, 3 internal invariant violation.
 */
#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcount.hpp"

namespace qcount::cli {

inline constexpr int kSchemaVersion = 1;

inline const std::vector<std::string> &subcommands() {
    static const std::vector<std::string> names = {
        "exact-count", "estimate-trace", "path-sum",         "rect-poly",    "svt-amplify",
        "reduce-interval", "reduce-pad", "decide-avg-accept", "validate-dqc1"};
    return names;
}

/// Everything needed to re-run one experiment.
struct ExperimentConfig {
    std::string subcommand;
    std::string circuit_path;
    std::string x;
    std::optional<std::uint64_t> seed;
    std::optional<double> eps;
    std::optional<double> delta;
    std::optional<std::uint64_t> m;
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> k;
    std::optional<double> c;
    std::optional<double> s;
    std::optional<double> t;
    std::optional<double> width;
    std::optional<double> norm_exponent;
    std::optional<std::string> delta_strategy;
    std::optional<std::string> eps_strategy;
    std::optional<int> eps_sign;
    std::optional<std::string> mode;
    std::optional<std::string> backing;
    bool eigen_thresholds{false};
    bool dump_operator{false};

    friend bool operator==(const ExperimentConfig &, const ExperimentConfig &) = default;
};

namespace detail {
template <class T>
void put(nlohmann::json &j, const char *key, const std::optional<T> &v) {
    if (v) {
        j[key] = *v;
    }
}
template <class T>
void get(const nlohmann::json &j, const char *key, std::optional<T> &v) {
    if (j.contains(key)) {
        v = j.at(key).get<T>();
    } else {
        v.reset();
    }
}
} // namespace detail

inline nlohmann::json to_json(const ExperimentConfig &cfg) {
    nlohmann::json j;
    j["subcommand"] = cfg.subcommand;
    if (!cfg.circuit_path.empty()) {
        j["circuit"] = cfg.circuit_path;
    }
    j["x"] = cfg.x;
    detail::put(j, "seed", cfg.seed);
    detail::put(j, "eps", cfg.eps);
    detail::put(j, "delta", cfg.delta);
    detail::put(j, "M", cfg.m);
    detail::put(j, "samples", cfg.samples);
    detail::put(j, "k", cfg.k);
    detail::put(j, "c", cfg.c);
    detail::put(j, "s", cfg.s);
    detail::put(j, "t", cfg.t);
    detail::put(j, "width", cfg.width);
    detail::put(j, "norm_exponent", cfg.norm_exponent);
    detail::put(j, "delta_strategy", cfg.delta_strategy);
    detail::put(j, "eps_strategy", cfg.eps_strategy);
    detail::put(j, "eps_sign", cfg.eps_sign);
    detail::put(j, "mode", cfg.mode);
    detail::put(j, "backing", cfg.backing);
    if (cfg.eigen_thresholds) {
        j["eigen_thresholds"] = true;
    }
    if (cfg.dump_operator) {
        j["dump_operator"] = true;
    }
    return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json &j) {
    ExperimentConfig cfg;
    cfg.subcommand = j.at("subcommand").get<std::string>();
    cfg.circuit_path = j.value("circuit", std::string{});
    cfg.x = j.value("x", std::string{});
    detail::get(j, "seed", cfg.seed);
    detail::get(j, "eps", cfg.eps);
    detail::get(j, "delta", cfg.delta);
    detail::get(j, "M", cfg.m);
    detail::get(j, "samples", cfg.samples);
    detail::get(j, "k", cfg.k);
    detail::get(j, "c", cfg.c);
    detail::get(j, "s", cfg.s);
    detail::get(j, "t", cfg.t);
    detail::get(j, "width", cfg.width);
    detail::get(j, "norm_exponent", cfg.norm_exponent);
    detail::get(j, "delta_strategy", cfg.delta_strategy);
    detail::get(j, "eps_strategy", cfg.eps_strategy);
    detail::get(j, "eps_sign", cfg.eps_sign);
    detail::get(j, "mode", cfg.mode);
    detail::get(j, "backing", cfg.backing);
    cfg.eigen_thresholds = j.value("eigen_thresholds", false);
    cfg.dump_operator = j.value("dump_operator", false);
    return cfg;
}

/// Command line equivalent of a config, for re-running a recorded experiment.
inline std::vector<std::string> to_argv(const ExperimentConfig &cfg) {
    std::vector<std::string> argv{cfg.subcommand};
    if (!cfg.circuit_path.empty()) {
        argv.push_back(cfg.circuit_path);
    }
    auto flag = [&argv](const char *name, const auto &opt) {
        if (opt) {
            argv.emplace_back(name);
            std::ostringstream os;
            os.precision(17);
            os << *opt;
            argv.push_back(os.str());
        }
    };
    if (!cfg.x.empty()) {
        argv.emplace_back("--x");
        argv.push_back(cfg.x);
    }
    flag("--seed", cfg.seed);
    flag("--eps", cfg.eps);
    flag("--delta", cfg.delta);
    flag("--M", cfg.m);
    flag("--samples", cfg.samples);
    flag("--k", cfg.k);
    flag("--c", cfg.c);
    flag("--s", cfg.s);
    flag("--t", cfg.t);
    flag("--width", cfg.width);
    flag("--norm-exponent", cfg.norm_exponent);
    flag("--delta-strategy", cfg.delta_strategy);
    flag("--eps-strategy", cfg.eps_strategy);
    flag("--eps-sign", cfg.eps_sign);
    flag("--mode", cfg.mode);
    flag("--backing", cfg.backing);
    if (cfg.eigen_thresholds) {
        argv.emplace_back("--eigen-thresholds");
    }
    if (cfg.dump_operator) {
        argv.emplace_back("--dump-operator");
    }
    return argv;
}

namespace detail {

inline VerifierCircuit load_circuit(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw PreconditionError("cannot open circuit file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_circuit(text.str());
}

inline std::vector<bool> input_bits(const VerifierCircuit &c, const std::string &x) {
    return parse_bits(x, c.num_input(), "input string x");
}

template <class T>
T need(const std::optional<T> &v, const char *flag, const std::string &sub) {
    if (!v) {
        throw PreconditionError(sub + " requires " + flag);
    }
    return *v;
}

inline nlohmann::json record(const ExperimentConfig &cfg) {
    return {{"schema_version", kSchemaVersion},
            {"op", cfg.subcommand},
            {"config", to_json(cfg)}};
}

inline void add_circuit_fields(nlohmann::json &rec, const VerifierCircuit &c,
                               const ExperimentConfig &cfg) {
    rec["circuit_hash"] = circuit_hash(c);
    rec["x"] = cfg.x;
    rec["registers"] = {{"ancilla", c.num_ancilla()},
                        {"input", c.num_input()},
                        {"witness", c.num_witness()}};
    rec["t"] = c.gate_count();
    rec["h"] = c.hadamard_count();
}

inline nlohmann::json run_exact_count(const ExperimentConfig &cfg) {
    const auto circuit = load_circuit(cfg.circuit_path);
    const auto x = input_bits(circuit, cfg.x);
    const double c = need(cfg.c, "--c", cfg.subcommand);
    const double s = need(cfg.s, "--s", cfg.subcommand);
    const auto op = build_acceptance_operator(circuit, x);
    const auto range = exact_count_interval(op, c, s);
    auto rec = record(cfg);
    add_circuit_fields(rec, circuit, cfg);
    rec["N_geq_c"] = range.low;
    rec["N_geq_s"] = range.high;
    rec["N_interval"] = op.spectrum().count_interval(s, c);
    rec["partial_trace_interval"] = op.spectrum().partial_trace(s, c);
    rec["trace"] = op.trace();
    rec["normalized_trace"] = trace_normalized(op);
    rec["eigenvalues"] = op.eigenvalues();
    rec["dqc1"] = validate_dqc1(circuit);
    if (cfg.dump_operator) {
        rec["operator"] = operator_to_json(op);
    }
    return rec;
}

inline nlohmann::json run_estimate_trace(const ExperimentConfig &cfg) {
    const auto circuit = load_circuit(cfg.circuit_path);
    const auto x = input_bits(circuit, cfg.x);
    const auto m = need(cfg.m, "--M", cfg.subcommand);
    const auto seed = need(cfg.seed, "--seed", cfg.subcommand);
    const std::uint64_t k = cfg.k.value_or(1);
    auto rec = record(cfg);
    add_circuit_fields(rec, circuit, cfg);

    AdditiveEstimate est;
    if (cfg.c || cfg.s) {
        // Sample the amplified acceptance operator instead of the raw one.
        double c = need(cfg.c, "--c", cfg.subcommand);
        double s = need(cfg.s, "--s", cfg.subcommand);
        if (cfg.eigen_thresholds) {
            c = singular_threshold(c);
            s = singular_threshold(s);
        }
        const auto amp = amplified_acceptance(circuit, x, c, s, cfg.eps.value_or(0.01));
        const auto table = acceptance_table(amp.op);
        est = median_amplify(
            [&](std::uint64_t sub) { return sample_trace(table, circuit.num_witness(), m, sub); }, k,
            seed);
        rec["amplified"] = {{"degree", amp.degree}, {"lower", amp.lower}, {"upper", amp.upper}};
    } else if (k == 1) {
        est = quantum_trace_estimator(circuit, x, m, seed);
    } else {
        est = median_amplify(
            [&](std::uint64_t sub) { return quantum_trace_estimator(circuit, x, m, sub); }, k,
            seed);
    }
    rec["M"] = m;
    rec["k"] = k;
    rec["epsilon"] = est.epsilon;
    rec["delta"] = est.delta;
    rec["value"] = est.value;
    rec["normalization"] = est.normalization;
    rec["seed"] = seed;
    return rec;
}

inline nlohmann::json run_path_sum(const ExperimentConfig &cfg) {
    const auto circuit = load_circuit(cfg.circuit_path);
    const auto x = input_bits(circuit, cfg.x);
    const std::string mode = cfg.mode.value_or("exact");
    auto rec = record(cfg);
    add_circuit_fields(rec, circuit, cfg);
    rec["N_star_formula"] = path_bit_formula(circuit);
    if (mode == "exact") {
        const auto r = path_sum_exact(circuit, x);
        rec.update(to_json(r));
    } else if (mode == "sampled") {
        const auto seed = need(cfg.seed, "--seed", cfg.subcommand);
        const auto delta = cfg.delta.value_or(0.05);
        std::uint64_t samples = 0;
        if (cfg.samples) {
            samples = *cfg.samples;
        } else {
            samples = path_samples_for(need(cfg.eps, "--samples or --eps", cfg.subcommand), delta);
        }
        const auto est = path_sum_estimator(circuit, x, samples, seed, delta);
        rec["mode"] = "sampled";
        rec["h"] = circuit.hadamard_count();
        rec["N_star"] = path_bit_count(circuit);
        rec["trace"] = est.value;
        rec["normalization"] = est.normalization;
        rec["epsilon"] = est.epsilon;
        rec["delta"] = est.delta;
        rec["samples"] = est.samples;
        rec["seed"] = seed;
    } else {
        throw PreconditionError("--mode must be exact or sampled");
    }
    return rec;
}

inline nlohmann::json run_rect_poly(const ExperimentConfig &cfg) {
    const double t = need(cfg.t, "--t", cfg.subcommand);
    const double width = need(cfg.width, "--width", cfg.subcommand);
    const double eps = need(cfg.eps, "--eps", cfg.subcommand);
    const auto p = rect_poly(t, width, eps);
    auto rec = record(cfg);
    rec.update(to_json(p));
    rec["grid_check"] = to_json(p.check());
    return rec;
}

inline nlohmann::json run_svt_amplify(const ExperimentConfig &cfg) {
    const auto circuit = load_circuit(cfg.circuit_path);
    const auto x = input_bits(circuit, cfg.x);
    double c = need(cfg.c, "--c", cfg.subcommand);
    double s = need(cfg.s, "--s", cfg.subcommand);
    const double eps = need(cfg.eps, "--eps", cfg.subcommand);
    auto rec = record(cfg);
    add_circuit_fields(rec, circuit, cfg);
    if (cfg.eigen_thresholds) {
        c = singular_threshold(c);
        s = singular_threshold(s);
        rec["threshold_conversion"] = "eigenvalue->singular (sqrt)";
    }
    const auto u = build_block_encoding(circuit, x);
    const auto r = amplify(u, c, s, eps);
    const auto &sv = u.singular_values();
    rec["singular_values"] = std::vector<double>(sv.data(), sv.data() + sv.size());
    rec["amplified_eigenvalues"] = r.op.eigenvalues();
    rec["c_sv"] = c;
    rec["s_sv"] = s;
    rec["degree"] = r.degree;
    rec["N_geq_c"] = r.n_geq_c;
    rec["N_geq_s"] = r.n_geq_s;
    rec["in_gap"] = r.in_gap;
    rec["trace"] = r.trace;
    rec["lower"] = r.lower;
    rec["upper"] = r.upper;
    rec["sandwich_holds"] = r.sandwich_holds();
    return rec;
}

inline OracleConfig oracle_config(const ExperimentConfig &cfg, double default_eps) {
    OracleConfig oc;
    oc.delta = parse_delta_strategy(cfg.delta_strategy.value_or("zero"));
    oc.eps_strategy = parse_eps_strategy(cfg.eps_strategy.value_or("zero"));
    oc.eps = cfg.eps.value_or(default_eps);
    oc.eps_sign = cfg.eps_sign.value_or(1);
    const bool stochastic = oc.delta == DeltaStrategy::Random ||
                            oc.eps_strategy == EpsStrategy::Random ||
                            cfg.backing.value_or("exact") == "sampled";
    if (stochastic) {
        oc.seed = need(cfg.seed, "--seed", cfg.subcommand);
    } else {
        oc.seed = cfg.seed.value_or(0);
    }
    return oc;
}

inline nlohmann::json run_reduce_interval(const ExperimentConfig &cfg) {
    const auto circuit = load_circuit(cfg.circuit_path);
    const auto x = input_bits(circuit, cfg.x);
    const auto m = need(cfg.m, "--M", cfg.subcommand);
    qcount::detail::require(m >= 2, "--M must be >= 2");
    const auto oc = oracle_config(cfg, 1.0 / static_cast<double>(m));
    const std::string backing = cfg.backing.value_or("exact");
    std::optional<MiscountingOracle> oracle;
    if (backing == "exact") {
        oracle.emplace(MiscountingOracle::exact(circuit, x, oc));
    } else if (backing == "sampled") {
        oracle.emplace(MiscountingOracle::sampled(circuit, x, oc));
    } else {
        throw PreconditionError("--backing must be exact or sampled");
    }
    const auto r = interval_partition_trace(*oracle, m);
    auto rec = record(cfg);
    add_circuit_fields(rec, circuit, cfg);
    rec["M"] = m;
    rec["estimate"] = r.estimate;
    rec["bound"] = r.bound;
    rec["n_hat"] = r.n_hat;
    rec["range_violations"] = r.range_violations;
    if (r.exact_trace) {
        rec["exact_trace"] = *r.exact_trace;
        rec["error"] = *r.error();
        rec["within_bound"] = *r.error() <= r.bound + 1e-12;
    }
    if (cfg.c && cfg.s) {
        rec["decision"] = to_string(decide_by_reduction(r, *cfg.c, *cfg.s));
    }
    return rec;
}

inline nlohmann::json run_reduce_pad(const ExperimentConfig &cfg) {
    const auto circuit = load_circuit(cfg.circuit_path);
    const auto x = input_bits(circuit, cfg.x);
    const double c = need(cfg.c, "--c", cfg.subcommand);
    const double s = need(cfg.s, "--s", cfg.subcommand);
    const double exponent = cfg.norm_exponent.value_or(0.5);
    const auto oc = oracle_config(cfg, 0.0);
    const auto r = padding_reduction(circuit, x, exponent, c, s, oc);
    auto rec = record(cfg);
    add_circuit_fields(rec, circuit, cfg);
    rec["l"] = r.padding;
    rec["normalization"] = r.normalization;
    rec["error_bound"] = r.error_bound;
    rec["oracle_answer"] = r.raw;
    rec["scaled"] = r.scaled;
    rec["count"] = r.count;
    rec["N_geq_c"] = r.exact.low;
    rec["N_geq_s"] = r.exact.high;
    rec["in_range"] = r.in_range();
    return rec;
}

inline nlohmann::json run_decide(const ExperimentConfig &cfg) {
    const auto circuit = load_circuit(cfg.circuit_path);
    const auto x = input_bits(circuit, cfg.x);
    const double c = need(cfg.c, "--c", cfg.subcommand);
    const double s = need(cfg.s, "--s", cfg.subcommand);
    const auto seed = need(cfg.seed, "--seed", cfg.subcommand);
    const auto r = avg_accept_decider(circuit, x, c, s, seed, cfg.eps);
    auto rec = record(cfg);
    add_circuit_fields(rec, circuit, cfg);
    rec["decision"] = to_string(r.decision);
    rec["mean"] = r.mean;
    rec["epsilon"] = r.epsilon;
    rec["M"] = r.samples;
    rec["seed"] = seed;
    if (r.exact_normalized_trace) {
        rec["exact_normalized_trace"] = *r.exact_normalized_trace;
        rec["promise_violated"] = *r.promise_violated;
    }
    return rec;
}

inline nlohmann::json run_validate_dqc1(const ExperimentConfig &cfg) {
    const auto circuit = load_circuit(cfg.circuit_path);
    auto rec = record(cfg);
    add_circuit_fields(rec, circuit, cfg);
    rec["dqc1"] = validate_dqc1(circuit);
    return rec;
}

} // namespace detail

/// Execute one configured experiment and return its record.
inline nlohmann::json execute(const ExperimentConfig &cfg) {
    const auto &sub = cfg.subcommand;
    if (sub == "exact-count") {
        return detail::run_exact_count(cfg);
    }
    if (sub == "estimate-trace") {
        return detail::run_estimate_trace(cfg);
    }
    if (sub == "path-sum") {
        return detail::run_path_sum(cfg);
    }
    if (sub == "rect-poly") {
        return detail::run_rect_poly(cfg);
    }
    if (sub == "svt-amplify") {
        return detail::run_svt_amplify(cfg);
    }
    if (sub == "reduce-interval") {
        return detail::run_reduce_interval(cfg);
    }
    if (sub == "reduce-pad") {
        return detail::run_reduce_pad(cfg);
    }
    if (sub == "decide-avg-accept") {
        return detail::run_decide(cfg);
    }
    if (sub == "validate-dqc1") {
        return detail::run_validate_dqc1(cfg);
    }
    throw PreconditionError("unknown subcommand '" + sub + "'");
}

/// Parse arguments (without the program name) into a config.
inline ExperimentConfig parse_args(const std::vector<std::string> &args) {
    ExperimentConfig cfg;
    CLI::App app{"qcount: approximate counting workbench for verifier circuits"};
    app.require_subcommand(1);
    for (const auto &name : subcommands()) {
        auto *sub = app.add_subcommand(name);
        if (name != "rect-poly") {
            sub->add_option("circuit", cfg.circuit_path, "qcv v1 circuit file")->required();
            sub->add_option("--x", cfg.x, "input bit string");
        }
        sub->add_option("--seed", cfg.seed, "RNG seed (u64)");
        sub->add_option("--eps", cfg.eps, "precision / polynomial accuracy / oracle eps");
        sub->add_option("--delta", cfg.delta, "failure probability");
        sub->add_option("--M", cfg.m, "sample count or partition size");
        sub->add_option("--samples", cfg.samples, "path samples");
        sub->add_option("--k", cfg.k, "median repetitions");
        sub->add_option("--c", cfg.c, "completeness threshold");
        sub->add_option("--s", cfg.s, "soundness threshold");
        sub->add_option("--t", cfg.t, "polynomial threshold");
        sub->add_option("--width", cfg.width, "polynomial half-width");
        sub->add_option("--norm-exponent", cfg.norm_exponent, "padding normalization exponent");
        sub->add_option("--delta-strategy", cfg.delta_strategy, "zero|max|random")
            ->check(CLI::IsMember({"zero", "max", "random"}));
        sub->add_option("--eps-strategy", cfg.eps_strategy, "zero|adversarial|random")
            ->check(CLI::IsMember({"zero", "adversarial", "random"}));
        sub->add_option("--eps-sign", cfg.eps_sign, "+1 or -1 for adversarial eps")
            ->check(CLI::IsMember({1, -1}));
        sub->add_option("--mode", cfg.mode, "exact|sampled")
            ->check(CLI::IsMember({"exact", "sampled"}));
        sub->add_option("--backing", cfg.backing, "exact|sampled")
            ->check(CLI::IsMember({"exact", "sampled"}));
        sub->add_flag("--eigen-thresholds", cfg.eigen_thresholds,
                      "interpret --c/--s as eigenvalue thresholds (sqrt to singular values)");
        sub->add_flag("--dump-operator", cfg.dump_operator, "include the operator matrix");
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    cfg.subcommand = app.get_subcommands().front()->get_name();
    return cfg;
}

/// Full CLI entry point; returns the process exit code.
inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    if (args.empty() || args.front() == "--help" || args.front() == "-h") {
        err << "usage: qcount <subcommand> [circuit.qcv] [flags]\nsubcommands:";
        for (const auto &s : subcommands()) {
            err << ' ' << s;
        }
        err << '\n';
        return args.empty() ? 1 : 0;
    }
    if (std::find(subcommands().begin(), subcommands().end(), args.front()) == subcommands().end()) {
        err << "qcount: unknown subcommand '" << args.front() << "'\n";
        return 1;
    }
    ExperimentConfig cfg;
    try {
        cfg = parse_args(args);
    } catch (const CLI::CallForHelp &) {
        err << "see qcount --help\n";
        return 0;
    } catch (const CLI::ParseError &e) {
        err << "qcount: " << e.what() << '\n';
        return 1;
    }
    try {
        out << execute(cfg).dump() << '\n';
        return 0;
    } catch (const PreconditionError &e) {
        err << "qcount: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception &e) {
        err << "qcount: " << e.what() << '\n';
        return 2;
    } catch (const InvariantError &e) {
        err << "qcount: invariant violated: " << e.what() << '\n';
        return 3;
    }
}

} // namespace qcount::cli
