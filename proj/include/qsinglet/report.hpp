#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qsinglet/entanglement.hpp"
#include "qsinglet/errors.hpp"
#include "qsinglet/hubbard.hpp"
#include "qsinglet/measurement.hpp"
#include "qsinglet/network.hpp"
#include "qsinglet/perm_hamiltonian.hpp"
#include "qsinglet/singlet.hpp"
#include "qsinglet/verify.hpp"

namespace qsinglet {

using Json = nlohmann::json;

struct RunReport {
    std::string command;
    Json params;
    Json results;
    bool pass = false;
    double wall_time_ms = 0.0;
};

inline Json report_to_json(const RunReport& report) {
    return Json{{"command", report.command},     {"params", report.params},
                {"results", report.results},     {"pass", report.pass},
                {"wall_time_ms", report.wall_time_ms}, {"artifact_version", "1.0.0"}};
}

namespace detail {

inline void require_known_keys(const Json& params, const std::vector<std::string>& allowed) {
    if (!params.is_object()) throw ValidationError("parameters must be a JSON object");
    for (const auto& item : params.items())
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ValidationError("unknown parameter key: " + item.key());
}

inline long long get_int(const Json& params, const std::string& key,
                         std::optional<long long> fallback = std::nullopt) {
    if (!params.contains(key)) {
        if (fallback) return *fallback;
        throw ValidationError("missing required parameter: " + key);
    }
    if (!params[key].is_number_integer())
        throw ValidationError("parameter must be an integer: " + key);
    return params[key].get<long long>();
}

inline double get_double(const Json& params, const std::string& key,
                         std::optional<double> fallback = std::nullopt) {
    if (!params.contains(key)) {
        if (fallback) return *fallback;
        throw ValidationError("missing required parameter: " + key);
    }
    if (!params[key].is_number())
        throw ValidationError("parameter must be a number: " + key);
    return params[key].get<double>();
}

inline std::string get_string(const Json& params, const std::string& key,
                              std::optional<std::string> fallback = std::nullopt) {
    if (!params.contains(key)) {
        if (fallback) return *fallback;
        throw ValidationError("missing required parameter: " + key);
    }
    if (!params[key].is_string())
        throw ValidationError("parameter must be a string: " + key);
    return params[key].get<std::string>();
}

inline std::vector<int> get_int_list(const Json& params, const std::string& key) {
    if (!params.contains(key)) throw ValidationError("missing required parameter: " + key);
    if (!params[key].is_array()) throw ValidationError("parameter must be an array: " + key);
    std::vector<int> values;
    for (const auto& element : params[key]) {
        if (!element.is_number_integer())
            throw ValidationError("parameter must hold integers: " + key);
        values.push_back(element.get<int>());
    }
    return values;
}

inline bool all_assertions_hold(const Json& assertions) {
    for (const auto& item : assertions.items())
        if (!item.value().get<bool>()) return false;
    return true;
}

inline double log2_binomial(int n, int k) {
    double binomial = 1.0;
    for (int i = 0; i < k; ++i) binomial = binomial * (n - i) / (i + 1);
    return std::log2(binomial);
}

inline std::int64_t binomial(int n, int k) {
    double value = 1.0;
    for (int i = 0; i < k; ++i) value = value * (n - i) / (i + 1);
    return static_cast<std::int64_t>(std::llround(value));
}

inline QuditNetwork network_from_params(const Json& params, std::uint64_t seed, int* n_out,
                                        std::string* topology_out) {
    const std::string topology = get_string(
        params, "topology",
        params.contains("network") ? std::string("file") : std::string("chain"));
    *topology_out = topology;
    if (topology == "file") {
        if (!params.contains("network"))
            throw ValidationError("topology 'file' needs the network parameter");
        QuditNetwork net = parse_network(params["network"].dump());
        if (params.contains("n") && get_int(params, "n") != net.num_vertices)
            throw ValidationError("n conflicts with the supplied network");
        *n_out = net.num_vertices;
        return net;
    }
    if (params.contains("network"))
        throw ValidationError("network parameter requires topology 'file'");
    if (topology != "chain" && topology != "ring" && topology != "star" &&
        topology != "complete")
        throw ValidationError("unknown topology: " + topology);
    const int n = static_cast<int>(get_int(params, "n"));
    if (n < 2) throw ValidationError("n must be at least 2");
    *n_out = n;
    return make_topology(topology_from_name(topology), n, 1.0, seed);
}

inline CascadePolicy policy_from_name(const std::string& name) {
    if (name == "restricted") return CascadePolicy::restricted_random;
    if (name == "arbitrary") return CascadePolicy::arbitrary_random;
    if (name == "fixed") return CascadePolicy::fixed_basis;
    throw ValidationError("unknown policy: " + name);
}

// ---- per-command runners; each fills params (resolved), results, pass ----

inline RunReport run_ground_state(const Json& raw) {
    require_known_keys(raw, {"topology", "n", "d", "seed", "tol", "network"});
    RunReport report;
    report.command = "ground-state";

    const std::uint64_t seed = static_cast<std::uint64_t>(get_int(raw, "seed", 0));
    int n = 0;
    std::string topology;
    const QuditNetwork net = network_from_params(raw, seed, &n, &topology);
    const int d = static_cast<int>(get_int(raw, "d", n));
    if (d < 2) throw ValidationError("d must be at least 2");
    const double tol = get_double(raw, "tol", 1e-8);
    if (tol <= 0.0) throw ValidationError("tol must be positive");

    report.params = Json{{"topology", topology},
                         {"network", Json::parse(serialize_network(net))},
                         {"n", n},
                         {"d", d},
                         {"seed", seed},
                         {"tol", tol}};

    GroundStateOptions options;
    options.seed = seed;
    const SpectrumResult spectrum = ground_state(net, d, 3, tol, options);
    const double expected = -net.coupling_sum();
    const double rel_error =
        std::abs(spectrum.lowest_energies.front() - expected) / std::abs(expected);

    Json assertions;
    Json results;
    results["energy"] = spectrum.lowest_energies.front();
    results["lowest_energies"] = spectrum.lowest_energies;
    results["degeneracy"] = spectrum.degeneracy;
    results["degeneracy_certified"] = spectrum.degeneracy_certified;
    results["gap"] = spectrum.gap;
    if (d == n) {
        const double fidelity =
            fidelity_up_to_phase(spectrum.ground_state, build_full_singlet(n));
        results["expected_energy"] = expected;
        results["relative_energy_error"] = rel_error;
        results["singlet_fidelity"] = fidelity;
        assertions["energy_matches"] = rel_error <= tol;
        assertions["unique_ground_state"] =
            spectrum.degeneracy == 1 && spectrum.degeneracy_certified;
        assertions["singlet_fidelity_ok"] = fidelity >= 1.0 - tol;
    } else {
        // no uniqueness claim away from d == n; the energy lower bound still holds
        assertions["energy_respects_bound"] =
            spectrum.lowest_energies.front() >= expected - tol * std::abs(expected);
    }
    results["assertions"] = assertions;
    report.results = results;
    report.pass = all_assertions_hold(assertions);
    return report;
}

inline RunReport run_measure_cascade(const Json& raw) {
    require_known_keys(raw, {"n", "m", "policy", "trials", "seed"});
    RunReport report;
    report.command = "measure-cascade";

    const int n = static_cast<int>(get_int(raw, "n"));
    const int m = static_cast<int>(get_int(raw, "m"));
    const std::string policy_name = get_string(raw, "policy", std::string("restricted"));
    const int trials = static_cast<int>(get_int(raw, "trials", 20));
    const std::uint64_t seed = static_cast<std::uint64_t>(get_int(raw, "seed", 0));
    if (n < 2) throw ValidationError("n must be at least 2");
    if (m < 1 || m >= n) throw ValidationError("m must satisfy 1 <= m < n");
    if (trials < 1) throw ValidationError("trials must be positive");
    const CascadePolicy policy = policy_from_name(policy_name);

    report.params =
        Json{{"n", n}, {"m", m}, {"policy", policy_name}, {"trials", trials}, {"seed", seed}};

    std::vector<int> sites;
    for (int site = 1; site <= m; ++site) sites.push_back(site);
    Rng rng(seed);

    Json rows = Json::array();
    double min_fidelity = 1.0;
    double max_antisymmetry = 0.0;
    double entropy_low = 1e300;
    double entropy_high = -1e300;
    const bool has_entropy = n - m >= 2;
    for (int trial = 0; trial < trials; ++trial) {
        const MeasurementRecord record = cascade(n, sites, policy, rng);
        Json row;
        row["trial"] = trial;
        row["outcomes"] = record.observed_levels;
        if (policy == CascadePolicy::arbitrary_random) {
            const double deviation = antisymmetry_deviation(record.final_state);
            row["antisymmetry_deviation"] = deviation;
            max_antisymmetry = std::max(max_antisymmetry, deviation);
        } else {
            const double fidelity = remaining_singlet_fidelity(record);
            row["fidelity"] = fidelity;
            min_fidelity = std::min(min_fidelity, fidelity);
        }
        if (has_entropy) {
            const double entropy = block_entropy(record.final_state, {1});
            row["entropy_bits"] = entropy;
            entropy_low = std::min(entropy_low, entropy);
            entropy_high = std::max(entropy_high, entropy);
        }
        rows.push_back(std::move(row));
    }

    Json assertions;
    Json results;
    results["trials"] = rows;
    if (policy == CascadePolicy::arbitrary_random) {
        results["max_antisymmetry_deviation"] = max_antisymmetry;
        assertions["residual_antisymmetric"] = max_antisymmetry <= 1e-9;
    } else {
        results["min_fidelity"] = min_fidelity;
        assertions["residual_is_singlet"] = min_fidelity >= 1.0 - 1e-9;
    }
    if (has_entropy) {
        const double expected_entropy = std::log2(static_cast<double>(n - m));
        results["entropy_expected"] = expected_entropy;
        results["entropy_min"] = entropy_low;
        results["entropy_max"] = entropy_high;
        results["entropy_spread"] = entropy_high - entropy_low;
        assertions["entropy_spread_tight"] = entropy_high - entropy_low <= 1e-8;
        if (policy != CascadePolicy::arbitrary_random)
            assertions["entropy_matches"] =
                std::abs(entropy_high - expected_entropy) <= 1e-8 &&
                std::abs(entropy_low - expected_entropy) <= 1e-8;
    }
    results["assertions"] = assertions;
    report.results = results;
    report.pass = all_assertions_hold(assertions);
    return report;
}

inline RunReport run_block_entropy(const Json& raw) {
    require_known_keys(raw, {"n", "l", "rank_tol", "seed"});
    RunReport report;
    report.command = "block-entropy";

    const int n = static_cast<int>(get_int(raw, "n"));
    const int l = static_cast<int>(get_int(raw, "l"));
    const double rank_tol = get_double(raw, "rank_tol", kDefaultRankTolerance);
    const std::uint64_t seed = static_cast<std::uint64_t>(get_int(raw, "seed", 0));
    if (n < 2) throw ValidationError("n must be at least 2");
    if (l < 1 || l >= n) throw ValidationError("l must satisfy 1 <= l < n");
    if (rank_tol <= 0.0) throw ValidationError("rank_tol must be positive");

    report.params = Json{{"n", n}, {"l", l}, {"rank_tol", rank_tol}, {"seed", seed}};

    const StateVector singlet = build_full_singlet(n);
    std::vector<int> block;
    for (int site = 1; site <= l; ++site) block.push_back(site);
    const SchmidtResult cut = schmidt(singlet, make_bipartition(block, n), rank_tol);
    const double entropy = entropy_bits(cut.coefficients);
    const double expected = log2_binomial(n, l);

    Json assertions;
    assertions["entropy_matches"] = std::abs(entropy - expected) <= 1e-8;
    assertions["rank_matches"] = cut.rank == binomial(n, l);

    report.results = Json{{"entropy_bits", entropy},
                          {"expected_entropy_bits", expected},
                          {"schmidt_rank", cut.rank},
                          {"expected_rank", binomial(n, l)},
                          {"assertions", assertions}};
    report.pass = all_assertions_hold(assertions);
    return report;
}

inline RunReport run_localize(const Json& raw) {
    require_known_keys(raw, {"n", "block_a", "block_b", "trials", "seed", "rank_tol"});
    RunReport report;
    report.command = "localize";

    const int n = static_cast<int>(get_int(raw, "n"));
    const std::vector<int> block_a = get_int_list(raw, "block_a");
    const std::vector<int> block_b = get_int_list(raw, "block_b");
    const int trials = static_cast<int>(get_int(raw, "trials", 20));
    const std::uint64_t seed = static_cast<std::uint64_t>(get_int(raw, "seed", 0));
    if (n < 3) throw ValidationError("n must be at least 3");
    if (trials < 1) throw ValidationError("trials must be positive");
    if (block_a.size() + block_b.size() >= static_cast<std::size_t>(n))
        throw ValidationError("blocks must leave at least one site to measure");

    report.params = Json{{"n", n},         {"block_a", block_a}, {"block_b", block_b},
                         {"trials", trials}, {"seed", seed}};

    const int kept = static_cast<int>(block_a.size() + block_b.size());
    const std::int64_t expected_rank = binomial(kept, static_cast<int>(block_a.size()));
    const double expected_entropy = log2_binomial(kept, static_cast<int>(block_a.size()));

    Rng rng(seed);
    Json rows = Json::array();
    bool ranks_ok = true;
    double worst_entropy_error = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const LocalizeTrial outcome = localisable_experiment(n, block_a, block_b, rng);
        ranks_ok = ranks_ok && outcome.schmidt_rank == expected_rank;
        worst_entropy_error =
            std::max(worst_entropy_error, std::abs(outcome.entropy - expected_entropy));
        rows.push_back(Json{{"trial", trial},
                            {"schmidt_rank", outcome.schmidt_rank},
                            {"entropy_bits", outcome.entropy},
                            {"outcomes", outcome.record.observed_levels}});
    }

    Json assertions;
    assertions["rank_matches"] = ranks_ok;
    assertions["entropy_matches"] = worst_entropy_error <= 1e-8;

    report.results = Json{{"trials", rows},
                          {"expected_rank", expected_rank},
                          {"expected_entropy_bits", expected_entropy},
                          {"worst_entropy_error", worst_entropy_error},
                          {"assertions", assertions}};
    report.pass = all_assertions_hold(assertions);
    return report;
}

inline RunReport run_persistency(const Json& raw) {
    require_known_keys(raw, {"state", "n", "budget", "trials", "seed", "rank_tol"});
    RunReport report;
    report.command = "persistency";

    const std::string state_name = get_string(raw, "state", std::string("singlet"));
    const int n = static_cast<int>(get_int(raw, "n"));
    const long budget = static_cast<long>(get_int(raw, "budget", 2'000'000));
    const int trials = static_cast<int>(get_int(raw, "trials", 20));
    const std::uint64_t seed = static_cast<std::uint64_t>(get_int(raw, "seed", 0));
    if (n < 2) throw ValidationError("n must be at least 2");
    if (budget < 1) throw ValidationError("budget must be positive");
    if (trials < 1) throw ValidationError("trials must be positive");

    report.params = Json{{"state", state_name}, {"n", n},       {"budget", budget},
                         {"trials", trials},    {"seed", seed}};

    StateVector state;
    int expected = 0;
    if (state_name == "singlet") {
        state = build_full_singlet(n);
        expected = n - 1;
    } else if (state_name == "ghz") {
        state = ghz_state(n);
        expected = 1;
    } else if (state_name == "w") {
        state = w_state(n);
        expected = n - 1;
    } else if (state_name == "cluster") {
        state = cluster_state_1d(n);
        expected = n / 2;
    } else {
        throw ValidationError("unknown state: " + state_name);
    }

    Rng rng(seed);
    const std::vector<Matrix> dictionary = default_dictionary(state.local_dim, 8, rng);

    Json assertions;
    Json results;
    if (state_name == "singlet") {
        const PersistencyReport persistency =
            singlet_persistency_report(n, dictionary, budget, trials, rng);
        results["upper_bound"] = persistency.upper_bound;
        results["certified_floor"] = persistency.certified_floor;
        results["evaluations"] = persistency.evaluations;
        if (n > 2) results["certificate_min_rank"] = persistency.min_rank_seen;
        assertions["upper_bound_matches"] = persistency.upper_bound == expected;
        assertions["floor_meets_bound"] = persistency.certified_floor == persistency.upper_bound;
        if (n > 2) assertions["residuals_entangled"] = persistency.min_rank_seen >= 2;
    } else {
        const PersistencyBound bound = persistency_upper_bound(state, dictionary, budget);
        results["upper_bound"] = bound.upper_bound;
        results["evaluations"] = bound.evaluations;
        assertions["upper_bound_matches"] = bound.upper_bound == expected;
    }
    results["expected"] = expected;
    results["assertions"] = assertions;
    report.results = results;
    report.pass = all_assertions_hold(assertions);
    return report;
}

inline RunReport run_hubbard_check(const Json& raw) {
    require_known_keys(raw, {"d", "t", "u", "seed"});
    RunReport report;
    report.command = "hubbard-check";

    const int d = static_cast<int>(get_int(raw, "d"));
    const double t = get_double(raw, "t");
    const double u = get_double(raw, "u");
    const std::uint64_t seed = static_cast<std::uint64_t>(get_int(raw, "seed", 0));
    if (d < 2 || d > 4) throw ValidationError("d must be 2, 3, or 4");
    if (t <= 0.0 || u <= 0.0) throw ValidationError("t and U must be positive");

    report.params = Json{{"d", d}, {"t", t}, {"u", u}, {"seed", seed}};

    const QuditNetwork net = make_topology(Topology::chain, d, 1.0);
    const EffectiveComparison comparison = compare_effective(net, t, u);
    const double tolerance = 16.0 * (t / u) * (t / u);

    Json assertions;
    assertions["spacings_match"] = comparison.max_relative_gap_error <= tolerance;

    report.results = Json{{"j_expected", comparison.j_expected},
                          {"hubbard_low_levels", comparison.hubbard_low_levels},
                          {"effective_levels", comparison.effective_levels},
                          {"manifold_separation", comparison.manifold_separation},
                          {"max_relative_gap_error", comparison.max_relative_gap_error},
                          {"tolerance", tolerance},
                          {"assertions", assertions}};
    report.pass = all_assertions_hold(assertions);
    return report;
}

inline RunReport run_verify_all(const Json& raw) {
    require_known_keys(raw, {"level", "seed"});
    RunReport report;
    report.command = "verify-all";

    const std::string level = get_string(raw, "level", std::string("quick"));
    const std::uint64_t seed = static_cast<std::uint64_t>(get_int(raw, "seed", 0));
    if (level != "quick" && level != "full") throw ValidationError("level must be quick or full");

    report.params = Json{{"level", level}, {"seed", seed}};

    const std::vector<CheckResult> checks =
        run_verification(seed, level == "quick" ? VerifyLevel::quick : VerifyLevel::full);
    Json rows = Json::array();
    bool all_pass = true;
    for (const CheckResult& check : checks) {
        rows.push_back(Json{{"name", check.name}, {"pass", check.pass}, {"detail", check.detail}});
        all_pass = all_pass && check.pass;
    }
    report.results = Json{{"checks", rows}, {"all_pass", all_pass}};
    report.pass = all_pass;
    return report;
}

}  // namespace detail

inline RunReport run_scenario(const std::string& command, const Json& params) {
    if (command == "ground-state") return detail::run_ground_state(params);
    if (command == "measure-cascade") return detail::run_measure_cascade(params);
    if (command == "block-entropy") return detail::run_block_entropy(params);
    if (command == "localize") return detail::run_localize(params);
    if (command == "persistency") return detail::run_persistency(params);
    if (command == "hubbard-check") return detail::run_hubbard_check(params);
    if (command == "verify-all") return detail::run_verify_all(params);
    throw ValidationError("unknown command: " + command);
}

// CSV emission for the sweep commands; one row per trial.
inline std::string report_to_csv(const RunReport& report) {
    std::ostringstream out;
    if (report.command == "measure-cascade") {
        const bool arbitrary = report.results.contains("max_antisymmetry_deviation");
        out << (arbitrary ? "trial,antisymmetry_deviation,entropy_bits\n"
                          : "trial,fidelity,entropy_bits\n");
        for (const auto& row : report.results["trials"]) {
            out << row["trial"].get<int>() << ',';
            if (arbitrary)
                out << row["antisymmetry_deviation"].dump();
            else
                out << row["fidelity"].dump();
            out << ',';
            out << (row.contains("entropy_bits") ? row["entropy_bits"].dump() : "");
            out << '\n';
        }
        return out.str();
    }
    if (report.command == "localize") {
        out << "trial,schmidt_rank,entropy_bits\n";
        for (const auto& row : report.results["trials"])
            out << row["trial"].get<int>() << ',' << row["schmidt_rank"].get<int>() << ','
                << row["entropy_bits"].dump() << '\n';
        return out.str();
    }
    throw ValidationError("csv output is only available for measure-cascade and localize");
}

}  // namespace qsinglet
