#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qsinglet/report.hpp"

namespace {

using qsinglet::Json;

Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qsinglet::ValidationError("cannot open config file: " + path);
    try {
        Json config = Json::parse(in);
        if (!config.is_object())
            throw qsinglet::ValidationError("config file must hold a JSON object");
        return config;
    } catch (const Json::parse_error& error) {
        throw qsinglet::ValidationError(std::string("config file is not valid JSON: ") +
                                        error.what());
    }
}

Json load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qsinglet::ValidationError("cannot open network file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return Json::parse(buffer.str());
    } catch (const Json::parse_error& error) {
        throw qsinglet::ValidationError(std::string("network file is not valid JSON: ") +
                                        error.what());
    }
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw qsinglet::ValidationError("cannot open output file: " + out_path);
    out << text;
}

int emit_error(const std::string& out_path, const std::string& type,
               const std::string& message, int code) {
    const Json error = Json{{"error", Json{{"type", type}, {"message", message}}}};
    try {
        write_output(out_path, error.dump(2) + "\n");
    } catch (const std::exception&) {
        std::cout << error.dump(2) << "\n";
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-level multi-party singlet toolbox"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format = "json";
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path,
                        "JSON file with parameters; explicit flags override it");
        sub->add_option("--out", out_path, "write the report to this file instead of stdout");
        sub->add_option("--format", format, "json or csv (csv for sweep commands only)")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    std::int64_t arg_n = 0, arg_d = 0, arg_m = 0, arg_l = 0, arg_seed = 0, arg_trials = 0,
                 arg_budget = 0;
    double arg_tol = 0.0, arg_rank_tol = 0.0, arg_t = 0.0, arg_u = 0.0;
    std::string arg_topology, arg_network, arg_policy, arg_state, arg_level;
    std::vector<int> arg_block_a, arg_block_b;

    CLI::App* ground = app.add_subcommand("ground-state",
                                          "lowest levels of the permutation Hamiltonian");
    auto* o_topology = ground->add_option("--topology", arg_topology,
                                          "chain|ring|star|complete|file");
    auto* o_gs_n = ground->add_option("--n", arg_n, "number of qudits");
    auto* o_gs_d = ground->add_option("--d", arg_d, "levels per qudit (default n)");
    auto* o_gs_seed = ground->add_option("--seed", arg_seed, "random seed");
    auto* o_gs_tol = ground->add_option("--tol", arg_tol, "relative energy tolerance");
    auto* o_network = ground->add_option("--network", arg_network,
                                         "network JSON file (with --topology file)");
    add_common(ground);

    CLI::App* cascade_cmd = app.add_subcommand("measure-cascade",
                                               "sequential single-site measurements");
    auto* o_mc_n = cascade_cmd->add_option("--n", arg_n, "number of parties");
    auto* o_mc_m = cascade_cmd->add_option("--m", arg_m, "measurements per cascade");
    auto* o_policy = cascade_cmd->add_option("--policy", arg_policy,
                                             "restricted|arbitrary|fixed");
    auto* o_mc_trials = cascade_cmd->add_option("--trials", arg_trials, "cascade count");
    auto* o_mc_seed = cascade_cmd->add_option("--seed", arg_seed, "random seed");
    add_common(cascade_cmd);

    CLI::App* entropy_cmd = app.add_subcommand("block-entropy",
                                               "entanglement entropy of a leading block");
    auto* o_be_n = entropy_cmd->add_option("--n", arg_n, "number of parties");
    auto* o_be_l = entropy_cmd->add_option("--l", arg_l, "block size");
    auto* o_be_rank_tol = entropy_cmd->add_option("--rank-tol", arg_rank_tol,
                                                  "Schmidt rank tolerance");
    auto* o_be_seed = entropy_cmd->add_option("--seed", arg_seed, "random seed");
    add_common(entropy_cmd);

    CLI::App* localize_cmd = app.add_subcommand("localize",
                                                "entanglement localized onto two blocks");
    auto* o_lo_n = localize_cmd->add_option("--n", arg_n, "number of parties");
    auto* o_block_a = localize_cmd->add_option("--block-a", arg_block_a, "sites, e.g. 1,2")
                          ->delimiter(',');
    auto* o_block_b = localize_cmd->add_option("--block-b", arg_block_b, "sites, e.g. 3,4")
                          ->delimiter(',');
    auto* o_lo_trials = localize_cmd->add_option("--trials", arg_trials, "trial count");
    auto* o_lo_seed = localize_cmd->add_option("--seed", arg_seed, "random seed");
    auto* o_lo_rank_tol = localize_cmd->add_option("--rank-tol", arg_rank_tol,
                                                   "Schmidt rank tolerance");
    add_common(localize_cmd);

    CLI::App* persistency_cmd = app.add_subcommand("persistency",
                                                   "measurements needed to disentangle");
    auto* o_state = persistency_cmd->add_option("--state", arg_state,
                                                "singlet|ghz|w|cluster");
    auto* o_pe_n = persistency_cmd->add_option("--n", arg_n, "number of parties");
    auto* o_budget = persistency_cmd->add_option("--budget", arg_budget,
                                                 "search evaluation budget");
    auto* o_pe_trials = persistency_cmd->add_option("--trials", arg_trials,
                                                    "certificate trials per level");
    auto* o_pe_seed = persistency_cmd->add_option("--seed", arg_seed, "random seed");
    add_common(persistency_cmd);

    CLI::App* hubbard_cmd = app.add_subcommand("hubbard-check",
                                               "superexchange reduction comparison");
    auto* o_hc_d = hubbard_cmd->add_option("--d", arg_d, "species = sites (2, 3, or 4)");
    auto* o_hc_t = hubbard_cmd->add_option("--t", arg_t, "hopping amplitude");
    auto* o_hc_u = hubbard_cmd->add_option("--u", arg_u, "on-site repulsion");
    add_common(hubbard_cmd);

    CLI::App* verify_cmd = app.add_subcommand("verify-all", "run every theorem check");
    auto* o_level = verify_cmd->add_option("--level", arg_level, "quick|full");
    auto* o_va_seed = verify_cmd->add_option("--seed", arg_seed, "random seed");
    add_common(verify_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        if (error.get_exit_code() == 0) return app.exit(error);
        return emit_error(out_path, "validation", error.what(), 2);
    }

    try {
        Json params = config_path.empty() ? Json::object() : load_config(config_path);
        std::string command;

        if (ground->parsed()) {
            command = "ground-state";
            if (o_topology->count()) params["topology"] = arg_topology;
            if (o_gs_n->count()) params["n"] = arg_n;
            if (o_gs_d->count()) params["d"] = arg_d;
            if (o_gs_seed->count()) params["seed"] = arg_seed;
            if (o_gs_tol->count()) params["tol"] = arg_tol;
            if (o_network->count()) params["network"] = load_network_file(arg_network);
        } else if (cascade_cmd->parsed()) {
            command = "measure-cascade";
            if (o_mc_n->count()) params["n"] = arg_n;
            if (o_mc_m->count()) params["m"] = arg_m;
            if (o_policy->count()) params["policy"] = arg_policy;
            if (o_mc_trials->count()) params["trials"] = arg_trials;
            if (o_mc_seed->count()) params["seed"] = arg_seed;
        } else if (entropy_cmd->parsed()) {
            command = "block-entropy";
            if (o_be_n->count()) params["n"] = arg_n;
            if (o_be_l->count()) params["l"] = arg_l;
            if (o_be_rank_tol->count()) params["rank_tol"] = arg_rank_tol;
            if (o_be_seed->count()) params["seed"] = arg_seed;
        } else if (localize_cmd->parsed()) {
            command = "localize";
            if (o_lo_n->count()) params["n"] = arg_n;
            if (o_block_a->count()) params["block_a"] = arg_block_a;
            if (o_block_b->count()) params["block_b"] = arg_block_b;
            if (o_lo_trials->count()) params["trials"] = arg_trials;
            if (o_lo_seed->count()) params["seed"] = arg_seed;
            if (o_lo_rank_tol->count()) params["rank_tol"] = arg_rank_tol;
        } else if (persistency_cmd->parsed()) {
            command = "persistency";
            if (o_state->count()) params["state"] = arg_state;
            if (o_pe_n->count()) params["n"] = arg_n;
            if (o_budget->count()) params["budget"] = arg_budget;
            if (o_pe_trials->count()) params["trials"] = arg_trials;
            if (o_pe_seed->count()) params["seed"] = arg_seed;
        } else if (hubbard_cmd->parsed()) {
            command = "hubbard-check";
            if (o_hc_d->count()) params["d"] = arg_d;
            if (o_hc_t->count()) params["t"] = arg_t;
            if (o_hc_u->count()) params["u"] = arg_u;
        } else if (verify_cmd->parsed()) {
            command = "verify-all";
            if (o_level->count()) params["level"] = arg_level;
            if (o_va_seed->count()) params["seed"] = arg_seed;
        }

        const auto started = std::chrono::steady_clock::now();
        qsinglet::RunReport report = qsinglet::run_scenario(command, params);
        const auto finished = std::chrono::steady_clock::now();
        report.wall_time_ms =
            std::chrono::duration<double, std::milli>(finished - started).count();

        if (format == "csv")
            write_output(out_path, qsinglet::report_to_csv(report));
        else
            write_output(out_path, qsinglet::report_to_json(report).dump(2) + "\n");
        return report.pass ? 0 : 1;
    } catch (const qsinglet::ConvergenceError& error) {
        return emit_error(out_path, "convergence", error.what(), 3);
    } catch (const qsinglet::RegimeError& error) {
        return emit_error(out_path, "regime", error.what(), 3);
    } catch (const qsinglet::BudgetError& error) {
        return emit_error(out_path, "budget", error.what(), 3);
    } catch (const qsinglet::NumericalError& error) {
        return emit_error(out_path, "numerical", error.what(), 3);
    } catch (const qsinglet::ValidationError& error) {
        return emit_error(out_path, "validation", error.what(), 2);
    } catch (const std::invalid_argument& error) {  // Domain/Precondition fall here
        return emit_error(out_path, "validation", error.what(), 2);
    } catch (const Json::exception& error) {
        return emit_error(out_path, "validation", error.what(), 2);
    } catch (const std::exception& error) {
        return emit_error(out_path, "internal", error.what(), 3);
    }
}
