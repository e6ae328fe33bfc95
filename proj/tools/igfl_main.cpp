#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "igfl/experiment.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

struct CommonOpts {
    std::string config_path;
    std::string algo, out_dir, seed, rounds;
    std::vector<std::string> overrides;  // key=value
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "flat key=value config file");
    cmd->add_option("--algo", o.algo, "algorithm override");
    cmd->add_option("--rounds", o.rounds, "round count override");
    cmd->add_option("--seed", o.seed, "seed override");
    cmd->add_option("--out", o.out_dir, "output directory override");
    cmd->add_option("--set", o.overrides, "extra key=value override (repeatable)");
}

igfl::RunConfig build_config(const CommonOpts& o) {
    igfl::RunConfig cfg;
    if (!o.config_path.empty()) igfl::apply_kv(cfg, igfl::read_kv_file(o.config_path));

    std::map<std::string, std::string> kv;
    for (const std::string& ov : o.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + ov + "'");
        kv[ov.substr(0, eq)] = ov.substr(eq + 1);
    }
    if (!o.algo.empty()) kv["algorithm"] = o.algo;
    if (!o.rounds.empty()) kv["rounds"] = o.rounds;
    if (!o.seed.empty()) kv["seed"] = o.seed;
    if (!o.out_dir.empty()) kv["out_dir"] = o.out_dir;
    igfl::apply_kv(cfg, kv);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated optimization simulator"};
    app.require_subcommand(1);

    CommonOpts run_opts, sweep_opts, heat_opts;
    std::string axis;

    CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
    add_common(run_cmd, run_opts);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--axis", axis, "key=v1,v2,... sweep axis")->required();

    CLI::App* heat_cmd = app.add_subcommand("heatmap", "attention heatmap experiment");
    add_common(heat_cmd, heat_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return igfl::run_experiment(build_config(run_opts));
        if (sweep_cmd->parsed()) {
            const auto eq = axis.find('=');
            if (eq == std::string::npos) {
                std::cerr << "--axis expects key=v1,v2,...\n";
                return 1;
            }
            return igfl::run_sweep(build_config(sweep_opts), axis.substr(0, eq),
                                   split_csv(axis.substr(eq + 1)));
        }
        if (heat_cmd->parsed()) return igfl::run_heatmap(build_config(heat_opts));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
