#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "rqj/runner.hpp"
#include "rqj/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"rqj - conditional dynamics of the driven Jaynes-Cummings system "
                 "under homodyne observation"};
    app.set_version_flag("--version", rqj::kVersion);

    std::string config_path, mode, out_dir;
    long long seed = -1;
    int workers = 0;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "flat key = value configuration file");
    app.add_option("--mode", mode, "me_steady|sme_traj|pfe_traj|ensemble|scaling|qfunc");
    app.add_option("--seed", seed, "base seed (64-bit)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker thread limit (default: RQJ_WORKERS or hardware)");
    app.add_option("--set", overrides, "override any config key, e.g. --set eta=0.5")
        ->take_all();

    CLI11_PARSE(app, argc, argv);

    try {
        std::map<std::string, std::string> kv;
        if (!config_path.empty()) kv = rqj::read_config_file(config_path);
        for (const std::string& ov : overrides) {
            const auto eq = ov.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--set expects key=value, got '" + ov + "'");
            kv[ov.substr(0, eq)] = ov.substr(eq + 1);
        }
        if (!mode.empty()) kv["mode"] = mode;
        if (seed >= 0) kv["base_seed"] = std::to_string(seed);
        if (!out_dir.empty()) kv["out"] = out_dir;
        if (workers > 0) kv["workers"] = std::to_string(workers);

        const rqj::RunConfig cfg = rqj::config_from_pairs(kv);
        const rqj::RunOutcome outcome = rqj::run(cfg);
        if (outcome.exit_code != 0) std::cerr << "error: " << outcome.message << "\n";
        return outcome.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
}
