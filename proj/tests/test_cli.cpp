#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "rqj/config.hpp"
#include "rqj/runner.hpp"

using namespace rqj;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "rqj_test" / name;
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("minimal configuration resolves every default explicitly") {
    const RunConfig cfg = config_from_pairs({{"mode", "pfe_traj"}});
    CHECK(cfg.params.n_max == 15);
    CHECK(cfg.params.frame == Frame::Displaced);
    CHECK(cfg.dt > 0.0);
    CHECK(cfg.threshold_high == cfg.params.g);
    CHECK(cfg.threshold_low == -cfg.params.g);
    CHECK(cfg.burn_in == 1.0);
    CHECK(cfg.workers >= 1);

    const auto echo = cfg.echo();
    for (const char* key :
         {"mode", "g_mhz", "kappa_mhz", "gamma_perp_mhz", "e_mhz", "eta", "n_max", "frame",
          "variant", "dt_us", "t_final_us", "n_traj", "base_seed", "stride", "workers",
          "filter_fc_mhz", "threshold_low_mhz", "threshold_high_mhz", "burn_in_us", "pfe_n_y",
          "pfe_y_span_factor", "q_re_min", "q_n_re", "scaling_g_list"}) {
        INFO(key);
        CHECK(echo.count(key) == 1);
        CHECK(!echo.at(key).empty());
    }

    // Lab frame flips the truncation default.
    const RunConfig lab = config_from_pairs({{"mode", "me_steady"}, {"frame", "lab"}});
    CHECK(lab.params.n_max == 60);
    CHECK(lab.variant == Variant::Full);
}

TEST_CASE("invalid configurations are rejected with the violated constraint") {
    CHECK_THROWS_WITH_AS(config_from_pairs({{"eta", "1.5"}}), doctest::Contains("eta"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(config_from_pairs({{"mode", "sme_traj"}, {"e_mhz", "50"}}),
                         doctest::Contains("2E > g"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(config_from_pairs({{"no_such_key", "1"}}),
                         doctest::Contains("no_such_key"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(config_from_pairs({{"mode", "warp"}}), doctest::Contains("mode"),
                         std::invalid_argument);
    CHECK_THROWS_AS(config_from_pairs({{"g_mhz", "abc"}}), std::invalid_argument);
    // Weak driving is fine for modes that never touch the fixed points.
    CHECK_NOTHROW(config_from_pairs({{"mode", "me_steady"}, {"e_mhz", "50"}, {"n_max", "8"}}));
}

TEST_CASE("config files parse key = value lines with comments") {
    const fs::path dir = fresh_dir("cfg");
    fs::create_directories(dir);
    const fs::path file = dir / "run.cfg";
    {
        std::ofstream out(file);
        out << "# experiment configuration\n"
            << "mode = pfe_traj\n"
            << "eta = 0.5   # detector efficiency\n"
            << "\n"
            << "eta = 0.75\n";  // later keys win
    }
    const auto kv = read_config_file(file.string());
    CHECK(kv.at("mode") == "pfe_traj");
    CHECK(kv.at("eta") == "0.75");

    CHECK_THROWS_AS(read_config_file((dir / "missing.cfg").string()), std::invalid_argument);
    {
        std::ofstream out(dir / "bad.cfg");
        out << "just words\n";
    }
    CHECK_THROWS_AS(read_config_file((dir / "bad.cfg").string()), std::invalid_argument);
}

TEST_CASE("invalid runs produce no output directory") {
    const fs::path dir = fresh_dir("never_created");
    RunConfig cfg;
    cfg.mode = RunMode::SmeTraj;
    cfg.params.eta = 2.0;  // invalid
    cfg.output_dir = dir.string();
    const RunOutcome outcome = run(cfg);
    CHECK(outcome.exit_code != 0);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("steady-state run writes self-describing metadata") {
    const fs::path dir = fresh_dir("steady");
    RunConfig cfg = config_from_pairs({{"mode", "me_steady"},
                                       {"g_mhz", "0"},
                                       {"e_mhz", "40"},
                                       {"frame", "lab"},
                                       {"n_max", "8"},
                                       {"out", (dir).string()}});
    const RunOutcome outcome = run(cfg);
    REQUIRE(outcome.exit_code == 0);

    const json meta = json::parse(slurp(dir / "run_meta.json"));
    CHECK(meta.at("incomplete") == false);
    CHECK(meta.at("config").at("mode") == "me_steady");
    CHECK(meta.at("config").contains("dt_us"));
    CHECK(meta.at("wall_time_s").get<double>() >= 0.0);

    const json ss = json::parse(slurp(dir / "steady_state.json"));
    CHECK(ss.at("residual").get<double>() < 1e-8);
    CHECK(std::abs(ss.at("y_mean").get<double>()) < 1e-6);
}

TEST_CASE("identical seeds give byte-identical trajectory files") {
    const fs::path dir1 = fresh_dir("det1");
    const fs::path dir2 = fresh_dir("det2");
    const std::map<std::string, std::string> base = {
        {"mode", "sme_traj"}, {"t_final_us", "0.02"}, {"base_seed", "7"},
        {"n_max", "8"},       {"stride", "5"},
    };
    auto kv1 = base;
    kv1["out"] = dir1.string();
    auto kv2 = base;
    kv2["out"] = dir2.string();
    REQUIRE(run(config_from_pairs(kv1)).exit_code == 0);
    REQUIRE(run(config_from_pairs(kv2)).exit_code == 0);

    const std::string a = slurp(dir1 / "trajectory.csv");
    const std::string b = slurp(dir2 / "trajectory.csv");
    CHECK(a == b);
    CHECK(a.substr(0, a.find('\n')) == "t_us,i_hom_mhz,y_mean,p_plus,entropy_s,xi");

    // A different seed changes the record.
    auto kv3 = base;
    kv3["out"] = dir1.string();
    kv3["base_seed"] = "8";
    REQUIRE(run(config_from_pairs(kv3)).exit_code == 0);
    CHECK(slurp(dir1 / "trajectory.csv") != b);
}

TEST_CASE("pfe run writes snapshots and summaries") {
    const fs::path dir = fresh_dir("pfe_run");
    RunConfig cfg = config_from_pairs({{"mode", "pfe_traj"},
                                       {"t_final_us", "0.5"},
                                       {"snapshot_times_us", "0.25,0.5"},
                                       {"out", dir.string()}});
    REQUIRE(run(cfg).exit_code == 0);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "snapshot_t0.csv"));
    CHECK(fs::exists(dir / "snapshot_t1.csv"));
    const std::string snap = slurp(dir / "snapshot_t0.csv");
    CHECK(snap.substr(0, snap.find('\n')) == "y,p_plus,p_minus");

    const json summary = json::parse(slurp(dir / "trajectory_summary.json"));
    CHECK(summary.at("clipped_mass_rate_per_us").get<double>() < 1e-4);
}
