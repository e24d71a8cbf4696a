#include "rqj/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rqj/liouvillian.hpp"

namespace rqj {

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::MeSteady: return "me_steady";
        case RunMode::SmeTraj: return "sme_traj";
        case RunMode::PfeTraj: return "pfe_traj";
        case RunMode::Ensemble: return "ensemble";
        case RunMode::Scaling: return "scaling";
        case RunMode::Qfunc: return "qfunc";
    }
    return "?";
}

namespace {

RunMode mode_from_string(const std::string& s) {
    if (s == "me_steady") return RunMode::MeSteady;
    if (s == "sme_traj") return RunMode::SmeTraj;
    if (s == "pfe_traj") return RunMode::PfeTraj;
    if (s == "ensemble") return RunMode::Ensemble;
    if (s == "scaling") return RunMode::Scaling;
    if (s == "qfunc") return RunMode::Qfunc;
    throw std::invalid_argument("unknown mode '" + s +
                                "' (me_steady|sme_traj|pfe_traj|ensemble|scaling|qfunc)");
}

double to_double(const std::string& key, const std::string& v) {
    size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (...) {
        throw std::invalid_argument(key + ": cannot parse '" + v + "' as number");
    }
    if (pos != v.size()) throw std::invalid_argument(key + ": trailing junk in '" + v + "'");
    return out;
}

long long to_int(const std::string& key, const std::string& v) {
    size_t pos = 0;
    long long out;
    try {
        out = std::stoll(v, &pos);
    } catch (...) {
        throw std::invalid_argument(key + ": cannot parse '" + v + "' as integer");
    }
    if (pos != v.size()) throw std::invalid_argument(key + ": trailing junk in '" + v + "'");
    return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(to_double(key, item));
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string fmt_list(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(17);
    for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

}  // namespace

void RunConfig::resolve() {
    if (params.n_max == 0)
        params.n_max = params.frame == Frame::Displaced ? 15 : 60;
    if (dt == 0.0) {
        if (mode == RunMode::PfeTraj || mode == RunMode::Scaling) {
            // Half the CFL bound of the default grid.
            const double dy =
                2.0 * pfe_y_span_factor * params.g / params.kappa / pfe_n_y;
            const double vmax = params.g * (1.0 + pfe_y_span_factor);
            dt = 0.4 * dy / vmax;
        } else {
            dt = (params.frame == Frame::Displaced) ? 1e-4 : 1e-5;
        }
    }
    if (t_final < 0.0) {
        switch (mode) {
            case RunMode::SmeTraj: t_final = 5.0; break;
            case RunMode::PfeTraj: t_final = 40.0; break;
            case RunMode::Ensemble: t_final = 1.0; break;
            default: t_final = 0.0; break;
        }
    }
    if (n_traj == 0) n_traj = (mode == RunMode::Ensemble) ? 500 : 1;
    if (threshold_low == 0.0 && threshold_high == 0.0 && params.g > 0.0) {
        threshold_low = -params.g;
        threshold_high = params.g;
    }
    if (burn_in < 0.0) burn_in = std::max(1.0, 5.0 / params.kappa);
    if (workers == 0) {
        if (const char* env = std::getenv("RQJ_WORKERS")) workers = std::atoi(env);
        if (workers <= 0) workers = int(std::thread::hardware_concurrency());
        if (workers <= 0) workers = 1;
    }
    scaling.base_seed = base_seed;
}

void RunConfig::validate() const {
    params.validate();
    const bool needs_fixed_points = mode == RunMode::SmeTraj || mode == RunMode::PfeTraj ||
                                    mode == RunMode::Ensemble || mode == RunMode::Scaling;
    if (needs_fixed_points && !(2.0 * params.drive > params.g))
        throw std::invalid_argument(
            "mode " + to_string(mode) +
            " uses the semiclassical fixed points, which require 2E > g");

    if (mode == RunMode::SmeTraj || mode == RunMode::Ensemble) {
        Liouvillian liou(params, variant);  // validates dimensions
        check_step_size(liou, dt);
    }
    if (mode == RunMode::PfeTraj || mode == RunMode::Scaling) {
        const double dy = 2.0 * pfe_y_span_factor * params.g / params.kappa / pfe_n_y;
        const double vmax = params.g * (1.0 + pfe_y_span_factor);
        if (vmax * dt > 0.8 * dy)
            throw std::invalid_argument("pfe step size violates the CFL bound: dt <= " +
                                        std::to_string(0.8 * dy / vmax));
        if (pfe_n_y < 8) throw std::invalid_argument("pfe_n_y must be >= 8");
    }
    if (!(t_final >= 0.0)) throw std::invalid_argument("t_final_us must be >= 0");
    if (n_traj < 1) throw std::invalid_argument("n_traj must be >= 1");
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (filter_fc > 0.0 && mode != RunMode::MeSteady && mode != RunMode::Qfunc &&
        mode != RunMode::Scaling) {
        if (filter_fc >= 0.5 / dt)
            throw std::invalid_argument("filter_fc_mhz must lie below the Nyquist rate 1/(2 dt)");
    }
    if ((mode == RunMode::SmeTraj || mode == RunMode::PfeTraj) &&
        !(threshold_high > threshold_low))
        throw std::invalid_argument("threshold_high_mhz must exceed threshold_low_mhz");
    if (qgrid.n_re < 2 || qgrid.n_im < 2 || !(qgrid.re_max > qgrid.re_min) ||
        !(qgrid.im_max > qgrid.im_min))
        throw std::invalid_argument("bad Q-function grid spec");
    if (keep_records < 0) throw std::invalid_argument("keep_records must be >= 0");
}

std::map<std::string, std::string> RunConfig::echo() const {
    std::map<std::string, std::string> kv;
    kv["mode"] = to_string(mode);
    kv["g_mhz"] = fmt(params.g);
    kv["kappa_mhz"] = fmt(params.kappa);
    kv["gamma_perp_mhz"] = fmt(params.gamma_perp);
    kv["e_mhz"] = fmt(params.drive);
    kv["eta"] = fmt(params.eta);
    kv["n_max"] = std::to_string(params.n_max);
    kv["frame"] = params.frame == Frame::Displaced ? "displaced" : "lab";
    kv["variant"] = variant == Variant::Full ? "full" : "rwa";
    kv["dt_us"] = fmt(dt);
    kv["t_final_us"] = fmt(t_final);
    kv["n_traj"] = std::to_string(n_traj);
    kv["base_seed"] = std::to_string(base_seed);
    kv["out"] = output_dir;
    kv["stride"] = std::to_string(stride);
    kv["workers"] = std::to_string(workers);
    kv["keep_records"] = std::to_string(keep_records);
    kv["filter_fc_mhz"] = fmt(filter_fc);
    kv["threshold_low_mhz"] = fmt(threshold_low);
    kv["threshold_high_mhz"] = fmt(threshold_high);
    kv["burn_in_us"] = fmt(burn_in);
    kv["pfe_n_y"] = std::to_string(pfe_n_y);
    kv["pfe_y_span_factor"] = fmt(pfe_y_span_factor);
    kv["snapshot_times_us"] = fmt_list(snapshot_times);
    kv["q_re_min"] = fmt(qgrid.re_min);
    kv["q_re_max"] = fmt(qgrid.re_max);
    kv["q_im_min"] = fmt(qgrid.im_min);
    kv["q_im_max"] = fmt(qgrid.im_max);
    kv["q_n_re"] = std::to_string(qgrid.n_re);
    kv["q_n_im"] = std::to_string(qgrid.n_im);
    kv["scaling_g_list"] = fmt_list(scaling.g_values);
    kv["scaling_g_over_kappa"] = fmt(scaling.g_over_kappa);
    kv["scaling_gamma_list"] = fmt_list(scaling.gamma_perp_values);
    kv["scaling_eta_list"] = fmt_list(scaling.eta_values);
    kv["scaling_eta_for_g_sweep"] = fmt(scaling.eta_for_g_sweep);
    kv["scaling_n_traj"] = std::to_string(scaling.n_traj);
    kv["scaling_t_final_us"] = fmt(scaling.t_final);
    return kv;
}

RunConfig config_from_pairs(const std::map<std::string, std::string>& kv) {
    RunConfig cfg;
    cfg.params.n_max = 0;  // auto unless given
    std::string variant_str = "auto";

    for (const auto& [key, value] : kv) {
        if (key == "mode") cfg.mode = mode_from_string(value);
        else if (key == "g_mhz") cfg.params.g = to_double(key, value);
        else if (key == "kappa_mhz") cfg.params.kappa = to_double(key, value);
        else if (key == "gamma_perp_mhz") cfg.params.gamma_perp = to_double(key, value);
        else if (key == "e_mhz") cfg.params.drive = to_double(key, value);
        else if (key == "eta") cfg.params.eta = to_double(key, value);
        else if (key == "n_max") cfg.params.n_max = int(to_int(key, value));
        else if (key == "frame") {
            if (value == "lab") cfg.params.frame = Frame::Lab;
            else if (value == "displaced") cfg.params.frame = Frame::Displaced;
            else throw std::invalid_argument("frame must be lab|displaced, got '" + value + "'");
        } else if (key == "variant") {
            if (value != "full" && value != "rwa" && value != "auto")
                throw std::invalid_argument("variant must be full|rwa|auto, got '" + value + "'");
            variant_str = value;
        } else if (key == "dt_us") cfg.dt = to_double(key, value);
        else if (key == "t_final_us") cfg.t_final = to_double(key, value);
        else if (key == "n_traj") cfg.n_traj = int(to_int(key, value));
        else if (key == "base_seed") cfg.base_seed = uint64_t(to_int(key, value));
        else if (key == "out") cfg.output_dir = value;
        else if (key == "stride") cfg.stride = int(to_int(key, value));
        else if (key == "workers") cfg.workers = int(to_int(key, value));
        else if (key == "keep_records") cfg.keep_records = int(to_int(key, value));
        else if (key == "filter_fc_mhz") cfg.filter_fc = to_double(key, value);
        else if (key == "threshold_low_mhz") cfg.threshold_low = to_double(key, value);
        else if (key == "threshold_high_mhz") cfg.threshold_high = to_double(key, value);
        else if (key == "burn_in_us") cfg.burn_in = to_double(key, value);
        else if (key == "pfe_n_y") cfg.pfe_n_y = int(to_int(key, value));
        else if (key == "pfe_y_span_factor") cfg.pfe_y_span_factor = to_double(key, value);
        else if (key == "snapshot_times_us") cfg.snapshot_times = to_list(key, value);
        else if (key == "q_re_min") cfg.qgrid.re_min = to_double(key, value);
        else if (key == "q_re_max") cfg.qgrid.re_max = to_double(key, value);
        else if (key == "q_im_min") cfg.qgrid.im_min = to_double(key, value);
        else if (key == "q_im_max") cfg.qgrid.im_max = to_double(key, value);
        else if (key == "q_n_re") cfg.qgrid.n_re = int(to_int(key, value));
        else if (key == "q_n_im") cfg.qgrid.n_im = int(to_int(key, value));
        else if (key == "scaling_g_list") cfg.scaling.g_values = to_list(key, value);
        else if (key == "scaling_g_over_kappa") cfg.scaling.g_over_kappa = to_double(key, value);
        else if (key == "scaling_gamma_list") cfg.scaling.gamma_perp_values = to_list(key, value);
        else if (key == "scaling_eta_list") cfg.scaling.eta_values = to_list(key, value);
        else if (key == "scaling_eta_for_g_sweep") cfg.scaling.eta_for_g_sweep = to_double(key, value);
        else if (key == "scaling_n_traj") cfg.scaling.n_traj = int(to_int(key, value));
        else if (key == "scaling_t_final_us") cfg.scaling.t_final = to_double(key, value);
        else throw std::invalid_argument("unknown config key '" + key + "'");
    }

    if (variant_str == "auto")
        cfg.variant = (cfg.mode == RunMode::MeSteady || cfg.mode == RunMode::Qfunc)
                          ? Variant::Full
                          : Variant::Rwa;
    else
        cfg.variant = variant_str == "full" ? Variant::Full : Variant::Rwa;

    cfg.resolve();
    cfg.validate();
    return cfg;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                                     ": empty key");
        kv[key] = value;
    }
    return kv;
}

}  // namespace rqj
