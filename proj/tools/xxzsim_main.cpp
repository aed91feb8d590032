#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>

#include "xxzsim/config.hpp"
#include "xxzsim/errors.hpp"
#include "xxzsim/scenarios.hpp"

namespace {

using xxzsim::RunConfig;

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::string out_dir = ".";
    long long seed = -1;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "key=value config file");
    cmd->add_option("--preset", args.preset, "named scenario preset");
    cmd->add_option("--seed", args.seed, "RNG seed override");
    cmd->add_option("--threads", args.threads, "worker threads (results independent)");
    cmd->add_option("--out", args.out_dir, "output directory");
}

RunConfig resolve_config(const CommonArgs& args) {
    RunConfig cfg = args.preset.empty() ? RunConfig{} : xxzsim::preset_config(args.preset);
    if (!args.config_path.empty()) xxzsim::load_config_file(cfg, args.config_path);
    xxzsim::apply_env_overrides(cfg);
    if (args.seed >= 0) cfg.seed = uint64_t(args.seed);
    if (args.threads > 0) cfg.threads = args.threads;
    return cfg;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"XXZ spin-squeezing simulator and analysis toolkit"};
    app.require_subcommand(1);

    // params
    auto* params = app.add_subcommand("params", "derive spin couplings from Hubbard inputs");
    CommonArgs params_args;
    add_common(params, params_args);
    bool params_csv = false;
    params->add_flag("--csv", params_csv, "emit CSV instead of JSON");

    // dtwa
    auto* dtwa = app.add_subcommand("dtwa", "semiclassical ensemble run");
    CommonArgs dtwa_args;
    add_common(dtwa, dtwa_args);
    bool dtwa_dump = false;
    int dtwa_theta = -1;
    std::string dtwa_region;
    dtwa->add_flag("--dump", dtwa_dump, "also write the raw per-trajectory dump");
    dtwa->add_option("--theta-grid", dtwa_theta, "angle grid size (0 = closed form)");
    dtwa->add_option("--region", dtwa_region, "variance region: full | diff");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "exact evolution (<= 14 spins)");
    CommonArgs oracle_args;
    add_common(oracle, oracle_args);
    int oracle_theta = -1;
    oracle->add_option("--theta-grid", oracle_theta, "angle grid size (0 = closed form)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "re-analyze a raw trajectory dump");
    CommonArgs analyze_args;
    add_common(analyze, analyze_args);
    std::string analyze_input;
    analyze->add_option("--input", analyze_input, "trajectory dump CSV")->required();
    int analyze_theta = -1;
    std::string analyze_region, analyze_noise;
    bool analyze_echo = false;
    bool analyze_jackknife = true;
    analyze->add_option("--theta-grid", analyze_theta, "angle grid size (0 = closed form)");
    analyze->add_option("--region", analyze_region, "variance region: full | diff");
    analyze->add_option("--noise", analyze_noise,
                        "inject global phase noise, MODE:RMS (quasi-static:0.1)");
    analyze->add_flag("--echo", analyze_echo, "treat shots as echo-protected");
    analyze->add_flag("--jackknife,!--no-jackknife", analyze_jackknife,
                      "jackknife error bars (default on)");

    // imaging-demo
    auto* imaging = app.add_subcommand("imaging-demo", "synthetic imaging round trip");
    CommonArgs imaging_args;
    add_common(imaging, imaging_args);
    int imaging_shots = 0;
    imaging->add_option("--shots", imaging_shots, "number of synthetic shots");

    // presets listing
    auto* list = app.add_subcommand("presets", "list named presets");
    std::string show_preset;
    list->add_option("--show", show_preset,
                     "print the full config of one preset (key = value form)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0; // --help
        std::cerr << e.what() << "\n";
        return int(xxzsim::ExitCode::config_error);
    }

    if (list->parsed()) {
        if (!show_preset.empty()) {
            std::fputs(xxzsim::serialize_config(xxzsim::preset_config(show_preset)).c_str(),
                       stdout);
            return 0;
        }
        for (const auto& p : xxzsim::presets())
            std::printf("%-16s %s\n", p.name.c_str(), p.description.c_str());
        return 0;
    }
    if (params->parsed()) {
        const RunConfig cfg = resolve_config(params_args);
        std::cout << xxzsim::scenarios::run_params(cfg, params_csv, params_args.out_dir)
                  << "\n";
        return 0;
    }
    if (dtwa->parsed()) {
        RunConfig cfg = resolve_config(dtwa_args);
        if (dtwa_dump) cfg.dump = true;
        if (dtwa_theta >= 0) cfg.theta_grid = dtwa_theta;
        if (!dtwa_region.empty()) cfg.region = dtwa_region;
        const auto curve = xxzsim::scenarios::run_dtwa(cfg, dtwa_args.out_dir);
        std::printf("wrote %s/dtwa_curve.csv (%zu points, M=%d)\n",
                    dtwa_args.out_dir.c_str(), curve.size(), cfg.m_trajectories);
        return 0;
    }
    if (oracle->parsed()) {
        RunConfig cfg = resolve_config(oracle_args);
        if (oracle_theta >= 0) cfg.theta_grid = oracle_theta;
        const auto curve = xxzsim::scenarios::run_oracle(cfg, oracle_args.out_dir);
        std::printf("wrote %s/oracle_curve.csv (%zu points)\n", oracle_args.out_dir.c_str(),
                    curve.size());
        return 0;
    }
    if (analyze->parsed()) {
        RunConfig cfg = resolve_config(analyze_args);
        if (analyze_theta >= 0) cfg.theta_grid = analyze_theta;
        if (!analyze_region.empty()) cfg.region = analyze_region;
        cfg.jackknife = analyze_jackknife;
        cfg.echo = analyze_echo;
        if (!analyze_noise.empty()) {
            const size_t colon = analyze_noise.find(':');
            if (colon == std::string::npos)
                throw xxzsim::ConfigError("--noise expects MODE:RMS");
            cfg.noise_mode = analyze_noise.substr(0, colon);
            cfg.noise_rms = std::stod(analyze_noise.substr(colon + 1));
        }
        const auto curve =
            xxzsim::scenarios::run_analyze(cfg, analyze_input, analyze_args.out_dir);
        std::printf("wrote %s/analysis_curve.csv (%zu points)\n",
                    analyze_args.out_dir.c_str(), curve.size());
        return 0;
    }
    if (imaging->parsed()) {
        RunConfig cfg = resolve_config(imaging_args);
        if (imaging_shots > 0) cfg.shots = imaging_shots;
        const auto s = xxzsim::scenarios::run_imaging_demo(cfg, imaging_args.out_dir);
        std::printf("imaging round trip: injected %.4f, recovered %.4f +/- %.4f "
                    "(N=%.1f, residual rms %.2f%%)\n",
                    s.injected, s.recovered, s.recovered_err, s.n_estimate,
                    100.0 * s.residual_rms_rel);
        return 0;
    }
    return int(xxzsim::ExitCode::config_error);
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const xxzsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return int(xxzsim::ExitCode::config_error);
    } catch (const xxzsim::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return int(xxzsim::ExitCode::domain_error);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return int(xxzsim::ExitCode::numeric_error);
    }
}
