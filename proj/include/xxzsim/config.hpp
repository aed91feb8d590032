#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace xxzsim {

/// Flat, strictly-validated run configuration. Every key listed in
/// key_names() can appear in a key=value config file or be overridden
/// through the XXZSIM_<KEY> environment variables.
struct RunConfig {
    // lattice
    int lx = 32, ly = 1, lz = 1;
    bool periodic = false;
    // spin model, simulation units (J = +1)
    double delta = -0.18;
    double hz_over_j = -1.1;
    double t_over_j = 4.2;
    // engine
    double dt = 0.0176;
    int n_steps = 200;
    double hole_density = 0.0;
    double alpha = 1.0;
    double double_hop_rate = -1.0; // < 0 selects 2z-1
    bool enable_hopping = true;
    bool enable_hz_field = true;
    bool enable_spin_flip = true;
    bool echo = false;
    bool start_pulse = false;
    bool rotate_site_j = false;
    // run / analysis
    int m_trajectories = 3000;
    uint64_t seed = 1;
    int threads = 1;
    int theta_grid = 0; // 0 = closed-form extrema
    std::string region = "full";
    bool jackknife = true;
    bool dump = false;
    std::string noise_mode = "none"; // none | quasi-static | fast
    double noise_rms = 0.0;
    // Hubbard inputs for the params scenario
    double t_tunnel = 1.0;
    double u_uu = 4.0, u_dd = 4.0, u_ud = 4.0;
    double j_hz = 0.0; // physical J/hbar/(2*pi) in Hz; 0 = no unit report
    // imaging
    int frame_h = 64, frame_w = 64;
    double photons = 10000.0;
    int fringe_modes = 24;
    double fringe_min_amp = 0.005, fringe_max_amp = 0.03;
    double blur_fwhm = 5.0;
    int pca_components = 300;
    int pool_frames = 350;
    double roi_radius = 14.0, roi_gap = 2.0;
    double cloud_sigma = 4.5, cloud_atoms = 6000.0;
    double detuning = 35.0, sigma0 = 0.6;
    int shots = 500;
    bool imaging_noise = true;
    double inject_variance = 1.0; // normalized spin variance for the demo
};

/// All recognized keys, in serialization order.
const std::vector<std::string>& config_key_names();

/// Parse one key=value assignment; throws ConfigError for unknown keys or
/// malformed values.
void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value);

/// Strict key=value file. '#' starts a comment, blank lines are skipped.
void load_config_file(RunConfig& cfg, const std::string& path);

/// Apply XXZSIM_<KEY> environment overrides.
void apply_env_overrides(RunConfig& cfg);

std::string serialize_config(const RunConfig& cfg);
RunConfig parse_config_text(const std::string& text);

struct Preset {
    std::string name;
    std::string description;
    RunConfig config;
};

/// Named scenarios with all parameters pinned.
const std::vector<Preset>& presets();
RunConfig preset_config(const std::string& name);

} // namespace xxzsim
