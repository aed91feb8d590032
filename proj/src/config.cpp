#include "xxzsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "xxzsim/errors.hpp"

namespace xxzsim {

namespace {

struct Field {
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

// Ordered registry; the order fixes the serialization layout.
const std::vector<std::pair<std::string, Field>>& registry() {
    static const std::vector<std::pair<std::string, Field>> reg = [] {
        std::vector<std::pair<std::string, Field>> r;
        auto add_int = [&r](const std::string& k, int RunConfig::* p) {
            r.push_back({k, {[p](const RunConfig& c) { return std::to_string(c.*p); },
                             [p, k](RunConfig& c, const std::string& v) {
                                 c.*p = int(parse_int(k, v));
                             }}});
        };
        auto add_u64 = [&r](const std::string& k, uint64_t RunConfig::* p) {
            r.push_back({k, {[p](const RunConfig& c) { return std::to_string(c.*p); },
                             [p, k](RunConfig& c, const std::string& v) {
                                 c.*p = uint64_t(parse_int(k, v));
                             }}});
        };
        auto add_dbl = [&r](const std::string& k, double RunConfig::* p) {
            r.push_back({k, {[p](const RunConfig& c) { return fmt_double(c.*p); },
                             [p, k](RunConfig& c, const std::string& v) {
                                 c.*p = parse_double(k, v);
                             }}});
        };
        auto add_bool = [&r](const std::string& k, bool RunConfig::* p) {
            r.push_back({k, {[p](const RunConfig& c) { return c.*p ? "true" : "false"; },
                             [p, k](RunConfig& c, const std::string& v) {
                                 c.*p = parse_bool(k, v);
                             }}});
        };
        auto add_str = [&r](const std::string& k, std::string RunConfig::* p) {
            r.push_back({k, {[p](const RunConfig& c) { return c.*p; },
                             [p](RunConfig& c, const std::string& v) { c.*p = v; }}});
        };

        add_int("lx", &RunConfig::lx);
        add_int("ly", &RunConfig::ly);
        add_int("lz", &RunConfig::lz);
        add_bool("periodic", &RunConfig::periodic);
        add_dbl("delta", &RunConfig::delta);
        add_dbl("hz_over_j", &RunConfig::hz_over_j);
        add_dbl("t_over_j", &RunConfig::t_over_j);
        add_dbl("dt", &RunConfig::dt);
        add_int("n_steps", &RunConfig::n_steps);
        add_dbl("hole_density", &RunConfig::hole_density);
        add_dbl("alpha", &RunConfig::alpha);
        add_dbl("double_hop_rate", &RunConfig::double_hop_rate);
        add_bool("enable_hopping", &RunConfig::enable_hopping);
        add_bool("enable_hz_field", &RunConfig::enable_hz_field);
        add_bool("enable_spin_flip", &RunConfig::enable_spin_flip);
        add_bool("echo", &RunConfig::echo);
        add_bool("start_pulse", &RunConfig::start_pulse);
        add_bool("rotate_site_j", &RunConfig::rotate_site_j);
        add_int("m_trajectories", &RunConfig::m_trajectories);
        add_u64("seed", &RunConfig::seed);
        add_int("threads", &RunConfig::threads);
        add_int("theta_grid", &RunConfig::theta_grid);
        add_str("region", &RunConfig::region);
        add_bool("jackknife", &RunConfig::jackknife);
        add_bool("dump", &RunConfig::dump);
        add_str("noise_mode", &RunConfig::noise_mode);
        add_dbl("noise_rms", &RunConfig::noise_rms);
        add_dbl("t_tunnel", &RunConfig::t_tunnel);
        add_dbl("u_uu", &RunConfig::u_uu);
        add_dbl("u_dd", &RunConfig::u_dd);
        add_dbl("u_ud", &RunConfig::u_ud);
        add_dbl("j_hz", &RunConfig::j_hz);
        add_int("frame_h", &RunConfig::frame_h);
        add_int("frame_w", &RunConfig::frame_w);
        add_dbl("photons", &RunConfig::photons);
        add_int("fringe_modes", &RunConfig::fringe_modes);
        add_dbl("fringe_min_amp", &RunConfig::fringe_min_amp);
        add_dbl("fringe_max_amp", &RunConfig::fringe_max_amp);
        add_dbl("blur_fwhm", &RunConfig::blur_fwhm);
        add_int("pca_components", &RunConfig::pca_components);
        add_int("pool_frames", &RunConfig::pool_frames);
        add_dbl("roi_radius", &RunConfig::roi_radius);
        add_dbl("roi_gap", &RunConfig::roi_gap);
        add_dbl("cloud_sigma", &RunConfig::cloud_sigma);
        add_dbl("cloud_atoms", &RunConfig::cloud_atoms);
        add_dbl("detuning", &RunConfig::detuning);
        add_dbl("sigma0", &RunConfig::sigma0);
        add_int("shots", &RunConfig::shots);
        add_bool("imaging_noise", &RunConfig::imaging_noise);
        add_dbl("inject_variance", &RunConfig::inject_variance);
        return r;
    }();
    return reg;
}

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(uint8_t(s[b]))) ++b;
    while (e > b && std::isspace(uint8_t(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

const std::vector<std::string>& config_key_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [k, f] : registry()) n.push_back(k);
        return n;
    }();
    return names;
}

void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& [k, f] : registry()) {
        if (k == key) {
            f.set(cfg, value);
            return;
        }
    }
    throw ConfigError("unknown config key '" + key + "'");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string line;
    int lineno = 0;
    std::istringstream text(ss.str());
    while (std::getline(text, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        apply_config_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void apply_env_overrides(RunConfig& cfg) {
    for (const auto& key : config_key_names()) {
        std::string env = "XXZSIM_";
        for (char c : key) env += char(std::toupper(uint8_t(c)));
        if (const char* v = std::getenv(env.c_str())) apply_config_key(cfg, key, v);
    }
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& [k, f] : registry()) {
        out += k;
        out += " = ";
        out += f.get(cfg);
        out += '\n';
    }
    return out;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value: " + line);
        apply_config_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> list = [] {
        std::vector<Preset> p;

        RunConfig c1d;
        c1d.lx = 32; c1d.ly = 1; c1d.lz = 1;
        c1d.delta = -0.18; c1d.hz_over_j = -1.1; c1d.t_over_j = 4.2;
        c1d.dt = 0.0172; c1d.n_steps = 200;
        c1d.hole_density = 0.0;
        c1d.m_trajectories = 3000;
        p.push_back({"paper-1d-ideal", "32-spin chain, no holes", c1d});

        RunConfig c1h = c1d;
        c1h.hole_density = 0.05;
        p.push_back({"paper-1d-holes", "32-spin chain, 5% holes, full model", c1h});

        RunConfig c3d;
        c3d.lx = c3d.ly = c3d.lz = 22;
        c3d.delta = -0.18; c3d.hz_over_j = -1.1; c3d.t_over_j = 4.2;
        c3d.dt = 0.0176; c3d.n_steps = 200;
        c3d.hole_density = 0.0;
        c3d.m_trajectories = 3000;
        p.push_back({"paper-3d-ideal", "22^3 cube, no holes", c3d});

        RunConfig c3h = c3d;
        c3h.hole_density = 0.11;
        p.push_back({"paper-3d-holes", "22^3 cube, 11% holes, full model", c3h});

        RunConfig shuf;
        shuf.lx = shuf.ly = shuf.lz = 14;
        shuf.delta = -0.18; shuf.hz_over_j = -1.1; shuf.t_over_j = 4.2;
        shuf.dt = 0.0176; shuf.n_steps = 200;
        shuf.hole_density = 0.11;
        shuf.enable_hz_field = false;
        shuf.enable_spin_flip = false;
        shuf.m_trajectories = 2000;
        p.push_back({"shuffle-only", "14^3 cube, 11% holes, hopping only", shuf});

        return p;
    }();
    return list;
}

RunConfig preset_config(const std::string& name) {
    for (const auto& p : presets()) {
        if (p.name == name) return p.config;
    }
    std::string known;
    for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

} // namespace xxzsim
