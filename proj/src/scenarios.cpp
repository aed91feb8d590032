#include "xxzsim/scenarios.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "xxzsim/ed_oracle.hpp"
#include "xxzsim/errors.hpp"
#include "xxzsim/imaging.hpp"
#include "xxzsim/io.hpp"
#include "xxzsim/rng.hpp"

namespace xxzsim::scenarios {

namespace {

std::string out_path(const std::string& dir, const std::string& name) {
    if (dir.empty()) return {};
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

std::vector<double> theta_grid_of(int n) {
    std::vector<double> grid;
    grid.reserve(size_t(std::max(0, n)));
    for (int i = 0; i < n; ++i) grid.push_back(M_PI * double(i) / double(n));
    return grid;
}

} // namespace

dtwa::EngineConfig engine_config(const RunConfig& cfg) {
    dtwa::EngineConfig ec;
    ec.dt = cfg.dt;
    ec.n_steps = cfg.n_steps;
    ec.hole_density = cfg.hole_density;
    ec.hop_rate = cfg.t_over_j;
    ec.double_hop_rate = cfg.double_hop_rate;
    ec.alpha = cfg.alpha;
    // The engine field is per adjacent vacancy. The density coupling writes
    // the bond term as (hz/2)[Sz_i n_j + n_i Sz_j], so each missing neighbor
    // shifts the local field by hz/2 relative to the bulk; the uniform bulk
    // part is dropped.
    ec.hz = cfg.hz_over_j / 2.0;
    ec.enable_hopping = cfg.enable_hopping;
    ec.enable_hz_field = cfg.enable_hz_field;
    ec.enable_spin_flip = cfg.enable_spin_flip;
    ec.echo = cfg.echo;
    ec.start_pulse = cfg.start_pulse;
    ec.rotate_site_j = cfg.rotate_site_j;
    ec.seed = cfg.seed;
    return ec;
}

LatticeGeometry lattice_from(const RunConfig& cfg) {
    return LatticeGeometry::build({cfg.lx, cfg.ly, cfg.lz}, cfg.periodic);
}

SpinCouplings couplings_from(const RunConfig& cfg) {
    return couplings_from_ratios(cfg.delta, cfg.hz_over_j, cfg.t_over_j);
}

analysis::CurveOptions curve_options(const RunConfig& cfg) {
    analysis::CurveOptions opt;
    if (cfg.region == "full") {
        opt.variance_region = analysis::Region::full;
    } else if (cfg.region == "diff") {
        opt.variance_region = analysis::Region::diff;
    } else {
        throw ConfigError("region must be 'full' or 'diff', got '" + cfg.region + "'");
    }
    opt.theta_grid = theta_grid_of(cfg.theta_grid);
    opt.jackknife_errors = cfg.jackknife;
    return opt;
}

std::string run_params(const RunConfig& cfg, bool csv_format, const std::string& out_dir) {
    const HubbardParams hp{cfg.t_tunnel, cfg.u_uu, cfg.u_dd, cfg.u_ud};
    SpinCouplings c = derive_couplings(hp);
    double time_unit = 0.0;
    if (cfg.j_hz > 0.0) {
        const SimUnitReport rep = to_sim_units(c, cfg.j_hz);
        c = rep.couplings;
        time_unit = rep.time_unit_seconds;
    }

    std::string line;
    if (csv_format) {
        line = "J,Jz,hz,delta,hz_over_J,t_over_J\n" + io::format_double(c.J) + "," +
               io::format_double(c.Jz) + "," + io::format_double(c.hz) + "," +
               io::format_double(c.delta) + "," + io::format_double(c.J_hz_ratio) + "," +
               io::format_double(c.t_over_J);
    } else {
        nlohmann::json j{{"J", c.J},
                         {"Jz", c.Jz},
                         {"hz", c.hz},
                         {"delta", c.delta},
                         {"hz_over_J", c.J_hz_ratio},
                         {"t_over_J", c.t_over_J}};
        if (time_unit > 0.0) j["time_unit_seconds"] = time_unit;
        line = j.dump();
    }
    if (const std::string p = out_path(out_dir, csv_format ? "params.csv" : "params.json");
        !p.empty()) {
        std::ofstream f(p);
        f << line << '\n';
        if (!f) throw NumericError("failed writing " + p);
    }
    return line;
}

std::vector<analysis::CurvePoint> run_dtwa(const RunConfig& cfg, const std::string& out_dir) {
    const LatticeGeometry g = lattice_from(cfg);
    const SpinCouplings c = couplings_from(cfg);
    const dtwa::EngineConfig ec = engine_config(cfg);
    const auto results =
        dtwa::run_trajectories(g, c, ec, cfg.m_trajectories, std::max(1, cfg.threads));
    const auto curve = analysis::squeezing_curve(results, ec.dt, curve_options(cfg));
    if (const std::string p = out_path(out_dir, "dtwa_curve.csv"); !p.empty())
        io::write_curve_csv(p, curve);
    if (cfg.dump) {
        if (const std::string p = out_path(out_dir, "trajectories.csv"); !p.empty())
            io::write_dump_csv(p, results, ec.dt, g.n_sites());
    }
    return curve;
}

std::vector<analysis::CurvePoint> run_oracle(const RunConfig& cfg, const std::string& out_dir) {
    const LatticeGeometry g = lattice_from(cfg);
    const SpinCouplings c = couplings_from(cfg);
    std::vector<double> times(size_t(cfg.n_steps) + 1);
    for (size_t k = 0; k < times.size(); ++k) times[k] = double(k) * cfg.dt;
    const auto grid = theta_grid_of(cfg.theta_grid);
    const auto pts = ed::oracle_curves(g, c, times, grid);

    std::vector<analysis::CurvePoint> curve(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        curve[i].t = pts[i].t;
        curve[i].spin_length = pts[i].spin_length;
        curve[i].var_min = pts[i].var_min;
        curve[i].var_max = pts[i].var_max;
        curve[i].theta_min = pts[i].theta_min;
        curve[i].xi2 = pts[i].xi2;
        curve[i].db = pts[i].db;
    }
    if (const std::string p = out_path(out_dir, "oracle_curve.csv"); !p.empty())
        io::write_curve_csv(p, curve);
    return curve;
}

std::vector<analysis::CurvePoint> run_analyze(const RunConfig& cfg,
                                              const std::string& input_path,
                                              const std::string& out_dir) {
    io::DumpData data = io::read_dump_csv(input_path);
    if (cfg.noise_mode == "quasi-static") {
        analysis::inject_phase_noise(data.results, cfg.noise_rms,
                                     analysis::NoiseMode::quasi_static, cfg.echo,
                                     cfg.seed ^ 0x9e3779b97f4a7c15ull);
    } else if (cfg.noise_mode == "fast") {
        analysis::inject_phase_noise(data.results, cfg.noise_rms,
                                     analysis::NoiseMode::fast, cfg.echo,
                                     cfg.seed ^ 0x9e3779b97f4a7c15ull);
    } else if (cfg.noise_mode != "none") {
        throw ConfigError("noise_mode must be none|quasi-static|fast");
    }
    const auto curve = analysis::squeezing_curve(data.results, data.dt, curve_options(cfg));
    if (const std::string p = out_path(out_dir, "analysis_curve.csv"); !p.empty())
        io::write_curve_csv(p, curve);
    return curve;
}

ImagingSummary run_imaging_demo(const RunConfig& cfg, const std::string& out_dir) {
    using namespace imaging;
    if (cfg.shots < 3) throw DomainError("imaging demo needs at least 3 shots");

    const double center_x = (cfg.frame_w - 1) / 2.0;
    const double center_y = (cfg.frame_h - 1) / 2.0;
    CloudModel cloud;
    cloud.cx = center_x;
    cloud.cy = center_y;
    cloud.sigma_px = cfg.cloud_sigma;
    cloud.n_atoms = cfg.cloud_atoms;
    cloud.delta = cfg.detuning;
    cloud.sigma0_px = cfg.sigma0;

    FringeModel fringes;
    fringes.n_modes = cfg.fringe_modes;
    fringes.min_amplitude = cfg.fringe_min_amp;
    fringes.max_amplitude = cfg.fringe_max_amp;
    fringes.seed = cfg.seed ^ 0xf00dull;

    RoiSpec roi;
    roi.cx = center_x;
    roi.cy = center_y;
    roi.radius = cfg.roi_radius;
    roi.gap = cfg.roi_gap;
    roi.validate();

    RenderOptions ro;
    ro.photons = cfg.photons;
    ro.blur_fwhm_px = cfg.blur_fwhm;
    ro.poisson_noise = cfg.imaging_noise;
    ro.seed = cfg.seed;

    const double mask_radius = std::max(cfg.roi_radius, 3.0 * cfg.cloud_sigma) + 4.0;
    const auto atom_mask =
        circular_mask(cfg.frame_h, cfg.frame_w, center_x, center_y, mask_radius);

    // No-atom pool for the fringe basis.
    ImageFrame zero_theta;
    zero_theta.h = cfg.frame_h;
    zero_theta.w = cfg.frame_w;
    zero_theta.px.assign(size_t(cfg.frame_h) * cfg.frame_w, 0.0);

    std::vector<ImageFrame> pool;
    pool.reserve(size_t(cfg.pool_frames));
    for (int i = 0; i < cfg.pool_frames; ++i)
        pool.push_back(render_frame(zero_theta, fringes, ro, uint32_t(i)));
    const PcaBasis basis = pca_fit(pool, cfg.pca_components, atom_mask);

    uint32_t shot_id = uint32_t(cfg.pool_frames);

    // All-spins-up reference fixes the atom-number normalization.
    ImageFrame ref_imbalance;
    ref_imbalance.h = cfg.frame_h;
    ref_imbalance.w = cfg.frame_w;
    ref_imbalance.px.resize(zero_theta.px.size());
    for (int r = 0; r < cfg.frame_h; ++r)
        for (int c = 0; c < cfg.frame_w; ++c)
            ref_imbalance.px[size_t(r) * cfg.frame_w + c] = cloud.density(c, r);

    double n_estimate = 0.0;
    const int n_ref = 5;
    for (int i = 0; i < n_ref; ++i) {
        const auto frame =
            render_frame(phase_map(ref_imbalance, cloud), fringes, ro, shot_id++);
        const auto rec = pca_reconstruct(frame, basis);
        n_estimate += quadrant_signal(rec.residual, rec.background, cloud, roi).imbalance_sum;
    }
    n_estimate /= double(n_ref);
    if (!(n_estimate > 0.0)) throw NumericError("atom-number reference came out non-positive");

    // Synthetic spin shots: per-pixel white imbalance with the injected
    // normalized variance, mirroring uncorrelated per-atom projection noise.
    const rng::Stream spin_noise(cfg.seed ^ 0xabcdull, 1);
    std::vector<double> diff_atoms, diff_noatoms;
    diff_atoms.reserve(size_t(cfg.shots));
    diff_noatoms.reserve(size_t(cfg.shots));
    ImageFrame imb = zero_theta;
    ImagingSummary summary;
    summary.injected = cfg.inject_variance;
    summary.shots = cfg.shots;

    for (int s = 0; s < cfg.shots; ++s) {
        for (int r = 0; r < cfg.frame_h; ++r) {
            for (int c = 0; c < cfg.frame_w; ++c) {
                const double dens = cloud.density(c, r);
                const size_t i = size_t(r) * cfg.frame_w + c;
                if (dens < 1e-9) {
                    imb.px[i] = 0.0;
                    continue;
                }
                const double g =
                    spin_noise.normal2(uint32_t(s), rng::Draw::detection, uint32_t(i))[0];
                imb.px[i] = std::sqrt(cfg.inject_variance * dens) * g;
            }
        }
        const auto atom_frame = render_frame(phase_map(imb, cloud), fringes, ro, shot_id++);
        const auto atom_rec = pca_reconstruct(atom_frame, basis);
        diff_atoms.push_back(
            quadrant_signal(atom_rec.residual, atom_rec.background, cloud, roi).s_diff);

        const auto bg_frame = render_frame(zero_theta, fringes, ro, shot_id++);
        const auto bg_rec = pca_reconstruct(bg_frame, basis);
        diff_noatoms.push_back(
            quadrant_signal(bg_rec.residual, bg_rec.background, cloud, roi).s_diff);

        if (s == 0 && !out_dir.empty()) {
            write_frame(out_path(out_dir, "shot0_atoms.xzim"), atom_frame);
            write_frame(out_path(out_dir, "shot0_background.xzim"), atom_rec.background);
            write_frame(out_path(out_dir, "shot0_residual.xzim"), atom_rec.residual);
        }
    }

    const auto var_of = [](std::span<const double> v) {
        double s = 0, ss = 0;
        for (double x : v) {
            s += x;
            ss += x * x;
        }
        const double m = double(v.size());
        return (ss - s * s / m) / (m - 1.0);
    };
    summary.var_atoms = var_of(diff_atoms);
    summary.var_noatoms = var_of(diff_noatoms);
    summary.n_estimate = n_estimate;
    summary.recovered =
        analysis::shot_noise_subtract(summary.var_atoms, summary.var_noatoms, n_estimate);

    const auto jk_a = analysis::jackknife(
        diff_atoms, [&](std::span<const double> v) { return var_of(v); });
    const auto jk_n = analysis::jackknife(
        diff_noatoms, [&](std::span<const double> v) { return var_of(v); });
    summary.recovered_err =
        4.0 / n_estimate * std::hypot(jk_a.sigma, jk_n.sigma);

    // PCA quality probe: one held-out no-atom frame, rms over fit pixels.
    {
        const auto probe = render_frame(zero_theta, fringes, ro, shot_id++);
        const auto rec = pca_reconstruct(probe, basis);
        double ss = 0.0;
        size_t n = 0;
        for (size_t i = 0; i < rec.residual.px.size(); ++i) {
            if (!basis.fit_mask[i]) continue;
            ss += rec.residual.px[i] * rec.residual.px[i];
            ++n;
        }
        summary.residual_rms_rel = std::sqrt(ss / double(n)) / probe.mean();
    }

    if (!out_dir.empty()) {
        const std::string p = out_path(out_dir, "imaging_summary.csv");
        std::ofstream f(p);
        f << "shots,injected,recovered,recovered_err,var_atoms,var_noatoms,n_estimate,"
             "residual_rms_rel\n";
        f << summary.shots << ',' << io::format_double(summary.injected) << ','
          << io::format_double(summary.recovered) << ','
          << io::format_double(summary.recovered_err) << ','
          << io::format_double(summary.var_atoms) << ','
          << io::format_double(summary.var_noatoms) << ','
          << io::format_double(summary.n_estimate) << ','
          << io::format_double(summary.residual_rms_rel) << '\n';
        if (!f) throw NumericError("failed writing " + p);
    }
    return summary;
}

} // namespace xxzsim::scenarios
