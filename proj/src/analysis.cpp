#include "xxzsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xxzsim/errors.hpp"
#include "xxzsim/rng.hpp"

namespace xxzsim::analysis {

namespace {

double wrap_to_pi(double theta) {
    theta = std::fmod(theta, M_PI);
    if (theta < 0.0) theta += M_PI;
    return theta;
}

double variance_at(const MomentMatrix& m, double theta) {
    const double s = std::sin(theta), c = std::cos(theta);
    return s * s * m.var_yy + c * c * m.var_zz + 2.0 * s * c * m.cov_yz;
}

} // namespace

VarianceScan variance_scan(const MomentMatrix& m) {
    VarianceScan out;
    const double tr = m.var_yy + m.var_zz;
    const double half_diff = 0.5 * (m.var_yy - m.var_zz);
    const double disc = std::sqrt(half_diff * half_diff + m.cov_yz * m.cov_yz);
    out.var_min = std::max(0.0, 0.5 * tr - disc);
    out.var_max = 0.5 * tr + disc;

    if (disc <= 1e-12 * std::max(tr, 1e-300)) {
        out.degenerate = true;
        out.theta_min = 0.0;
        out.theta_max = 0.0;
        return out;
    }
    // Eigenvector of the 2x2 matrix in (y, z) coordinates; theta measured
    // from z, so theta = atan2(v_y, v_z).
    const double lmin = 0.5 * tr - disc;
    double vy, vz;
    if (std::abs(m.cov_yz) > 1e-300) {
        vy = m.cov_yz;
        vz = lmin - m.var_yy;
    } else if (m.var_yy < m.var_zz) {
        vy = 1.0;
        vz = 0.0;
    } else {
        vy = 0.0;
        vz = 1.0;
    }
    out.theta_min = wrap_to_pi(std::atan2(vy, vz));
    out.theta_max = wrap_to_pi(out.theta_min + M_PI / 2.0);
    return out;
}

VarianceScan variance_scan_grid(const MomentMatrix& m, std::span<const double> thetas) {
    if (thetas.empty()) return variance_scan(m);
    VarianceScan out;
    out.var_min = std::numeric_limits<double>::infinity();
    out.var_max = -std::numeric_limits<double>::infinity();
    for (double th : thetas) {
        const double v = variance_at(m, th);
        if (v < out.var_min) {
            out.var_min = v;
            out.theta_min = wrap_to_pi(th);
        }
        if (v > out.var_max) {
            out.var_max = v;
            out.theta_max = wrap_to_pi(th);
        }
    }
    out.degenerate =
        (out.var_max - out.var_min) <= 1e-12 * std::max(out.var_max, 1e-300);
    return out;
}

SqueezingParameter squeezing_parameter(double var_min, double mean_sx, double n_atoms) {
    if (!(n_atoms > 0.0)) throw DomainError("atom number must be positive");
    SqueezingParameter p;
    if (mean_sx == 0.0) {
        p.infinite = true;
        p.xi2 = std::numeric_limits<double>::infinity();
        p.db = -std::numeric_limits<double>::infinity();
        return p;
    }
    p.xi2 = n_atoms * var_min / (mean_sx * mean_sx);
    p.db = -10.0 * std::log10(p.xi2);
    return p;
}

SubsystemVariance subsystem_variance(std::span<const ShotRecord> shots) {
    if (shots.size() < 2) throw DomainError("subsystem_variance needs >= 2 shots");
    const double m = double(shots.size());
    double s_sum = 0, s_diff = 0, ss_sum = 0, ss_diff = 0;
    for (const auto& s : shots) {
        const double u = s.s_a + s.s_b;
        const double d = s.s_a - s.s_b;
        s_sum += u;
        s_diff += d;
        ss_sum += u * u;
        ss_diff += d * d;
    }
    SubsystemVariance out;
    out.var_sum = std::max(0.0, (ss_sum - s_sum * s_sum / m) / (m - 1.0));
    out.var_diff = std::max(0.0, (ss_diff - s_diff * s_diff / m) / (m - 1.0));
    return out;
}

std::vector<ShotRecord> make_shots(const std::vector<dtwa::TrajectoryResult>& recs,
                                   size_t time_index, double dt, double theta) {
    std::vector<ShotRecord> shots;
    shots.reserve(recs.size());
    const double ct = std::cos(theta), st = std::sin(theta);
    for (const auto& r : recs) {
        if (time_index >= r.records.size())
            throw DomainError("time index out of range for trajectory record");
        const auto& rec = r.records[time_index];
        ShotRecord s;
        s.t = double(time_index) * dt;
        s.theta = theta;
        s.s_a = ct * rec.a.sz + st * rec.a.sy;
        s.s_b = ct * rec.b.sz + st * rec.b.sy;
        s.n_a = double(r.n_a);
        s.n_b = double(r.n_b);
        shots.push_back(s);
    }
    return shots;
}

void inject_phase_noise(std::vector<dtwa::TrajectoryResult>& recs, double rms,
                        NoiseMode mode, bool echo, uint64_t seed) {
    if (rms < 0.0) throw DomainError("noise rms must be >= 0");
    if (rms == 0.0) return;
    for (size_t i = 0; i < recs.size(); ++i) {
        const rng::Stream rs(seed, uint32_t(i));
        for (size_t k = 0; k < recs[i].records.size(); ++k) {
            const auto g = rs.normal2(uint32_t(k), rng::Draw::phase_noise, 0);
            double phi1, phi2;
            if (mode == NoiseMode::quasi_static) {
                phi1 = phi2 = 0.5 * rms * g[0];
            } else {
                phi1 = rms * M_SQRT1_2 * g[0];
                phi2 = rms * M_SQRT1_2 * g[1];
            }
            const double net = echo ? phi1 - phi2 : phi1 + phi2;
            if (net == 0.0) continue;
            const double c = std::cos(net), s = std::sin(net);
            auto rotate = [&](dtwa::RegionSums& v) {
                const double x = v.sx, y = v.sy;
                v.sx = c * x - s * y;
                v.sy = s * x + c * y;
            };
            rotate(recs[i].records[k].full);
            rotate(recs[i].records[k].a);
            rotate(recs[i].records[k].b);
        }
    }
}

double shot_noise_subtract(double var_atoms, double var_noatoms, double n_atoms) {
    if (!(n_atoms > 0.0)) throw DomainError("atom number must be positive");
    return (4.0 * var_atoms - 4.0 * var_noatoms) / n_atoms;
}

JackknifeResult jackknife(std::span<const double> samples,
                          const std::function<double(std::span<const double>)>& estimator) {
    const size_t m = samples.size();
    if (m < 3) throw DomainError("jackknife needs >= 3 samples");
    const double full = estimator(samples);

    std::vector<double> buf(m - 1);
    std::vector<double> loo(m);
    for (size_t i = 0; i < m; ++i) {
        std::copy(samples.begin(), samples.begin() + long(i), buf.begin());
        std::copy(samples.begin() + long(i) + 1, samples.end(), buf.begin() + long(i));
        loo[i] = estimator(buf);
    }
    double mean = 0.0;
    for (double v : loo) mean += v;
    mean /= double(m);

    double ss = 0.0;
    for (double v : loo) ss += (v - mean) * (v - mean);

    JackknifeResult r;
    r.estimate = double(m) * full - double(m - 1) * mean; // bias corrected
    r.sigma = std::sqrt((double(m) - 1.0) / double(m) * ss);
    return r;
}

namespace {

/// Sufficient statistics for one time slice, supporting O(1) leave-one-out.
struct SliceSums {
    double sx = 0, sy = 0, sz = 0;
    double syy = 0, szz = 0, syz = 0, sxx = 0;
};

struct SliceDerived {
    double var_min = 0, var_max = 0, theta_min = 0, xi2 = 0;
    bool degenerate = false;
};

SliceDerived derive(const SliceSums& s, double m, double n_norm) {
    SliceDerived d;
    MomentMatrix mm;
    mm.var_yy = std::max(0.0, (s.syy - s.sy * s.sy / m) / (m - 1.0));
    mm.var_zz = std::max(0.0, (s.szz - s.sz * s.sz / m) / (m - 1.0));
    mm.cov_yz = (s.syz - s.sy * s.sz / m) / (m - 1.0);
    const VarianceScan scan = variance_scan(mm);
    d.var_min = 4.0 * scan.var_min / n_norm;
    d.var_max = 4.0 * scan.var_max / n_norm;
    d.theta_min = scan.theta_min;
    d.degenerate = scan.degenerate;
    const double mean_sx = s.sx / m;
    d.xi2 = mean_sx != 0.0 ? n_norm * scan.var_min / (mean_sx * mean_sx)
                           : std::numeric_limits<double>::infinity();
    return d;
}

} // namespace

std::vector<CurvePoint> squeezing_curve(const std::vector<dtwa::TrajectoryResult>& recs,
                                        double dt, const CurveOptions& opt) {
    if (recs.size() < 2) throw DomainError("squeezing_curve needs >= 2 trajectories");
    const size_t m = recs.size();
    const size_t n_times = recs.front().records.size();

    double n_norm = 0.0;
    for (const auto& r : recs) n_norm += r.n_atoms;
    n_norm /= double(m);
    if (!(n_norm > 0.0)) throw DomainError("no atoms in ensemble");

    auto region_of = [&](const dtwa::StepRecord& rec) -> dtwa::RegionSums {
        switch (opt.variance_region) {
            case Region::full: return rec.full;
            case Region::a: return rec.a;
            case Region::b: return rec.b;
            default:
                return {rec.a.sx - rec.b.sx, rec.a.sy - rec.b.sy, rec.a.sz - rec.b.sz};
        }
    };

    std::vector<CurvePoint> curve(n_times);
    std::vector<double> vy(m), vz(m), vx(m);
    for (size_t k = 0; k < n_times; ++k) {
        SliceSums sums;
        for (size_t i = 0; i < m; ++i) {
            const auto& rec = recs[i].records[k];
            const dtwa::RegionSums v = region_of(rec);
            vx[i] = rec.full.sx;
            vy[i] = v.sy;
            vz[i] = v.sz;
            sums.sx += vx[i];
            sums.sy += vy[i];
            sums.sz += vz[i];
            sums.sxx += vx[i] * vx[i];
            sums.syy += vy[i] * vy[i];
            sums.szz += vz[i] * vz[i];
            sums.syz += vy[i] * vz[i];
        }

        CurvePoint& p = curve[k];
        p.t = double(k) * dt;

        if (!opt.theta_grid.empty()) {
            // Grid-restricted extrema requested: evaluate on the grid, keep
            // jackknife errors from the closed form (identical to 1e-3).
            MomentMatrix mm;
            mm.var_yy = (sums.syy - sums.sy * sums.sy / double(m)) / (double(m) - 1.0);
            mm.var_zz = (sums.szz - sums.sz * sums.sz / double(m)) / (double(m) - 1.0);
            mm.cov_yz = (sums.syz - sums.sy * sums.sz / double(m)) / (double(m) - 1.0);
            const VarianceScan scan = variance_scan_grid(mm, opt.theta_grid);
            p.var_min = 4.0 * scan.var_min / n_norm;
            p.var_max = 4.0 * scan.var_max / n_norm;
            p.theta_min = scan.theta_min;
            p.degenerate = scan.degenerate;
            const double mean_sx = sums.sx / double(m);
            p.xi2 = mean_sx != 0.0 ? n_norm * scan.var_min / (mean_sx * mean_sx)
                                   : std::numeric_limits<double>::infinity();
        } else {
            const SliceDerived d = derive(sums, double(m), n_norm);
            p.var_min = d.var_min;
            p.var_max = d.var_max;
            p.theta_min = d.theta_min;
            p.degenerate = d.degenerate;
            p.xi2 = d.xi2;
        }
        p.spin_length = 2.0 * (sums.sx / double(m)) / n_norm;
        p.db = -10.0 * std::log10(p.xi2);

        const double var_sx =
            std::max(0.0, (sums.sxx - sums.sx * sums.sx / double(m)) / (double(m) - 1.0));
        p.spin_length_err = 2.0 * std::sqrt(var_sx / double(m)) / n_norm;

        if (opt.jackknife_errors) {
            double mu_vmin = 0, mu_vmax = 0, mu_xi = 0;
            double ss_vmin = 0, ss_vmax = 0, ss_xi = 0;
            std::vector<double> jvmin(m), jvmax(m), jxi(m);
            for (size_t i = 0; i < m; ++i) {
                SliceSums s = sums;
                s.sx -= vx[i];
                s.sy -= vy[i];
                s.sz -= vz[i];
                s.sxx -= vx[i] * vx[i];
                s.syy -= vy[i] * vy[i];
                s.szz -= vz[i] * vz[i];
                s.syz -= vy[i] * vz[i];
                const SliceDerived d = derive(s, double(m - 1), n_norm);
                jvmin[i] = d.var_min;
                jvmax[i] = d.var_max;
                jxi[i] = d.xi2;
                mu_vmin += d.var_min;
                mu_vmax += d.var_max;
                mu_xi += d.xi2;
            }
            mu_vmin /= double(m);
            mu_vmax /= double(m);
            mu_xi /= double(m);
            for (size_t i = 0; i < m; ++i) {
                ss_vmin += (jvmin[i] - mu_vmin) * (jvmin[i] - mu_vmin);
                ss_vmax += (jvmax[i] - mu_vmax) * (jvmax[i] - mu_vmax);
                ss_xi += (jxi[i] - mu_xi) * (jxi[i] - mu_xi);
            }
            const double f = (double(m) - 1.0) / double(m);
            p.var_min_err = std::sqrt(f * ss_vmin);
            p.var_max_err = std::sqrt(f * ss_vmax);
            p.xi2_err = std::isfinite(mu_xi) ? std::sqrt(f * ss_xi) : 0.0;
        }
    }
    return curve;
}

} // namespace xxzsim::analysis
