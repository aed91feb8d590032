#include "xxzsim/dtwa.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <thread>

#include "xxzsim/errors.hpp"

namespace xxzsim::dtwa {

namespace {

/// Scratch buffers for one trajectory worker; sized once, reused per step.
struct Workspace {
    std::vector<double> kx, ky, kz;    // stage derivative
    std::vector<double> ax, ay, az;    // RK4 accumulator
    std::vector<double> tx, ty, tz;    // stage state
    std::vector<double> hz_site;       // frozen per-step field

    void resize(size_t n) {
        for (auto* v : {&kx, &ky, &kz, &ax, &ay, &az, &tx, &ty, &tz, &hz_site})
            v->assign(n, 0.0);
    }
};

/// dS/dt = B x S with B_i = sum_nn (J Sx, J Sy, Jz Sz) + (0,0,hz_i).
/// Hole and ghost sites carry S = 0, so they contribute nothing and stay put.
void derivative(const LatticeGeometry& g, const SpinCouplings& c,
                std::span<const double> sx, std::span<const double> sy,
                std::span<const double> sz, std::span<const double> hz_site,
                std::span<double> dx, std::span<double> dy, std::span<double> dz) {
    const int n = g.n_sites();
    const int width = g.coordination();
    const double J = c.J, Jz = c.Jz;
    const int32_t* nn = g.padded_neighbors(0).data();
    for (int i = 0; i < n; ++i) {
        double bx = 0.0, by = 0.0, bz = hz_site[size_t(i)];
        const int32_t* row = nn + size_t(i) * width;
        for (int s = 0; s < width; ++s) {
            const int32_t j = row[s];
            bx += sx[size_t(j)];
            by += sy[size_t(j)];
            bz += Jz * sz[size_t(j)];
        }
        bx *= J;
        by *= J;
        const double x = sx[size_t(i)], y = sy[size_t(i)], z = sz[size_t(i)];
        dx[size_t(i)] = by * z - bz * y;
        dy[size_t(i)] = bz * x - bx * z;
        dz[size_t(i)] = bx * y - by * x;
    }
    dx[size_t(n)] = dy[size_t(n)] = dz[size_t(n)] = 0.0;
}

void rk4_step(SpinConfig& cfg, const LatticeGeometry& g, const SpinCouplings& c,
              double dt, std::span<const double> hz_site, Workspace& w) {
    const size_t n = cfg.sx.size(); // includes ghost
    auto& kx = w.kx; auto& ky = w.ky; auto& kz = w.kz;
    auto& ax = w.ax; auto& ay = w.ay; auto& az = w.az;
    auto& tx = w.tx; auto& ty = w.ty; auto& tz = w.tz;

    // k1
    derivative(g, c, cfg.sx, cfg.sy, cfg.sz, hz_site, kx, ky, kz);
    for (size_t i = 0; i < n; ++i) {
        ax[i] = cfg.sx[i] + dt / 6.0 * kx[i];
        ay[i] = cfg.sy[i] + dt / 6.0 * ky[i];
        az[i] = cfg.sz[i] + dt / 6.0 * kz[i];
        tx[i] = cfg.sx[i] + 0.5 * dt * kx[i];
        ty[i] = cfg.sy[i] + 0.5 * dt * ky[i];
        tz[i] = cfg.sz[i] + 0.5 * dt * kz[i];
    }
    // k2
    derivative(g, c, tx, ty, tz, hz_site, kx, ky, kz);
    for (size_t i = 0; i < n; ++i) {
        ax[i] += dt / 3.0 * kx[i];
        ay[i] += dt / 3.0 * ky[i];
        az[i] += dt / 3.0 * kz[i];
        tx[i] = cfg.sx[i] + 0.5 * dt * kx[i];
        ty[i] = cfg.sy[i] + 0.5 * dt * ky[i];
        tz[i] = cfg.sz[i] + 0.5 * dt * kz[i];
    }
    // k3
    derivative(g, c, tx, ty, tz, hz_site, kx, ky, kz);
    for (size_t i = 0; i < n; ++i) {
        ax[i] += dt / 3.0 * kx[i];
        ay[i] += dt / 3.0 * ky[i];
        az[i] += dt / 3.0 * kz[i];
        tx[i] = cfg.sx[i] + dt * kx[i];
        ty[i] = cfg.sy[i] + dt * ky[i];
        tz[i] = cfg.sz[i] + dt * kz[i];
    }
    // k4
    derivative(g, c, tx, ty, tz, hz_site, kx, ky, kz);
    for (size_t i = 0; i < n; ++i) {
        cfg.sx[i] = ax[i] + dt / 6.0 * kx[i];
        cfg.sy[i] = ay[i] + dt / 6.0 * ky[i];
        cfg.sz[i] = az[i] + dt / 6.0 * kz[i];
    }
}

void swap_spin_with_hole(SpinConfig& cfg, int hole_site, int spin_site) {
    cfg.sx[size_t(hole_site)] = cfg.sx[size_t(spin_site)];
    cfg.sy[size_t(hole_site)] = cfg.sy[size_t(spin_site)];
    cfg.sz[size_t(hole_site)] = cfg.sz[size_t(spin_site)];
    cfg.sx[size_t(spin_site)] = 0.0;
    cfg.sy[size_t(spin_site)] = 0.0;
    cfg.sz[size_t(spin_site)] = 0.0;
    cfg.hole[size_t(hole_site)] = 0;
    cfg.hole[size_t(spin_site)] = 1;
}

void rotate_about_xy_axis(SpinConfig& cfg, int site, double axis_angle, double angle) {
    const double nx = std::cos(axis_angle), ny = std::sin(axis_angle);
    const double ct = std::cos(angle), st = std::sin(angle);
    const double x = cfg.sx[size_t(site)], y = cfg.sy[size_t(site)], z = cfg.sz[size_t(site)];
    // Rodrigues with n = (nx, ny, 0)
    const double dot = nx * x + ny * y;
    const double cx = ny * z, cy = -nx * z, cz = nx * y - ny * x;
    cfg.sx[size_t(site)] = x * ct + cx * st + nx * dot * (1.0 - ct);
    cfg.sy[size_t(site)] = y * ct + cy * st + ny * dot * (1.0 - ct);
    cfg.sz[size_t(site)] = z * ct + cz * st;
}

} // namespace

void EngineConfig::validate(const LatticeGeometry& g) const {
    if (!(dt > 0.0)) throw DomainError("dt must be > 0");
    if (n_steps < 1) throw DomainError("n_steps must be >= 1");
    if (hole_density < 0.0 || hole_density >= 1.0)
        throw DomainError("hole_density must lie in [0, 1)");
    if (hop_rate < 0.0) throw DomainError("hop_rate must be >= 0");
    if (alpha < 0.0) throw DomainError("alpha must be >= 0");
    if (enable_hopping && hop_rate * dt > 1.0)
        throw DomainError("dt * hop_rate exceeds 1: hop probability invalid");
    if (enable_spin_flip && effective_double_hop_rate(g) * dt > 1.0)
        throw DomainError("dt * double_hop_rate exceeds 1: probability invalid");
}

SpinConfig sample_initial(const LatticeGeometry& g, double hole_density,
                          const rng::Stream& rs, Axis polarization) {
    if (hole_density < 0.0 || hole_density >= 1.0)
        throw DomainError("hole_density must lie in [0, 1)");

    const int n = g.n_sites();
    SpinConfig cfg;
    cfg.sx.assign(size_t(n) + 1, 0.0);
    cfg.sy.assign(size_t(n) + 1, 0.0);
    cfg.sz.assign(size_t(n) + 1, 0.0);
    cfg.hole.assign(size_t(n), 0);

    for (int i = 0; i < n; ++i) {
        const auto b = rs.raw(0, rng::Draw::init_spins, uint32_t(i));
        const double p = (b[0] & 1u) ? 0.5 : -0.5;
        const double q = (b[1] & 1u) ? 0.5 : -0.5;
        if (polarization == Axis::x) {
            cfg.sx[size_t(i)] = 0.5;
            cfg.sy[size_t(i)] = p;
            cfg.sz[size_t(i)] = q;
        } else { // +z polarized, transverse signs random
            cfg.sx[size_t(i)] = p;
            cfg.sy[size_t(i)] = q;
            cfg.sz[size_t(i)] = 0.5;
        }
    }

    const int n_holes = int(std::lround(hole_density * n));
    if (n_holes > 0) {
        // Partial Fisher-Yates over the site list.
        std::vector<int32_t> idx(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) idx[size_t(i)] = i;
        cfg.hole_sites.reserve(size_t(n_holes));
        for (int k = 0; k < n_holes; ++k) {
            const uint32_t r =
                uint32_t(k) + rs.uniform_int(0, rng::Draw::init_holes, uint32_t(k), uint32_t(n - k));
            std::swap(idx[size_t(k)], idx[size_t(r)]);
            const int site = idx[size_t(k)];
            cfg.hole[size_t(site)] = 1;
            cfg.sx[size_t(site)] = cfg.sy[size_t(site)] = cfg.sz[size_t(site)] = 0.0;
            cfg.hole_sites.push_back(int32_t(site));
        }
    }
    cfg.n_atoms = n - n_holes;
    return cfg;
}

Vec3 local_field(const SpinConfig& cfg, const LatticeGeometry& g, int site,
                 const SpinCouplings& c, double hz, bool hz_field_on) {
    if (!cfg.occupied(site)) throw DomainError("local_field queried on a hole site");
    Vec3 b{0.0, 0.0, 0.0};
    int adjacent_holes = 0;
    for (int32_t j : g.neighbors(site)) {
        if (cfg.hole[size_t(j)]) {
            ++adjacent_holes;
            continue;
        }
        b[0] += c.J * cfg.sx[size_t(j)];
        b[1] += c.J * cfg.sy[size_t(j)];
        b[2] += c.Jz * cfg.sz[size_t(j)];
    }
    if (hz_field_on) b[2] += hz * adjacent_holes;
    return b;
}

void hz_field_map(const SpinConfig& cfg, const LatticeGeometry& g, double hz,
                  std::vector<double>& out) {
    out.assign(cfg.sx.size(), 0.0);
    for (int32_t h : cfg.hole_sites) {
        for (int32_t j : g.neighbors(h)) out[size_t(j)] += hz;
    }
    // Field on a hole site is irrelevant (S = 0) but zero it for tidiness.
    for (int32_t h : cfg.hole_sites) out[size_t(h)] = 0.0;
}

void precess_step(SpinConfig& cfg, const LatticeGeometry& g, const SpinCouplings& c,
                  double dt, std::span<const double> hz_site) {
    static thread_local Workspace w;
    if (w.kx.size() != cfg.sx.size()) w.resize(cfg.sx.size());
    rk4_step(cfg, g, c, dt, hz_site, w);
}

void hole_hop_step(SpinConfig& cfg, const LatticeGeometry& g, double prob,
                   const rng::Stream& rs, uint32_t step) {
    if (prob <= 0.0) return;
    for (size_t k = 0; k < cfg.hole_sites.size(); ++k) {
        const auto b = rs.raw(step, rng::Draw::hop, uint32_t(k));
        const double u = double(((uint64_t(b[0]) << 32) | b[1]) >> 11) * 0x1.0p-53;
        if (u >= prob) continue;
        const int site = cfg.hole_sites[k];
        const auto nns = g.neighbors(site);
        if (nns.empty()) continue;
        const uint32_t c = uint32_t((uint64_t(b[2]) * nns.size()) >> 32);
        const int32_t j = nns[c];
        if (cfg.hole[size_t(j)]) continue; // hole-hole collision: no-op
        swap_spin_with_hole(cfg, site, j);
        cfg.hole_sites[k] = j;
    }
}

void double_hop_step(SpinConfig& cfg, const LatticeGeometry& g, double prob,
                     double alpha, bool rotate_site_j, const rng::Stream& rs,
                     uint32_t step) {
    if (prob <= 0.0) return;
    for (size_t k = 0; k < cfg.hole_sites.size(); ++k) {
        const auto b = rs.raw(step, rng::Draw::double_hop, uint32_t(k));
        const double u = double(((uint64_t(b[0]) << 32) | b[1]) >> 11) * 0x1.0p-53;
        if (u >= prob) continue;

        const int origin = cfg.hole_sites[k];
        const auto nns = g.neighbors(origin);
        if (nns.empty()) continue;
        const int32_t mid = nns[uint32_t((uint64_t(b[2]) * nns.size()) >> 32)];

        // Second hop to any neighbor of mid except back to the origin.
        const auto mid_nns = g.neighbors(mid);
        const uint32_t n_fwd = uint32_t(mid_nns.size()) - 1;
        if (n_fwd == 0) continue;
        uint32_t pick = uint32_t((uint64_t(b[3]) * n_fwd) >> 32);
        int32_t dst = -1;
        for (int32_t cand : mid_nns) {
            if (cand == origin) continue;
            if (pick == 0) { dst = cand; break; }
            --pick;
        }

        if (cfg.hole[size_t(mid)] || cfg.hole[size_t(dst)]) continue; // collision: no-op

        // Sequential exchange: the spin from mid lands on the origin site,
        // the spin from dst lands on mid, the hole ends at dst.
        swap_spin_with_hole(cfg, origin, mid);
        swap_spin_with_hole(cfg, mid, dst);
        cfg.hole_sites[k] = dst;

        if (alpha > 0.0) {
            const auto r = rs.uniform2(step, rng::Draw::spin_rotation, uint32_t(k));
            const double axis_angle = 2.0 * M_PI * r[0];
            const double angle = alpha * 2.0 * M_PI * r[1];
            rotate_about_xy_axis(cfg, rotate_site_j ? mid : origin, axis_angle, angle);
        }
    }
}

void apply_global_rotation(SpinConfig& cfg, Axis axis, double angle) {
    const double ct = std::cos(angle), st = std::sin(angle);
    const int n = cfg.n_sites();
    for (int i = 0; i < n; ++i) {
        if (!cfg.occupied(i)) continue;
        double& x = cfg.sx[size_t(i)];
        double& y = cfg.sy[size_t(i)];
        double& z = cfg.sz[size_t(i)];
        double nx = x, ny = y, nz = z;
        switch (axis) {
            case Axis::x: ny = ct * y - st * z; nz = st * y + ct * z; break;
            case Axis::y: nz = ct * z - st * x; nx = st * z + ct * x; break;
            case Axis::z: nx = ct * x - st * y; ny = st * x + ct * y; break;
        }
        x = nx; y = ny; z = nz;
    }
}

StepRecord collect_sums(const SpinConfig& cfg, const LatticeGeometry& g) {
    StepRecord r;
    const int n = cfg.n_sites();
    for (int i = 0; i < n; ++i) {
        const double x = cfg.sx[size_t(i)], y = cfg.sy[size_t(i)], z = cfg.sz[size_t(i)];
        r.full.sx += x;
        r.full.sy += y;
        r.full.sz += z;
        if (g.in_subsystem_a(i)) {
            r.a.sx += x; r.a.sy += y; r.a.sz += z;
        } else {
            r.b.sx += x; r.b.sy += y; r.b.sz += z;
        }
    }
    return r;
}

TrajectoryResult run_trajectory(const LatticeGeometry& g, const SpinCouplings& c,
                                const EngineConfig& ec, uint32_t trajectory_index) {
    const rng::Stream rs(ec.seed, trajectory_index);
    SpinConfig cfg = sample_initial(g, ec.hole_density, rs,
                                    ec.start_pulse ? Axis::z : Axis::x);
    if (ec.start_pulse) apply_global_rotation(cfg, Axis::y, M_PI / 2.0);
    return run_trajectory_from(std::move(cfg), g, c, ec, trajectory_index);
}

TrajectoryResult run_trajectory_inplace(SpinConfig& cfg, const LatticeGeometry& g,
                                        const SpinCouplings& c, const EngineConfig& ec,
                                        uint32_t trajectory_index);

TrajectorySnapshot run_trajectory_capture(const LatticeGeometry& g,
                                          const SpinCouplings& c,
                                          const EngineConfig& ec,
                                          uint32_t trajectory_index) {
    const rng::Stream rs(ec.seed, trajectory_index);
    SpinConfig cfg = sample_initial(g, ec.hole_density, rs,
                                    ec.start_pulse ? Axis::z : Axis::x);
    if (ec.start_pulse) apply_global_rotation(cfg, Axis::y, M_PI / 2.0);
    TrajectorySnapshot snap;
    snap.final_state = std::move(cfg);
    snap.result = run_trajectory_inplace(snap.final_state, g, c, ec, trajectory_index);
    return snap;
}

TrajectoryResult run_trajectory_from(SpinConfig cfg, const LatticeGeometry& g,
                                     const SpinCouplings& c, const EngineConfig& ec,
                                     uint32_t trajectory_index) {
    return run_trajectory_inplace(cfg, g, c, ec, trajectory_index);
}

TrajectoryResult run_trajectory_inplace(SpinConfig& cfg, const LatticeGeometry& g,
                                        const SpinCouplings& c, const EngineConfig& ec,
                                        uint32_t trajectory_index) {
    ec.validate(g);
    const rng::Stream rs(ec.seed, trajectory_index);

    TrajectoryResult out;
    out.n_atoms = cfg.n_atoms;
    for (int i = 0; i < cfg.n_sites(); ++i) {
        if (!cfg.occupied(i)) continue;
        (g.in_subsystem_a(i) ? out.n_a : out.n_b)++;
    }
    out.records.reserve(size_t(ec.n_steps) + 1);
    out.records.push_back(collect_sums(cfg, g));

    const double hop_prob = ec.enable_hopping ? ec.hop_rate * ec.dt : 0.0;
    const double dhop_prob =
        ec.enable_spin_flip ? ec.effective_double_hop_rate(g) * ec.dt : 0.0;
    const bool hz_on = ec.enable_hz_field && ec.hz != 0.0;
    const int echo_at = ec.n_steps / 2;

    std::vector<double> hz_site(cfg.sx.size(), 0.0);
    for (int step = 0; step < ec.n_steps; ++step) {
        if (ec.echo && step == echo_at) apply_global_rotation(cfg, Axis::y, M_PI);
        if (hz_on) hz_field_map(cfg, g, ec.hz, hz_site);
        precess_step(cfg, g, c, ec.dt, hz_site);
        if (hop_prob > 0.0) hole_hop_step(cfg, g, hop_prob, rs, uint32_t(step));
        if (dhop_prob > 0.0)
            double_hop_step(cfg, g, dhop_prob, ec.alpha, ec.rotate_site_j, rs,
                            uint32_t(step));
        out.records.push_back(collect_sums(cfg, g));
    }
    return out;
}

std::vector<TrajectoryResult> run_trajectories(const LatticeGeometry& g,
                                               const SpinCouplings& c,
                                               const EngineConfig& ec, int m,
                                               int threads) {
    if (m < 1) throw DomainError("need at least one trajectory");
    ec.validate(g);
    std::vector<TrajectoryResult> results(static_cast<size_t>(m));
    const int n_workers = std::max(1, std::min(threads, m));
    if (n_workers == 1) {
        for (int i = 0; i < m; ++i)
            results[size_t(i)] = run_trajectory(g, c, ec, uint32_t(i));
        return results;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(size_t(n_workers));
    for (int w = 0; w < n_workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= m) return;
                results[size_t(i)] = run_trajectory(g, c, ec, uint32_t(i));
            }
        });
    }
    for (auto& t : pool) t.join();
    return results;
}

EnsembleMoments reduce_moments(const std::vector<TrajectoryResult>& results, double dt) {
    if (results.size() < 2) throw DomainError("moments need at least 2 trajectories");
    const size_t m = results.size();
    const size_t n_times = results.front().records.size();
    for (const auto& r : results) {
        if (r.records.size() != n_times)
            throw DomainError("trajectories have inconsistent lengths");
    }

    EnsembleMoments em;
    em.m_trajectories = int(m);
    em.times.resize(n_times);
    for (size_t k = 0; k < n_times; ++k) em.times[k] = double(k) * dt;
    em.at.resize(n_times);
    for (const auto& r : results) {
        em.n_atoms_mean += r.n_atoms;
        em.n_a_mean += r.n_a;
        em.n_b_mean += r.n_b;
    }
    em.n_atoms_mean /= double(m);
    em.n_a_mean /= double(m);
    em.n_b_mean /= double(m);

    auto region_sums = [](const StepRecord& rec, int region) -> RegionSums {
        switch (region) {
            case 0: return rec.full;
            case 1: return rec.a;
            case 2: return rec.b;
            default:
                return {rec.a.sx - rec.b.sx, rec.a.sy - rec.b.sy, rec.a.sz - rec.b.sz};
        }
    };

    for (size_t k = 0; k < n_times; ++k) {
        for (int region = 0; region < 4; ++region) {
            double sx = 0, sy = 0, sz = 0;
            double sxx = 0, syy = 0, szz = 0, syz = 0;
            for (const auto& r : results) {
                const RegionSums v = region_sums(r.records[k], region);
                sx += v.sx; sy += v.sy; sz += v.sz;
                sxx += v.sx * v.sx;
                syy += v.sy * v.sy;
                szz += v.sz * v.sz;
                syz += v.sy * v.sz;
            }
            MomentStats& s = em.at[k][size_t(region)];
            const double dm = double(m);
            s.mean_sx = sx / dm;
            s.mean_sy = sy / dm;
            s.mean_sz = sz / dm;
            const double vx = std::max(0.0, (sxx - sx * sx / dm) / (dm - 1.0));
            s.var_yy = std::max(0.0, (syy - sy * sy / dm) / (dm - 1.0));
            s.var_zz = std::max(0.0, (szz - sz * sz / dm) / (dm - 1.0));
            s.cov_yz = (syz - sy * sz / dm) / (dm - 1.0);
            s.se_sx = std::sqrt(vx / dm);
            s.se_sy = std::sqrt(s.var_yy / dm);
            s.se_sz = std::sqrt(s.var_zz / dm);
        }
    }
    return em;
}

EnsembleMoments run_ensemble(const LatticeGeometry& g, const SpinCouplings& c,
                             const EngineConfig& ec, int m, int threads) {
    if (m < 2) throw DomainError("run_ensemble needs M >= 2");
    return reduce_moments(run_trajectories(g, c, ec, m, threads), ec.dt);
}

} // namespace xxzsim::dtwa
