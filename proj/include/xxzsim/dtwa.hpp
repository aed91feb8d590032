#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "xxzsim/couplings.hpp"
#include "xxzsim/lattice.hpp"
#include "xxzsim/rng.hpp"

namespace xxzsim::dtwa {

using Vec3 = std::array<double, 3>;

enum class Axis { x, y, z };

/// One phase-space point: classical spin vectors plus a vacancy mask.
/// Arrays carry one trailing ghost slot (index n_sites) pinned to zero so the
/// padded neighbor rows of LatticeGeometry can be gathered branch-free.
/// Hole sites keep S = (0,0,0) exactly, so they drop out of exchange sums.
struct SpinConfig {
    std::vector<double> sx, sy, sz;
    std::vector<uint8_t> hole;         // per site, ghost excluded
    std::vector<int32_t> hole_sites;   // stable iteration order for events
    int n_atoms = 0;

    int n_sites() const noexcept { return int(hole.size()); }
    bool occupied(int site) const noexcept { return hole[size_t(site)] == 0; }
    Vec3 spin(int site) const noexcept {
        return {sx[size_t(site)], sy[size_t(site)], sz[size_t(site)]};
    }
};

struct EngineConfig {
    double dt = 0.0176;            // time step, units of hbar/J
    int n_steps = 200;
    double hole_density = 0.0;     // in [0, 1)
    double hop_rate = 0.0;         // single-hop rate per hole (t/J)
    double double_hop_rate = -1.0; // two-step hop rate; < 0 selects 2z-1
    double alpha = 1.0;            // rotation angle drawn from [0, alpha*2*pi]
    double hz = 0.0;               // z field per adjacent hole, units of J
    bool enable_hopping = true;
    bool enable_hz_field = true;
    bool enable_spin_flip = true;  // gates the two-step hop + rotation process
    bool echo = false;             // pi pulse about y at the midpoint step
    bool start_pulse = false;      // sample along z, then apply the pi/2 pulse
    bool rotate_site_j = false;    // rotate the spin now at the intermediate
                                   // site instead of the one that moved from it
    uint64_t seed = 1;

    double effective_double_hop_rate(const LatticeGeometry& g) const noexcept {
        return double_hop_rate < 0.0 ? double(g.coordination() - 1) : double_hop_rate;
    }
    void validate(const LatticeGeometry& g) const;
};

struct RegionSums {
    double sx = 0.0, sy = 0.0, sz = 0.0;
};

/// Collective sums recorded at one time step: full system and the two
/// contact-minimal halves a/b.
struct StepRecord {
    RegionSums full, a, b;
};

struct TrajectoryResult {
    int n_atoms = 0, n_a = 0, n_b = 0;
    std::vector<StepRecord> records; // n_steps + 1 entries, t_k = k*dt
};

/// First and second moments of the collective sums over an ensemble.
/// Second moments are central (variance/covariance of the sums).
struct MomentStats {
    double mean_sx = 0.0, mean_sy = 0.0, mean_sz = 0.0;
    double se_sx = 0.0, se_sy = 0.0, se_sz = 0.0;
    double var_yy = 0.0, cov_yz = 0.0, var_zz = 0.0;
};

struct EnsembleMoments {
    std::vector<double> times;
    int m_trajectories = 0;
    double n_atoms_mean = 0.0, n_a_mean = 0.0, n_b_mean = 0.0;
    // region index: 0 full, 1 a, 2 b, 3 difference a-b
    std::vector<std::array<MomentStats, 4>> at;
};

/// Draw the discrete Wigner initial state: every occupied site gets
/// S = (1/2, ±1/2, ±1/2) with independent transverse signs, and exactly
/// round(hole_density * n_sites) holes placed uniformly without replacement.
SpinConfig sample_initial(const LatticeGeometry& g, double hole_density,
                          const rng::Stream& rs, Axis polarization = Axis::x);

/// Exchange field at an occupied site: sum of (J Sx, J Sy, Jz Sz) over
/// occupied neighbors plus (0, 0, hz * adjacent holes) when the field is on.
Vec3 local_field(const SpinConfig& cfg, const LatticeGeometry& g, int site,
                 const SpinCouplings& c, double hz, bool hz_field_on);

/// One RK4 step of dS/dt = B x S for the whole lattice. The hz contribution
/// is frozen at the hole positions passed in (piecewise constant over dt);
/// exchange fields are recomputed at every substage.
void precess_step(SpinConfig& cfg, const LatticeGeometry& g, const SpinCouplings& c,
                  double dt, std::span<const double> hz_site);

/// Per-site hz field from the current hole positions (hz * adjacent holes).
void hz_field_map(const SpinConfig& cfg, const LatticeGeometry& g, double hz,
                  std::vector<double>& out);

/// Each hole independently swaps with one uniformly chosen neighbor with
/// probability prob; hole-hole swaps are no-ops.
void hole_hop_step(SpinConfig& cfg, const LatticeGeometry& g, double prob,
                   const rng::Stream& rs, uint32_t step);

/// Two-step exchange with probability prob per hole: pick mid in nn(hole),
/// dst in nn(mid) away from the hole, exchange sequentially, then rotate the
/// bypassed spin by a random angle in [0, alpha*2*pi] about a random xy axis.
void double_hop_step(SpinConfig& cfg, const LatticeGeometry& g, double prob,
                     double alpha, bool rotate_site_j, const rng::Stream& rs,
                     uint32_t step);

/// Rotate every occupied spin about a lab axis.
void apply_global_rotation(SpinConfig& cfg, Axis axis, double angle);

StepRecord collect_sums(const SpinConfig& cfg, const LatticeGeometry& g);

/// One full protocol run: sample, optional pi/2 pulse, then per step
/// {hz field refresh, RK4 precession, single hops, double hops}, with the
/// echo pi pulse about y after n_steps/2 steps when enabled.
TrajectoryResult run_trajectory(const LatticeGeometry& g, const SpinCouplings& c,
                                const EngineConfig& ec, uint32_t trajectory_index);

/// Same, but starting from a caller-supplied phase-space point (tests).
TrajectoryResult run_trajectory_from(SpinConfig cfg, const LatticeGeometry& g,
                                     const SpinCouplings& c, const EngineConfig& ec,
                                     uint32_t trajectory_index);

/// Trajectory run that also hands back the final phase-space point, for
/// consumers that need per-site spins (imaging projections).
struct TrajectorySnapshot {
    TrajectoryResult result;
    SpinConfig final_state;
};
TrajectorySnapshot run_trajectory_capture(const LatticeGeometry& g,
                                          const SpinCouplings& c,
                                          const EngineConfig& ec,
                                          uint32_t trajectory_index);

/// M independent trajectories; trajectory i is keyed by (seed, i) so the
/// result is bit-identical for any thread count.
std::vector<TrajectoryResult> run_trajectories(const LatticeGeometry& g,
                                               const SpinCouplings& c,
                                               const EngineConfig& ec, int m,
                                               int threads = 1);

EnsembleMoments reduce_moments(const std::vector<TrajectoryResult>& results, double dt);

EnsembleMoments run_ensemble(const LatticeGeometry& g, const SpinCouplings& c,
                             const EngineConfig& ec, int m, int threads = 1);

} // namespace xxzsim::dtwa
