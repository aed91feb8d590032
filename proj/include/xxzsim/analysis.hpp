#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "xxzsim/dtwa.hpp"

namespace xxzsim::analysis {

/// Central second moments of (Sy_tot, Sz_tot).
struct MomentMatrix {
    double var_yy = 0.0;
    double cov_yz = 0.0;
    double var_zz = 0.0;
};

struct VarianceScan {
    double var_min = 0.0;
    double var_max = 0.0;
    double theta_min = 0.0; // in [0, pi)
    double theta_max = 0.0;
    bool degenerate = false;
};

/// Closed-form extrema of Var[cos(t)Sz + sin(t)Sy] over continuous theta,
/// from the eigen-decomposition of the 2x2 moment matrix.
VarianceScan variance_scan(const MomentMatrix& m);

/// Extrema restricted to a supplied angle grid.
VarianceScan variance_scan_grid(const MomentMatrix& m, std::span<const double> thetas);

struct SqueezingParameter {
    double xi2 = 0.0;
    double db = 0.0;
    bool infinite = false; // zero spin length
};

/// Wineland parameter xi^2 = N Var_min / <Sx>^2 and its dB value.
SqueezingParameter squeezing_parameter(double var_min, double mean_sx, double n_atoms);

/// One measurement: collective S_theta for the two subsystems at fixed (t, theta).
struct ShotRecord {
    double t = 0.0;
    double theta = 0.0;
    double s_a = 0.0;
    double s_b = 0.0;
    double n_a = 0.0;
    double n_b = 0.0;
};

struct SubsystemVariance {
    double var_sum = 0.0;  // Var[S_a + S_b]
    double var_diff = 0.0; // Var[S_a - S_b]
};

/// Sample variances of the sum and difference of the subsystem signals.
SubsystemVariance subsystem_variance(std::span<const ShotRecord> shots);

/// Project trajectory records at one time index onto S_theta shots.
std::vector<ShotRecord> make_shots(const std::vector<dtwa::TrajectoryResult>& recs,
                                   size_t time_index, double dt, double theta);

enum class NoiseMode { quasi_static, fast };

/// Global phase-noise emulation: a z rotation applied to the recorded
/// collective vectors. Quasi-static noise accumulates equally in the two
/// echo halves and is cancelled by the echo pulse; fast noise is independent
/// per half and survives. Without an echo both add up.
void inject_phase_noise(std::vector<dtwa::TrajectoryResult>& recs, double rms,
                        NoiseMode mode, bool echo, uint64_t seed);

/// Shot-noise subtraction: (4 var_atoms - 4 var_noatoms) / n. A negative
/// result is statistically allowed; callers should treat it as flagged.
double shot_noise_subtract(double var_atoms, double var_noatoms, double n_atoms);

struct JackknifeResult {
    double estimate = 0.0;
    double sigma = 0.0;
};

/// Leave-one-out jackknife of an arbitrary scalar estimator.
JackknifeResult jackknife(std::span<const double> samples,
                          const std::function<double(std::span<const double>)>& estimator);

/// One squeezing-curve point with jackknife errors.
struct CurvePoint {
    double t = 0.0;
    double spin_length = 0.0; // 2<Sx>/N, signed
    double spin_length_err = 0.0;
    double var_min = 0.0; // 4 Var/N
    double var_max = 0.0;
    double var_min_err = 0.0;
    double var_max_err = 0.0;
    double theta_min = 0.0;
    double xi2 = 0.0;
    double xi2_err = 0.0;
    double db = 0.0;
    bool degenerate = false;
};

enum class Region { full = 0, a = 1, b = 2, diff = 3 };

struct CurveOptions {
    Region variance_region = Region::full; // which variance enters the curve
    std::vector<double> theta_grid;        // empty selects the closed form
    bool jackknife_errors = true;
};

/// Squeezing curve from raw trajectory records. The variance may be taken
/// from the full system or from the subsystem difference (normalized by the
/// mean atom number either way); the spin length always uses the full system.
std::vector<CurvePoint> squeezing_curve(const std::vector<dtwa::TrajectoryResult>& recs,
                                        double dt, const CurveOptions& opt = {});

} // namespace xxzsim::analysis
