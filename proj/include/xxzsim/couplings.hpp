#pragma once

namespace xxzsim {

/// Bose-Hubbard inputs: tunneling and the three on-site interaction channels,
/// in any consistent energy unit. U values may be negative (attractive
/// channel); only zero is rejected.
struct HubbardParams {
    double t_tunnel = 0.0;
    double U_uu = 0.0;
    double U_dd = 0.0;
    double U_ud = 0.0;
};

/// Spin-model couplings derived by superexchange, plus the dimensionless
/// ratios the simulation engine actually consumes.
struct SpinCouplings {
    double J = 0.0;          // transverse exchange
    double Jz = 0.0;         // Ising coupling
    double hz = 0.0;         // density-dependent field per adjacent vacancy
    double delta = 0.0;      // Jz / J
    double J_hz_ratio = 0.0; // hz / J
    double t_over_J = 0.0;   // tunneling over |J|
};

struct SimUnitReport {
    SpinCouplings couplings;   // rescaled so |J| = 1
    double time_unit_seconds;  // wall-clock duration of one hbar/J
};

/// Superexchange map: J = -4 t^2 / U_ud,
/// Jz = 4 t^2 (1/U_ud - 1/U_uu - 1/U_dd), hz = 4 t^2 (1/U_uu - 1/U_dd).
SpinCouplings derive_couplings(const HubbardParams& p);

/// Rescale couplings to simulation units (|J| = 1) given the physical
/// exchange frequency J/hbar = 2*pi*J_hz, and report the time unit.
SimUnitReport to_sim_units(const SpinCouplings& c, double J_hz);

/// Couplings from the dimensionless ratios directly, with J = +1.
SpinCouplings couplings_from_ratios(double delta, double hz_over_J, double t_over_J);

} // namespace xxzsim
