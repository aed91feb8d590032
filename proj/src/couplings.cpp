#include "xxzsim/couplings.hpp"

#include <cmath>

#include "xxzsim/errors.hpp"

namespace xxzsim {

SpinCouplings derive_couplings(const HubbardParams& p) {
    if (!(p.t_tunnel > 0.0)) throw DomainError("t_tunnel must be > 0");
    if (p.U_ud == 0.0 || p.U_uu == 0.0 || p.U_dd == 0.0)
        throw DomainError("every U channel must be nonzero");

    const double t2 = 4.0 * p.t_tunnel * p.t_tunnel;
    SpinCouplings c;
    c.J = -t2 / p.U_ud;
    c.Jz = t2 * (1.0 / p.U_ud - 1.0 / p.U_uu - 1.0 / p.U_dd);
    c.hz = t2 * (1.0 / p.U_uu - 1.0 / p.U_dd);
    c.delta = c.Jz / c.J;
    c.J_hz_ratio = c.hz / c.J;
    c.t_over_J = p.t_tunnel / std::abs(c.J);
    return c;
}

SimUnitReport to_sim_units(const SpinCouplings& c, double J_hz) {
    if (!(J_hz > 0.0)) throw DomainError("J frequency must be > 0");
    const double scale = std::abs(c.J);
    if (!(scale > 0.0)) throw DomainError("cannot rescale couplings with J = 0");

    SimUnitReport r;
    r.couplings = c;
    r.couplings.J = c.J / scale;
    r.couplings.Jz = c.Jz / scale;
    r.couplings.hz = c.hz / scale;
    r.couplings.delta = r.couplings.Jz / r.couplings.J;
    r.couplings.J_hz_ratio = r.couplings.hz / r.couplings.J;
    r.couplings.t_over_J = c.t_over_J;
    r.time_unit_seconds = 1.0 / (2.0 * M_PI * J_hz);
    return r;
}

SpinCouplings couplings_from_ratios(double delta, double hz_over_J, double t_over_J) {
    SpinCouplings c;
    c.J = 1.0;
    c.Jz = delta;
    c.hz = hz_over_J;
    c.delta = delta;
    c.J_hz_ratio = hz_over_J;
    c.t_over_J = t_over_J;
    return c;
}

} // namespace xxzsim
