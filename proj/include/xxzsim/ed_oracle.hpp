#pragma once

#include <complex>
#include <vector>

#include "xxzsim/couplings.hpp"
#include "xxzsim/lattice.hpp"

namespace xxzsim::ed {

using amplitude = std::complex<double>;

/// Pure state of N spin-1/2 sites in the computational z basis
/// (bit i set = spin i up).
struct QuantumState {
    int n_spins = 0;
    std::vector<amplitude> amps;

    double norm() const;
};

/// Collective first and second moments of (Sy_tot, Sz_tot) plus the mean
/// spin length direction Sx_tot.
struct CollectiveMoments {
    double sx = 0.0, sy = 0.0, sz = 0.0;
    double var_yy = 0.0, cov_yz = 0.0, var_zz = 0.0; // central, symmetrized
};

/// Exact evolution of the hole-free XXZ model on small lattices.
/// Chebyshev expansion of exp(-iHt) applied matrix-free; a dense
/// eigendecomposition path is kept as an independent cross-check.
class XxzEd {
public:
    static constexpr int max_spins = 14;
    static constexpr int max_dense_spins = 8;

    XxzEd(const LatticeGeometry& g, const SpinCouplings& c);

    int n_spins() const noexcept { return n_; }

    QuantumState x_polarized() const;

    /// psi -> exp(-iHt) psi via Chebyshev; norm error <= 1e-10.
    void evolve(QuantumState& psi, double t) const;

    /// Same propagator through dense eigendecomposition (N <= 8 only).
    void evolve_dense(QuantumState& psi, double t) const;

    void apply_h(const std::vector<amplitude>& in, std::vector<amplitude>& out) const;

    double energy(const QuantumState& psi) const;

    CollectiveMoments moments(const QuantumState& psi) const;

    /// (<Sx_tot>, <S_theta>, <S_theta^2>) with S_theta = cos(t)Sz + sin(t)Sy.
    struct ThetaMoments {
        double sx, s_theta, s_theta_sq;
    };
    ThetaMoments collective_moments(const QuantumState& psi, double theta) const;

private:
    int n_ = 0;
    size_t dim_ = 0;
    double j_ = 0.0, jz_ = 0.0;
    double h_bound_ = 0.0; // spectral radius bound for Chebyshev scaling
    std::vector<std::array<int32_t, 2>> bonds_;
    std::vector<double> diag_;   // Ising diagonal
    std::vector<double> mz_;     // Sz_tot diagonal

    void apply_sy(const std::vector<amplitude>& in, std::vector<amplitude>& out) const;
};

/// One squeezing-curve sample produced by exact evolution.
struct OracleCurvePoint {
    double t = 0.0;
    double spin_length = 0.0; // 2<Sx>/N
    double var_min = 0.0;     // 4 Var/N, closed-form minimum over theta
    double var_max = 0.0;
    double theta_min = 0.0;
    double xi2 = 0.0;
    double db = 0.0;
};

/// Evolve through the (ascending) time grid and evaluate squeezing
/// observables at each point. An empty theta grid selects the closed form;
/// otherwise extrema are taken over the supplied angles.
std::vector<OracleCurvePoint> oracle_curves(const LatticeGeometry& g,
                                            const SpinCouplings& c,
                                            const std::vector<double>& times,
                                            const std::vector<double>& thetas = {});

} // namespace xxzsim::ed
