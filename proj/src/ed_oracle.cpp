#include "xxzsim/ed_oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "xxzsim/analysis.hpp"
#include "xxzsim/errors.hpp"

namespace xxzsim::ed {

double QuantumState::norm() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return std::sqrt(s);
}

XxzEd::XxzEd(const LatticeGeometry& g, const SpinCouplings& c) {
    n_ = g.n_sites();
    if (n_ > max_spins)
        throw DomainError("exact evolution capped at 14 spins");
    dim_ = size_t(1) << n_;
    j_ = c.J;
    jz_ = c.Jz;
    bonds_ = g.bonds();

    diag_.assign(dim_, 0.0);
    mz_.assign(dim_, 0.0);
    for (size_t n = 0; n < dim_; ++n) {
        double mz = 0.0;
        for (int i = 0; i < n_; ++i) mz += (n >> i) & 1 ? 0.5 : -0.5;
        mz_[n] = mz;
        double d = 0.0;
        for (const auto& b : bonds_) {
            const double zi = (n >> b[0]) & 1 ? 0.5 : -0.5;
            const double zj = (n >> b[1]) & 1 ? 0.5 : -0.5;
            d += jz_ * zi * zj;
        }
        diag_[n] = d;
    }
    // Sum of per-bond spectral norms bounds the spectrum of H.
    h_bound_ = double(bonds_.size()) * (std::abs(j_) / 2.0 + std::abs(jz_) / 4.0) + 1e-9;
}

QuantumState XxzEd::x_polarized() const {
    QuantumState psi;
    psi.n_spins = n_;
    psi.amps.assign(dim_, amplitude(1.0 / std::sqrt(double(dim_)), 0.0));
    return psi;
}

void XxzEd::apply_h(const std::vector<amplitude>& in, std::vector<amplitude>& out) const {
    out.assign(dim_, amplitude(0.0, 0.0));
    for (size_t n = 0; n < dim_; ++n) out[n] = diag_[n] * in[n];
    const double half_j = j_ / 2.0;
    for (const auto& b : bonds_) {
        const size_t mask = (size_t(1) << b[0]) | (size_t(1) << b[1]);
        const size_t bit_i = size_t(1) << b[0];
        const size_t bit_j = size_t(1) << b[1];
        for (size_t n = 0; n < dim_; ++n) {
            const bool up_i = n & bit_i;
            const bool up_j = n & bit_j;
            if (up_i != up_j) out[n ^ mask] += half_j * in[n];
        }
    }
}

void XxzEd::evolve(QuantumState& psi, double t) const {
    if (psi.amps.size() != dim_) throw DomainError("state dimension mismatch");
    if (t == 0.0) return;

    // exp(-i a x t) = sum_k (2 - d_k0) (-i)^k J_k(a t) T_k(x), x = H/a.
    const double a = h_bound_;
    const double z = a * t;
    const double az = std::abs(z);

    std::vector<amplitude> tkm1 = psi.amps; // T_0 psi
    std::vector<amplitude> tk(dim_);        // T_1 psi
    std::vector<amplitude> scratch(dim_);
    apply_h(tkm1, tk);
    for (size_t i = 0; i < dim_; ++i) tk[i] /= a;

    std::vector<amplitude> acc(dim_);
    const double j0 = std::cyl_bessel_j(0, az);
    for (size_t i = 0; i < dim_; ++i) acc[i] = j0 * tkm1[i];

    const int k_max = int(az + 40.0 + 8.0 * std::cbrt(az + 1.0));
    amplitude ik(0.0, -1.0); // (-i)^k for k = 1
    for (int k = 1; k <= k_max; ++k) {
        double jk = std::cyl_bessel_j(k, az);
        if (z < 0.0 && (k & 1)) jk = -jk; // J_k(-z) = (-1)^k J_k(z)
        const amplitude coef = 2.0 * ik * jk;
        for (size_t i = 0; i < dim_; ++i) acc[i] += coef * tk[i];
        if (k == k_max) break;
        // T_{k+1} = 2 x T_k - T_{k-1}
        apply_h(tk, scratch);
        for (size_t i = 0; i < dim_; ++i) {
            const amplitude next = 2.0 / a * scratch[i] - tkm1[i];
            tkm1[i] = tk[i];
            tk[i] = next;
        }
        ik *= amplitude(0.0, -1.0);
    }
    psi.amps = std::move(acc);

    const double n = psi.norm();
    if (std::abs(n - 1.0) > 1e-8)
        throw NumericError("Chebyshev propagation lost unitarity");
}

void XxzEd::evolve_dense(QuantumState& psi, double t) const {
    if (n_ > max_dense_spins)
        throw DomainError("dense evolution capped at 8 spins");
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(long(dim_), long(dim_));
    std::vector<amplitude> col(dim_), hcol(dim_);
    for (size_t c = 0; c < dim_; ++c) {
        std::fill(col.begin(), col.end(), amplitude(0, 0));
        col[c] = 1.0;
        apply_h(col, hcol);
        for (size_t r = 0; r < dim_; ++r) h(long(r), long(c)) = hcol[r].real();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const auto& v = es.eigenvectors();
    const auto& e = es.eigenvalues();

    Eigen::VectorXcd x(static_cast<long>(dim_));
    for (size_t i = 0; i < dim_; ++i) x(long(i)) = psi.amps[i];
    Eigen::VectorXcd y = v.transpose() * x;
    for (long i = 0; i < y.size(); ++i)
        y(i) *= std::exp(amplitude(0.0, -e(i) * t));
    x = v * y;
    for (size_t i = 0; i < dim_; ++i) psi.amps[i] = x(long(i));
}

double XxzEd::energy(const QuantumState& psi) const {
    std::vector<amplitude> h(dim_);
    apply_h(psi.amps, h);
    amplitude e(0, 0);
    for (size_t i = 0; i < dim_; ++i) e += std::conj(psi.amps[i]) * h[i];
    return e.real();
}

void XxzEd::apply_sy(const std::vector<amplitude>& in, std::vector<amplitude>& out) const {
    out.assign(dim_, amplitude(0, 0));
    const amplitude up(0.0, -0.5);   // S+ / (2i)
    const amplitude down(0.0, 0.5);  // -S- / (2i)
    for (int i = 0; i < n_; ++i) {
        const size_t bit = size_t(1) << i;
        for (size_t n = 0; n < dim_; ++n) {
            out[n ^ bit] += (n & bit ? down : up) * in[n];
        }
    }
}

CollectiveMoments XxzEd::moments(const QuantumState& psi) const {
    CollectiveMoments m;
    std::vector<amplitude> y(dim_), z(dim_);
    apply_sy(psi.amps, y);
    for (size_t n = 0; n < dim_; ++n) z[n] = mz_[n] * psi.amps[n];

    amplitude sy(0, 0), sz(0, 0), syy(0, 0), szz(0, 0), syz(0, 0);
    for (size_t n = 0; n < dim_; ++n) {
        sy += std::conj(psi.amps[n]) * y[n];
        sz += std::conj(psi.amps[n]) * z[n];
        syy += std::conj(y[n]) * y[n];
        szz += std::conj(z[n]) * z[n];
        syz += std::conj(y[n]) * z[n];
    }
    double sx = 0.0;
    for (int i = 0; i < n_; ++i) {
        const size_t bit = size_t(1) << i;
        double acc = 0.0;
        for (size_t n = 0; n < dim_; ++n)
            acc += (std::conj(psi.amps[n]) * psi.amps[n ^ bit]).real();
        sx += 0.5 * acc;
    }
    m.sx = sx;
    m.sy = sy.real();
    m.sz = sz.real();
    m.var_yy = syy.real() - m.sy * m.sy;
    m.var_zz = szz.real() - m.sz * m.sz;
    // Re<y|z> = <(SySz + SzSy)/2>, the symmetrized cross moment.
    m.cov_yz = syz.real() - m.sy * m.sz;
    return m;
}

XxzEd::ThetaMoments XxzEd::collective_moments(const QuantumState& psi, double theta) const {
    std::vector<amplitude> y(dim_), st(dim_);
    apply_sy(psi.amps, y);
    const double ct = std::cos(theta), s = std::sin(theta);
    for (size_t n = 0; n < dim_; ++n) st[n] = ct * mz_[n] * psi.amps[n] + s * y[n];

    ThetaMoments out{};
    amplitude mean(0, 0);
    double sq = 0.0;
    for (size_t n = 0; n < dim_; ++n) {
        mean += std::conj(psi.amps[n]) * st[n];
        sq += std::norm(st[n]);
    }
    double sx = 0.0;
    for (int i = 0; i < n_; ++i) {
        const size_t bit = size_t(1) << i;
        double acc = 0.0;
        for (size_t n = 0; n < dim_; ++n)
            acc += (std::conj(psi.amps[n]) * psi.amps[n ^ bit]).real();
        sx += 0.5 * acc;
    }
    out.sx = sx;
    out.s_theta = mean.real();
    out.s_theta_sq = sq;
    return out;
}

std::vector<OracleCurvePoint> oracle_curves(const LatticeGeometry& g,
                                            const SpinCouplings& c,
                                            const std::vector<double>& times,
                                            const std::vector<double>& thetas) {
    XxzEd ed(g, c);
    QuantumState psi = ed.x_polarized();
    const double n = double(ed.n_spins());

    std::vector<OracleCurvePoint> out;
    out.reserve(times.size());
    double t_now = 0.0;
    for (double t : times) {
        if (t < t_now) throw DomainError("time grid must be ascending");
        if (t > t_now) {
            ed.evolve(psi, t - t_now);
            t_now = t;
        }
        const CollectiveMoments m = ed.moments(psi);
        analysis::MomentMatrix mm{m.var_yy, m.cov_yz, m.var_zz};
        analysis::VarianceScan scan = thetas.empty()
                                          ? analysis::variance_scan(mm)
                                          : analysis::variance_scan_grid(mm, thetas);
        OracleCurvePoint p;
        p.t = t;
        p.spin_length = 2.0 * m.sx / n;
        p.var_min = 4.0 * scan.var_min / n;
        p.var_max = 4.0 * scan.var_max / n;
        p.theta_min = scan.theta_min;
        const auto sq = analysis::squeezing_parameter(scan.var_min, m.sx, n);
        p.xi2 = sq.xi2;
        p.db = sq.db;
        out.push_back(p);
    }
    return out;
}

} // namespace xxzsim::ed
