#include <doctest.h>

#include <cmath>

#include "xxzsim/analysis.hpp"
#include "xxzsim/ed_oracle.hpp"
#include "xxzsim/errors.hpp"

using namespace xxzsim;
using namespace xxzsim::ed;

namespace {
LatticeGeometry chain(int n) { return LatticeGeometry::build({n, 1, 1}); }
}

TEST_CASE("zero-time evolution is the identity") {
    const auto g = chain(6);
    const XxzEd ed(g, couplings_from_ratios(-0.18, 0, 0));
    auto psi = ed.x_polarized();
    const auto ref = psi.amps;
    ed.evolve(psi, 0.0);
    CHECK(psi.amps == ref);
}

TEST_CASE("two spins: spin length follows cos((J - Jz) t / 2) to 1e-8") {
    const auto g = chain(2);
    for (double delta : {-0.18, 0.0, 0.7}) {
        const auto c = couplings_from_ratios(delta, 0, 0);
        const XxzEd ed(g, c);
        auto psi = ed.x_polarized();
        double t_now = 0.0;
        for (double t : {0.25, 0.8, 1.7, M_PI / (1.0 - delta) * 2.0}) {
            ed.evolve(psi, t - t_now);
            t_now = t;
            const auto m = ed.moments(psi);
            const double want = std::cos((c.J - c.Jz) * t / 2.0);
            CHECK(2.0 * m.sx / 2.0 == doctest::Approx(want).epsilon(1e-8));
        }
    }
}

TEST_CASE("isotropic point: the x-polarized state is stationary") {
    const auto g = chain(7);
    const XxzEd ed(g, couplings_from_ratios(1.0, 0, 0));
    auto psi = ed.x_polarized();
    ed.evolve(psi, 1.3);
    const auto m = ed.moments(psi);
    CHECK(m.sx == doctest::Approx(3.5).epsilon(1e-9));
    CHECK(m.var_yy == doctest::Approx(7.0 / 4.0).epsilon(1e-8));
    CHECK(m.var_zz == doctest::Approx(7.0 / 4.0).epsilon(1e-8));
    CHECK(std::abs(m.cov_yz) < 1e-9);
}

TEST_CASE("coherent x state: full length, isotropic transverse noise") {
    const auto g = chain(9);
    const XxzEd ed(g, couplings_from_ratios(-0.18, 0, 0));
    const auto psi = ed.x_polarized();
    const auto m = ed.moments(psi);
    CHECK(m.sx == doctest::Approx(4.5).epsilon(1e-12));
    CHECK(m.var_yy == doctest::Approx(9.0 / 4.0).epsilon(1e-12));
    CHECK(m.var_zz == doctest::Approx(9.0 / 4.0).epsilon(1e-12));
    for (double th : {0.0, 0.4, 1.1, 2.9}) {
        const auto tm = ed.collective_moments(psi, th);
        CHECK(tm.s_theta_sq - tm.s_theta * tm.s_theta ==
              doctest::Approx(9.0 / 4.0).epsilon(1e-10));
    }
}

TEST_CASE("frozen four-spin moments at the operating anisotropy") {
    // Reference values from dense diagonalization of the 4-site chain,
    // delta = -0.18, x-polarized initial state.
    const auto g = chain(4);
    const XxzEd ed(g, couplings_from_ratios(-0.18, 0, 0));
    auto psi = ed.x_polarized();
    ed.evolve(psi, 0.3);
    auto m = ed.moments(psi);
    CHECK(m.sx == doctest::Approx(1.95350513439509).epsilon(1e-10));
    CHECK(m.var_yy == doctest::Approx(1.03120611073739).epsilon(1e-10));
    CHECK(m.var_zz == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.cov_yz == doctest::Approx(-0.26252607016906).epsilon(1e-9));

    ed.evolve(psi, 0.4); // to t = 0.7
    m = ed.moments(psi);
    CHECK(m.sx == doctest::Approx(1.75849461008589).epsilon(1e-10));
    CHECK(m.var_yy == doctest::Approx(1.16643437613384).epsilon(1e-10));
    CHECK(m.var_zz == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.cov_yz == doctest::Approx(-0.58229524163775).epsilon(1e-9));
}

TEST_CASE("frozen eight-spin squeezing observables at t = 0.6") {
    const auto g = chain(8);
    const XxzEd ed(g, couplings_from_ratios(-0.18, 0, 0));
    auto psi = ed.x_polarized();
    ed.evolve(psi, 0.6);
    const auto m = ed.moments(psi);
    const auto scan = analysis::variance_scan({m.var_yy, m.cov_yz, m.var_zz});
    CHECK(2.0 * m.sx / 8.0 == doctest::Approx(0.896283579822).epsilon(1e-9));
    CHECK(4.0 * scan.var_min / 8.0 == doctest::Approx(0.494850113293).epsilon(1e-9));
    CHECK(4.0 * scan.var_max / 8.0 == doctest::Approx(1.691324206386).epsilon(1e-9));
    CHECK(scan.theta_min == doctest::Approx(0.707279503899).epsilon(1e-8));
}

TEST_CASE("Chebyshev agrees with the dense propagator to 1e-8 (N <= 8)") {
    for (int n : {3, 5, 8}) {
        const auto g = chain(n);
        const XxzEd ed(g, couplings_from_ratios(-0.18, 0, 0));
        auto a = ed.x_polarized();
        auto b = ed.x_polarized();
        ed.evolve(a, 1.7);
        ed.evolve_dense(b, 1.7);
        const auto ma = ed.moments(a);
        const auto mb = ed.moments(b);
        CHECK(ma.sx == doctest::Approx(mb.sx).epsilon(1e-8));
        CHECK(ma.var_yy == doctest::Approx(mb.var_yy).epsilon(1e-8));
        CHECK(ma.var_zz == doctest::Approx(mb.var_zz).epsilon(1e-8));
        CHECK(ma.cov_yz == doctest::Approx(mb.cov_yz).epsilon(1e-7));
        double worst = 0.0;
        for (size_t i = 0; i < a.amps.size(); ++i)
            worst = std::max(worst, std::abs(a.amps[i] - b.amps[i]));
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("conservation laws: norm, energy, total magnetization") {
    const auto g = chain(10);
    const XxzEd ed(g, couplings_from_ratios(-0.18, 0, 0));
    auto psi = ed.x_polarized();
    const double e0 = ed.energy(psi);
    double t_now = 0.0;
    for (double t : {0.3, 1.0, 2.5, 4.0}) {
        ed.evolve(psi, t - t_now);
        t_now = t;
        CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
        CHECK(ed.energy(psi) == doctest::Approx(e0).epsilon(1e-9));
        const auto m = ed.moments(psi);
        CHECK(std::abs(m.sz) < 1e-8);                       // <Sz_tot> conserved at 0
        CHECK(m.var_zz == doctest::Approx(2.5).epsilon(1e-8)); // Sz_tot conserved op
    }
}

TEST_CASE("theta = 0 moments equal the direct Sz^2 computation") {
    const auto g = chain(6);
    const XxzEd ed(g, couplings_from_ratios(-0.18, 0, 0));
    auto psi = ed.x_polarized();
    ed.evolve(psi, 0.8);
    const auto m = ed.moments(psi);
    const auto tm = ed.collective_moments(psi, 0.0);
    CHECK(tm.s_theta == doctest::Approx(m.sz).epsilon(1e-12));
    CHECK(tm.s_theta_sq - tm.s_theta * tm.s_theta ==
          doctest::Approx(m.var_zz).epsilon(1e-10));
}

TEST_CASE("oracle curves: unit squeezing at t=0, squeezing develops, cap enforced") {
    CHECK_THROWS_AS(XxzEd(chain(15), couplings_from_ratios(-0.18, 0, 0)), DomainError);
    {
        const XxzEd big(chain(9), couplings_from_ratios(-0.18, 0, 0));
        auto psi = big.x_polarized();
        CHECK_THROWS_AS(big.evolve_dense(psi, 0.1), DomainError);
    }

    const auto g = chain(12);
    const auto c = couplings_from_ratios(-0.18, 0, 0);
    const auto curve = oracle_curves(g, c, {0.0, 0.4, 0.6, 0.8});
    CHECK(curve[0].xi2 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(curve[0].spin_length == doctest::Approx(1.0).epsilon(1e-12));
    // squeezing dips below one near t ~ 0.6 at this size
    CHECK(curve[2].xi2 < 1.0);
    CHECK(curve[2].xi2 == doctest::Approx(0.59884497).epsilon(1e-6));
    CHECK(curve[2].db > 0.0);
}

TEST_CASE("grid extrema converge to the closed form on a dense grid") {
    const auto g = chain(8);
    const auto c = couplings_from_ratios(-0.18, 0, 0);
    const XxzEd ed(g, c);
    auto psi = ed.x_polarized();
    ed.evolve(psi, 0.6);
    const auto m = ed.moments(psi);
    const analysis::MomentMatrix mm{m.var_yy, m.cov_yz, m.var_zz};
    const auto closed = analysis::variance_scan(mm);
    std::vector<double> grid(10000);
    for (size_t i = 0; i < grid.size(); ++i) grid[i] = M_PI * double(i) / double(grid.size());
    const auto gridscan = analysis::variance_scan_grid(mm, grid);
    CHECK(gridscan.var_min == doctest::Approx(closed.var_min).epsilon(1e-3));
    CHECK(gridscan.var_max == doctest::Approx(closed.var_max).epsilon(1e-3));
    CHECK(std::abs(gridscan.theta_min - closed.theta_min) < 1e-3);
}
