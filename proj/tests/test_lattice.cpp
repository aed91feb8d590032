#include <doctest.h>

#include <algorithm>
#include <set>

#include "xxzsim/errors.hpp"
#include "xxzsim/lattice.hpp"

using xxzsim::DomainError;
using xxzsim::LatticeGeometry;

TEST_CASE("open chain of 32 sites") {
    const auto g = LatticeGeometry::build({32, 1, 1});
    CHECK(g.n_sites() == 32);
    CHECK(g.dimension() == 1);
    CHECK(g.neighbors(0).size() == 1);
    CHECK(g.neighbors(31).size() == 1);
    for (int s = 1; s < 31; ++s) CHECK(g.neighbors(s).size() == 2);
    CHECK(g.n_bonds() == 31);
}

TEST_CASE("22^3 cube: interior coordination and hop-path multiplicity") {
    const auto g = LatticeGeometry::build({22, 22, 22});
    CHECK(g.n_sites() == 10648);
    const int interior = g.site_index(10, 11, 9);
    CHECK(g.neighbors(interior).size() == 6);
    CHECK(g.double_hop_paths(interior).size() == 30); // 6 * 5
    const int corner = g.site_index(0, 0, 0);
    CHECK(g.neighbors(corner).size() == 3);
}

TEST_CASE("minimal chain: single neighbor, no two-step paths") {
    const auto g = LatticeGeometry::build({2, 1, 1});
    CHECK(g.neighbors(0).size() == 1);
    CHECK(g.neighbors(1).size() == 1);
    CHECK(g.double_hop_paths(0).empty());
    CHECK(g.double_hop_paths(1).empty());
}

TEST_CASE("chain of 3: neighbor rows and end-site paths") {
    const auto g = LatticeGeometry::build({3, 1, 1});
    const auto nn1 = g.neighbors(1);
    CHECK(std::set<int>(nn1.begin(), nn1.end()) == std::set<int>{0, 2});
    const auto paths = g.double_hop_paths(0);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].mid == 1);
    CHECK(paths[0].dst == 2);
}

TEST_CASE("rejects invalid shapes") {
    CHECK_THROWS_AS(LatticeGeometry::build({1, 1, 1}), DomainError);
    CHECK_THROWS_AS(LatticeGeometry::build({0, 4, 1}), DomainError);
    CHECK_THROWS_AS(LatticeGeometry::build({4, 4, 1}), DomainError); // 2D out of scope
    CHECK_THROWS_AS(LatticeGeometry::build({3, 1, 1}).neighbors(3), DomainError);
    CHECK_THROWS_AS(LatticeGeometry::build({3, 1, 1}).neighbors(-1), DomainError);
}

TEST_CASE("neighbor relation is symmetric and paths avoid the origin") {
    for (const auto dims : {std::array<int, 3>{5, 5, 5}, {4, 4, 4}, {7, 1, 1}, {1, 6, 1}}) {
        const auto g = LatticeGeometry::build(dims);
        for (int s = 0; s < g.n_sites(); ++s) {
            for (int32_t j : g.neighbors(s)) {
                const auto back = g.neighbors(j);
                CHECK(std::find(back.begin(), back.end(), s) != back.end());
            }
            for (const auto& p : g.double_hop_paths(s)) {
                CHECK(p.dst != s);
                const auto nn_s = g.neighbors(s);
                CHECK(std::find(nn_s.begin(), nn_s.end(), p.mid) != nn_s.end());
                const auto nn_m = g.neighbors(p.mid);
                CHECK(std::find(nn_m.begin(), nn_m.end(), p.dst) != nn_m.end());
            }
        }
    }
}

TEST_CASE("bond count matches direct edge enumeration for small cubes") {
    for (int l = 2; l <= 5; ++l) {
        const auto g = LatticeGeometry::build({l, l, l});
        // d * L^d - boundary corrections: 3 axes with L^2 (L-1) bonds each.
        const int expected = 3 * l * l * (l - 1);
        CHECK(g.n_bonds() == expected);
        size_t half_sum = 0;
        for (int s = 0; s < g.n_sites(); ++s) half_sum += g.neighbors(s).size();
        CHECK(int(half_sum) == 2 * expected);
    }
}

TEST_CASE("interior two-step paths enumerate all 6x6 hop pairs except returns") {
    const auto g = LatticeGeometry::build({5, 5, 5});
    const int s = g.site_index(2, 2, 2);
    std::set<std::pair<int, int>> brute;
    for (int32_t mid : g.neighbors(s))
        for (int32_t dst : g.neighbors(mid))
            if (dst != s) brute.insert({mid, dst});
    std::set<std::pair<int, int>> table;
    for (const auto& p : g.double_hop_paths(s)) table.insert({p.mid, p.dst});
    CHECK(table == brute);
    CHECK(table.size() == 30);
}

TEST_CASE("periodic chain closes the ring") {
    const auto g = LatticeGeometry::build({8, 1, 1}, true);
    CHECK(g.neighbors(0).size() == 2);
    CHECK(g.neighbors(7).size() == 2);
    CHECK(g.n_bonds() == 8);
}

TEST_CASE("subsystem split is a balanced left/right partition") {
    const auto g = LatticeGeometry::build({32, 1, 1});
    int in_a = 0;
    for (int s = 0; s < g.n_sites(); ++s) in_a += g.in_subsystem_a(s);
    CHECK(in_a == 16);
    CHECK(g.in_subsystem_a(0));
    CHECK(!g.in_subsystem_a(31));

    const auto c = LatticeGeometry::build({22, 22, 22});
    int in_a3 = 0;
    for (int s = 0; s < c.n_sites(); ++s) in_a3 += c.in_subsystem_a(s);
    CHECK(in_a3 == 11 * 22 * 22);
}
