#include "xxzsim/lattice.hpp"

#include <algorithm>
#include <string>

#include "xxzsim/errors.hpp"

namespace xxzsim {

LatticeGeometry LatticeGeometry::build(std::array<int, 3> dims, bool periodic) {
    for (int d : dims) {
        if (d < 1) throw DomainError("lattice dims must be >= 1");
    }
    const long long prod = 1ll * dims[0] * dims[1] * dims[2];
    if (prod < 2) throw DomainError("lattice needs at least 2 sites");

    int extended = 0;
    for (int d : dims) extended += (d > 1);
    // Chains may point along any axis; planes are out of scope.
    if (extended == 2) throw DomainError("2D lattices are not supported");

    LatticeGeometry g;
    g.dims_ = dims;
    g.dimension_ = extended == 3 ? 3 : 1;
    g.n_sites_ = int(prod);
    g.periodic_ = periodic;
    g.max_nn_ = 2 * g.dimension_;

    const int ghost = g.n_sites_;
    g.nn_.assign(size_t(g.n_sites_) * g.max_nn_, ghost);
    g.nn_count_.assign(size_t(g.n_sites_), 0);
    g.subsystem_a_.assign(size_t(g.n_sites_), 0);

    for (int s = 0; s < g.n_sites_; ++s) {
        const auto c = g.site_coords(s);
        int slot = 0;
        for (int axis = 0; axis < 3; ++axis) {
            if (dims[size_t(axis)] < 2) continue;
            for (int dir : {-1, +1}) {
                auto nc = c;
                nc[size_t(axis)] += dir;
                if (nc[size_t(axis)] < 0 || nc[size_t(axis)] >= dims[size_t(axis)]) {
                    if (!periodic) continue;
                    nc[size_t(axis)] = (nc[size_t(axis)] + dims[size_t(axis)]) % dims[size_t(axis)];
                    if (nc == c) continue; // L=2 periodic would duplicate the bond
                }
                g.nn_[size_t(s) * g.max_nn_ + slot++] = g.site_index(nc[0], nc[1], nc[2]);
            }
        }
        g.nn_count_[size_t(s)] = uint8_t(slot);
        g.subsystem_a_[size_t(s)] = uint8_t(c[0] < dims[0] / 2 + dims[0] % 2 ? 1 : 0);
    }

    // Subsystem a is the left half along the longest axis in a chain geometry;
    // for a chain along y or z redo the split on that axis.
    if (g.dimension_ == 1) {
        int axis = 0;
        for (int a = 0; a < 3; ++a)
            if (dims[size_t(a)] > 1) axis = a;
        const int half = dims[size_t(axis)] / 2 + dims[size_t(axis)] % 2;
        for (int s = 0; s < g.n_sites_; ++s)
            g.subsystem_a_[size_t(s)] = uint8_t(g.site_coords(s)[size_t(axis)] < half ? 1 : 0);
    }

    // Bonds (i < j, each pair once).
    for (int s = 0; s < g.n_sites_; ++s) {
        for (int32_t j : g.neighbors(s)) {
            if (s < j) g.bonds_.push_back({int32_t(s), j});
        }
    }
    g.n_bonds_ = int(g.bonds_.size());

    // Two-step hop paths: mid in nn(i), dst in nn(mid), dst != i.
    g.path_offset_.assign(size_t(g.n_sites_) + 1, 0);
    for (int s = 0; s < g.n_sites_; ++s) {
        size_t count = 0;
        for (int32_t mid : g.neighbors(s)) {
            for (int32_t dst : g.neighbors(mid)) {
                if (dst != s) ++count;
            }
        }
        g.path_offset_[size_t(s) + 1] = g.path_offset_[size_t(s)] + count;
    }
    g.paths_.resize(g.path_offset_.back());
    for (int s = 0; s < g.n_sites_; ++s) {
        size_t at = g.path_offset_[size_t(s)];
        for (int32_t mid : g.neighbors(s)) {
            for (int32_t dst : g.neighbors(mid)) {
                if (dst != s) g.paths_[at++] = {mid, dst};
            }
        }
    }
    return g;
}

void LatticeGeometry::check_site(int site) const {
    if (site < 0 || site >= n_sites_)
        throw DomainError("site index " + std::to_string(site) + " out of range");
}

} // namespace xxzsim
