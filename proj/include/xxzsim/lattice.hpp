#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace xxzsim {

/// Chain (L,1,1) or cubic (L,L,L) lattice with open boundaries by default.
/// Site indexing is row-major with x fastest: idx = x + Lx*(y + Ly*z).
/// Immutable after construction; shared read-only by trajectory workers.
class LatticeGeometry {
public:
    /// A two-step hop path i -> mid -> dst with dst != i.
    struct HopPath {
        int32_t mid;
        int32_t dst;
    };

    static LatticeGeometry build(std::array<int, 3> dims, bool periodic = false);

    int n_sites() const noexcept { return n_sites_; }
    int dimension() const noexcept { return dimension_; }
    std::array<int, 3> dims() const noexcept { return dims_; }
    bool periodic() const noexcept { return periodic_; }

    /// Maximum coordination 2d; boundary sites have fewer neighbors.
    int coordination() const noexcept { return 2 * dimension_; }

    std::span<const int32_t> neighbors(int site) const {
        check_site(site);
        return {nn_.data() + size_t(site) * max_nn_, size_t(nn_count_[size_t(site)])};
    }

    std::span<const HopPath> double_hop_paths(int site) const {
        check_site(site);
        return {paths_.data() + path_offset_[size_t(site)],
                path_offset_[size_t(site) + 1] - path_offset_[size_t(site)]};
    }

    /// Padded neighbor row of fixed width coordination(); unused slots point
    /// at the ghost site n_sites(), whose spin is pinned to zero by the engine.
    std::span<const int32_t> padded_neighbors(int site) const noexcept {
        return {nn_.data() + size_t(site) * max_nn_, size_t(max_nn_)};
    }

    int site_index(int x, int y, int z) const noexcept {
        return x + dims_[0] * (y + dims_[1] * z);
    }
    std::array<int, 3> site_coords(int site) const noexcept {
        return {site % dims_[0], (site / dims_[0]) % dims_[1], site / (dims_[0] * dims_[1])};
    }

    /// Left half along x (subsystem a); the rest is subsystem b.
    bool in_subsystem_a(int site) const noexcept { return subsystem_a_[size_t(site)] != 0; }

    int n_bonds() const noexcept { return n_bonds_; }

    /// Unique bond list (i < j), used by the exact-evolution module.
    const std::vector<std::array<int32_t, 2>>& bonds() const noexcept { return bonds_; }

private:
    void check_site(int site) const;

    std::array<int, 3> dims_{};
    int dimension_ = 0;
    int n_sites_ = 0;
    int n_bonds_ = 0;
    int max_nn_ = 0;
    bool periodic_ = false;
    std::vector<int32_t> nn_;          // n_sites * max_nn, ghost padded
    std::vector<uint8_t> nn_count_;    // actual neighbor counts
    std::vector<HopPath> paths_;       // CSR payload
    std::vector<size_t> path_offset_;  // n_sites + 1
    std::vector<uint8_t> subsystem_a_;
    std::vector<std::array<int32_t, 2>> bonds_;
};

} // namespace xxzsim
