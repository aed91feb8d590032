#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace xxzsim::rng {

/// Philox-4x32-10 counter-based generator (Salmon et al., SC'11).
/// Every 128-bit block is a pure function of (counter, key), which is what
/// makes ensemble runs reproducible independent of thread count: each random
/// decision addresses its own block instead of consuming a shared sequence.
struct Philox4x32 {
    using ctr_t = std::array<uint32_t, 4>;
    using key_t = std::array<uint32_t, 2>;

    static ctr_t block(ctr_t x, key_t k) noexcept {
        constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
        constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
        for (int r = 0; r < 10; ++r) {
            const uint64_t p0 = uint64_t(M0) * x[0];
            const uint64_t p1 = uint64_t(M1) * x[2];
            x = {uint32_t(p1 >> 32) ^ x[1] ^ k[0], uint32_t(p1),
                 uint32_t(p0 >> 32) ^ x[3] ^ k[1], uint32_t(p0)};
            k[0] += W0;
            k[1] += W1;
        }
        return x;
    }
};

/// Independent draw families within one run. Keeping the tag in the counter
/// guarantees e.g. hop decisions never alias initial-state sampling.
enum class Draw : uint32_t {
    init_spins = 1,
    init_holes = 2,
    hop = 3,
    double_hop = 4,
    spin_rotation = 5,
    phase_noise = 6,
    detection = 7,
    imaging = 8,
};

/// One logical random stream, keyed by (seed, trajectory index).
/// All draws are addressed by (step, purpose, index).
class Stream {
public:
    Stream(uint64_t seed, uint32_t trajectory) noexcept
        : key_{uint32_t(seed), uint32_t(seed >> 32)}, traj_(trajectory) {}

    std::array<uint32_t, 4> raw(uint32_t step, Draw purpose, uint32_t index) const noexcept {
        return Philox4x32::block({traj_, step, static_cast<uint32_t>(purpose), index}, key_);
    }

    /// Two iid U[0,1) values with 53-bit resolution from one block.
    std::array<double, 2> uniform2(uint32_t step, Draw purpose, uint32_t index) const noexcept {
        const auto b = raw(step, purpose, index);
        return {to_unit(b[0], b[1]), to_unit(b[2], b[3])};
    }

    double uniform(uint32_t step, Draw purpose, uint32_t index) const noexcept {
        return uniform2(step, purpose, index)[0];
    }

    /// Uniform integer in [0, n) via the 64-bit multiply trick.
    uint32_t uniform_int(uint32_t step, Draw purpose, uint32_t index, uint32_t n) const noexcept {
        const auto b = raw(step, purpose, index);
        return uint32_t((uint64_t(b[0]) * n) >> 32);
    }

    /// Two iid standard normals (Box-Muller) from one block.
    std::array<double, 2> normal2(uint32_t step, Draw purpose, uint32_t index) const noexcept {
        const auto u = uniform2(step, purpose, index);
        const double r = std::sqrt(-2.0 * std::log1p(-u[0])); // 1-u0 in (0,1]
        const double phi = 2.0 * M_PI * u[1];
        return {r * std::cos(phi), r * std::sin(phi)};
    }

private:
    static double to_unit(uint32_t hi, uint32_t lo) noexcept {
        const uint64_t x = (uint64_t(hi) << 32) | lo;
        return double(x >> 11) * 0x1.0p-53;
    }

    Philox4x32::key_t key_;
    uint32_t traj_;
};

} // namespace xxzsim::rng
