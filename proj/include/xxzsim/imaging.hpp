#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xxzsim/lattice.hpp"

namespace xxzsim::imaging {

/// Pixel grid of photon counts. Values are non-negative reals before photon
/// noise and integer-valued after Poisson sampling.
struct ImageFrame {
    int h = 0, w = 0;
    std::vector<double> px;

    double& at(int r, int c) { return px[size_t(r) * w + c]; }
    double at(int r, int c) const { return px[size_t(r) * w + c]; }
    double mean() const;
};

/// Binary raster IO: header (magic "XZIM", u32 version, u32 h, u32 w,
/// u32 dtype=1 for float64) followed by row-major little-endian doubles.
void write_frame(const std::string& path, const ImageFrame& f);
ImageFrame read_frame(const std::string& path);

/// Gaussian synthetic cloud plus the imaging-law constants.
struct CloudModel {
    double cx = 31.5, cy = 31.5; // pixel center
    double sigma_px = 4.5;       // Gaussian radius
    double n_atoms = 6000.0;     // total atom number
    double delta = 35.0;         // detuning in half-linewidths
    double sigma0_px = 0.6;      // resonant cross-section, pixel-area units

    /// Column density (atoms per pixel) of the full cloud.
    double density(double x, double y) const;

    /// Phase per unit column imbalance: (sigma0/4) * delta / (1 + delta^2).
    double phase_per_imbalance() const;
};

/// Sum of drifting sinusoidal modes multiplying the illumination field.
/// The per-shot phases perform a Gaussian random walk, which is the
/// low-rank structure the PCA basis is meant to absorb.
struct FringeModel {
    int n_modes = 24;
    double min_amplitude = 0.005;
    double max_amplitude = 0.03;
    double max_wavenumber = 0.8; // rad/px
    double drift_sigma = 0.35;   // per-shot phase drift, rad
    uint64_t seed = 99;

    /// Multiplicative fringe field for a given shot index.
    void field(int h, int w, uint32_t shot, ImageFrame& out) const;
};

struct RoiSpec {
    double cx = 31.5, cy = 31.5;
    double radius = 14.0;
    double gap = 2.0; // excluded band width along each axis

    void validate() const;
    /// Quadrant id 1..4 for a pixel, or 0 if outside the ROI or in the gap.
    int quadrant(int r, int c) const;
};

/// Per-pixel phase map from a column-imbalance map (n_up - n_down per pixel).
ImageFrame phase_map(const ImageFrame& imbalance, const CloudModel& cloud);

struct RenderOptions {
    double photons = 10000.0;  // incident photons per pixel (mean count = /2)
    double blur_fwhm_px = 5.0; // optical resolution, 0 disables
    bool poisson_noise = true;
    uint64_t seed = 7;
};

/// CCD intensity photons * fringe * (1 - sin(blur(theta))) / 2, then
/// per-pixel Poisson sampling. Frame index keys both fringe drift and noise.
ImageFrame render_frame(const ImageFrame& theta, const FringeModel& fringes,
                        const RenderOptions& opt, uint32_t shot);

struct PcaBasis {
    int h = 0, w = 0;
    int k = 0;                      // retained components
    std::vector<double> mean;       // mean frame of the pool
    std::vector<double> comps;      // k x (h*w), orthonormal on the fit mask
    std::vector<uint8_t> fit_mask;  // 1 = pixel used for fitting
};

/// Principal components of a no-atom frame pool, orthonormalized under the
/// masked inner product so reconstruction is a projection. Components with
/// negligible variance are dropped (pool of identical frames -> k = 1 effective).
PcaBasis pca_fit(const std::vector<ImageFrame>& pool, int k,
                 const std::vector<uint8_t>& atom_mask);

struct Reconstruction {
    ImageFrame background;
    ImageFrame residual; // frame - background
};

/// Least-squares background over the pixels outside the atom mask.
Reconstruction pca_reconstruct(const ImageFrame& frame, const PcaBasis& basis);

/// Circular atom mask (1 inside radius) centered on the cloud.
std::vector<uint8_t> circular_mask(int h, int w, double cx, double cy, double radius);

struct QuadrantSignal {
    double s_a = 0.0;           // spin estimate, quadrants 1 + 3
    double s_b = 0.0;           // quadrants 2 + 4
    double s_diff = 0.0;        // s_a - s_b
    double imbalance_sum = 0.0; // summed column imbalance over the ROI;
                                // equals the atom number for an all-up frame
};

/// Convert the PCA residual back to column imbalance through the inverse
/// intensity law and sum the diagonal quadrant pairs.
QuadrantSignal quadrant_signal(const ImageFrame& residual, const ImageFrame& background,
                               const CloudModel& cloud, const RoiSpec& roi);

/// Column imbalance and column density maps from a lattice spin snapshot,
/// projecting along z onto pixels (scale_px pixels per site, cloud-centered).
struct LatticeProjection {
    ImageFrame imbalance;
    ImageFrame density;
};
LatticeProjection project_lattice(const LatticeGeometry& g,
                                  const std::vector<double>& sz,
                                  const std::vector<uint8_t>& hole, int h, int w,
                                  double cx, double cy, double scale_px = 1.0);

} // namespace xxzsim::imaging
