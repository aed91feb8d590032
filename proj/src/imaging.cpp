#include "xxzsim/imaging.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

#include "xxzsim/errors.hpp"
#include "xxzsim/rng.hpp"

namespace xxzsim::imaging {

double ImageFrame::mean() const {
    if (px.empty()) return 0.0;
    double s = 0.0;
    for (double v : px) s += v;
    return s / double(px.size());
}

void write_frame(const std::string& path, const ImageFrame& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open frame file for writing: " + path);
    const char magic[4] = {'X', 'Z', 'I', 'M'};
    const uint32_t version = 1, h = uint32_t(f.h), w = uint32_t(f.w), dtype = 1;
    out.write(magic, 4);
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&h), 4);
    out.write(reinterpret_cast<const char*>(&w), 4);
    out.write(reinterpret_cast<const char*>(&dtype), 4);
    out.write(reinterpret_cast<const char*>(f.px.data()),
              std::streamsize(f.px.size() * sizeof(double)));
    if (!out) throw NumericError("short write on frame file: " + path);
}

ImageFrame read_frame(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open frame file: " + path);
    char magic[4];
    uint32_t version = 0, h = 0, w = 0, dtype = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&h), 4);
    in.read(reinterpret_cast<char*>(&w), 4);
    in.read(reinterpret_cast<char*>(&dtype), 4);
    if (!in || std::memcmp(magic, "XZIM", 4) != 0)
        throw ConfigError("not an XZIM frame file: " + path);
    if (version != 1 || dtype != 1)
        throw ConfigError("unsupported frame version/dtype in " + path);
    ImageFrame f;
    f.h = int(h);
    f.w = int(w);
    f.px.resize(size_t(h) * w);
    in.read(reinterpret_cast<char*>(f.px.data()),
            std::streamsize(f.px.size() * sizeof(double)));
    if (!in) throw ConfigError("truncated frame file: " + path);
    return f;
}

double CloudModel::density(double x, double y) const {
    const double dx = x - cx, dy = y - cy;
    const double s2 = sigma_px * sigma_px;
    return n_atoms / (2.0 * M_PI * s2) * std::exp(-(dx * dx + dy * dy) / (2.0 * s2));
}

double CloudModel::phase_per_imbalance() const {
    return (sigma0_px / 4.0) * delta / (1.0 + delta * delta);
}

void FringeModel::field(int h, int w, uint32_t shot, ImageFrame& out) const {
    out.h = h;
    out.w = w;
    out.px.assign(size_t(h) * w, 1.0);
    const rng::Stream rs(seed, 0);
    for (int m = 0; m < n_modes; ++m) {
        const auto u = rs.uniform2(0, rng::Draw::imaging, uint32_t(m));
        const auto v = rs.uniform2(1, rng::Draw::imaging, uint32_t(m));
        const double angle = 2.0 * M_PI * u[0];
        const double kmag = max_wavenumber * (0.15 + 0.85 * u[1]);
        const double kx = kmag * std::cos(angle), ky = kmag * std::sin(angle);
        const double amp = min_amplitude + (max_amplitude - min_amplitude) * v[0];
        double phase = 2.0 * M_PI * v[1];
        // Per-shot Gaussian phase drift, addressed by shot index.
        const rng::Stream drift(seed ^ 0x5bf0a8ull, uint32_t(m));
        phase += drift_sigma * drift.normal2(shot, rng::Draw::imaging, 0)[0];
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c)
                out.px[size_t(r) * w + c] += amp * std::sin(kx * c + ky * r + phase);
        }
    }
}

void RoiSpec::validate() const {
    if (!(radius > gap) || gap < 0.0)
        throw DomainError("ROI requires radius > gap >= 0");
}

int RoiSpec::quadrant(int r, int c) const {
    const double dx = c - cx, dy = r - cy;
    if (dx * dx + dy * dy > radius * radius) return 0;
    if (std::abs(dx) < gap / 2.0 || std::abs(dy) < gap / 2.0) return 0;
    if (dx > 0.0) return dy > 0.0 ? 1 : 4;
    return dy > 0.0 ? 2 : 3;
}

ImageFrame phase_map(const ImageFrame& imbalance, const CloudModel& cloud) {
    if (!std::isfinite(cloud.delta)) throw DomainError("detuning must be finite");
    ImageFrame theta = imbalance;
    const double scale = cloud.phase_per_imbalance();
    for (double& v : theta.px) v *= scale;
    return theta;
}

namespace {

void gaussian_blur(ImageFrame& f, double fwhm) {
    if (fwhm <= 0.0) return;
    const double sigma = fwhm / 2.3548200450309493;
    const int rad = std::max(1, int(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(size_t(2 * rad + 1));
    double ksum = 0.0;
    for (int i = -rad; i <= rad; ++i) {
        kernel[size_t(i + rad)] = std::exp(-0.5 * i * i / (sigma * sigma));
        ksum += kernel[size_t(i + rad)];
    }
    for (double& v : kernel) v /= ksum;

    ImageFrame tmp = f;
    // horizontal
    for (int r = 0; r < f.h; ++r) {
        for (int c = 0; c < f.w; ++c) {
            double acc = 0.0;
            for (int i = -rad; i <= rad; ++i) {
                const int cc = std::clamp(c + i, 0, f.w - 1);
                acc += kernel[size_t(i + rad)] * f.at(r, cc);
            }
            tmp.at(r, c) = acc;
        }
    }
    // vertical
    for (int r = 0; r < f.h; ++r) {
        for (int c = 0; c < f.w; ++c) {
            double acc = 0.0;
            for (int i = -rad; i <= rad; ++i) {
                const int rr = std::clamp(r + i, 0, f.h - 1);
                acc += kernel[size_t(i + rad)] * tmp.at(rr, c);
            }
            f.at(r, c) = acc;
        }
    }
}

} // namespace

ImageFrame render_frame(const ImageFrame& theta, const FringeModel& fringes,
                        const RenderOptions& opt, uint32_t shot) {
    if (!(opt.photons > 0.0)) throw DomainError("photons per pixel must be > 0");

    ImageFrame sine = theta;
    for (double& v : sine.px) v = std::sin(v);
    gaussian_blur(sine, opt.blur_fwhm_px);

    ImageFrame fringe;
    fringes.field(theta.h, theta.w, shot, fringe);

    ImageFrame out;
    out.h = theta.h;
    out.w = theta.w;
    out.px.resize(sine.px.size());
    for (size_t i = 0; i < out.px.size(); ++i) {
        out.px[i] = std::max(0.0, opt.photons * fringe.px[i] * (1.0 - sine.px[i]) / 2.0);
    }
    if (opt.poisson_noise) {
        const auto key = rng::Philox4x32::block(
            {shot, 0x706f6973u, uint32_t(opt.seed), uint32_t(opt.seed >> 32)},
            {0x1b87du, 0x9ce3fu});
        std::mt19937_64 gen((uint64_t(key[0]) << 32) | key[1]);
        for (double& v : out.px) {
            if (v <= 0.0) {
                v = 0.0;
                continue;
            }
            std::poisson_distribution<long> pd(v);
            v = double(pd(gen));
        }
    }
    return out;
}

std::vector<uint8_t> circular_mask(int h, int w, double cx, double cy, double radius) {
    std::vector<uint8_t> mask(size_t(h) * w, 0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double dx = c - cx, dy = r - cy;
            if (dx * dx + dy * dy <= radius * radius) mask[size_t(r) * w + c] = 1;
        }
    }
    return mask;
}

PcaBasis pca_fit(const std::vector<ImageFrame>& pool, int k,
                 const std::vector<uint8_t>& atom_mask) {
    if (pool.empty()) throw DomainError("PCA pool is empty");
    const int h = pool.front().h, w = pool.front().w;
    const size_t n_px = size_t(h) * w;
    if (int(pool.size()) < k)
        throw DomainError("PCA pool smaller than requested component count");
    if (atom_mask.size() != n_px) throw DomainError("atom mask size mismatch");
    for (const auto& f : pool) {
        if (f.h != h || f.w != w) throw DomainError("PCA pool frames differ in shape");
    }

    const size_t b = pool.size();
    PcaBasis basis;
    basis.h = h;
    basis.w = w;
    basis.mean.assign(n_px, 0.0);
    basis.fit_mask.resize(n_px);
    for (size_t i = 0; i < n_px; ++i) basis.fit_mask[i] = atom_mask[i] ? 0 : 1;

    for (const auto& f : pool)
        for (size_t i = 0; i < n_px; ++i) basis.mean[i] += f.px[i];
    for (double& v : basis.mean) v /= double(b);

    // Principal components through the (pool x pool) Gram matrix.
    Eigen::MatrixXd x(static_cast<long>(b), static_cast<long>(n_px));
    for (size_t r = 0; r < b; ++r)
        for (size_t i = 0; i < n_px; ++i)
            x(long(r), long(i)) = pool[r].px[i] - basis.mean[i];
    const Eigen::MatrixXd gram = x * x.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const auto& evals = es.eigenvalues(); // ascending

    const double tol = std::max(evals(long(b) - 1), 0.0) * 1e-10 + 1e-12;
    std::vector<long> keep;
    for (long i = long(b) - 1; i >= 0 && long(keep.size()) < k; --i) {
        if (evals(i) > tol) keep.push_back(i);
    }
    if (keep.empty()) {
        // Identical pool frames: the mean is the whole basis.
        basis.k = 0;
        return basis;
    }

    Eigen::MatrixXd comps(static_cast<long>(keep.size()), static_cast<long>(n_px));
    for (size_t j = 0; j < keep.size(); ++j) {
        const Eigen::VectorXd u = es.eigenvectors().col(keep[j]);
        Eigen::RowVectorXd comp = u.transpose() * x;
        comp /= comp.norm();
        comps.row(long(j)) = comp;
    }

    // Re-orthonormalize under the masked inner product so fitting outside the
    // atom region reduces to dot products. Column-pivoted QR drops components
    // that lose rank once masked.
    std::vector<long> masked_idx;
    masked_idx.reserve(n_px);
    for (size_t i = 0; i < n_px; ++i)
        if (basis.fit_mask[i]) masked_idx.push_back(long(i));
    if (masked_idx.size() < keep.size())
        throw DomainError("atom mask leaves too few pixels to fit the basis");

    Eigen::MatrixXd masked(static_cast<long>(masked_idx.size()), static_cast<long>(keep.size()));
    for (size_t r = 0; r < masked_idx.size(); ++r)
        for (size_t j = 0; j < keep.size(); ++j)
            masked(long(r), long(j)) = comps(long(j), masked_idx[r]);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(masked);
    const Eigen::MatrixXd r_mat =
        qr.matrixR().topLeftCorner(long(keep.size()), long(keep.size()))
            .triangularView<Eigen::Upper>();
    const double rtol = std::abs(r_mat(0, 0)) * 1e-10 + 1e-30;
    long rank = 0;
    for (long i = 0; i < r_mat.rows(); ++i)
        if (std::abs(r_mat(i, i)) > rtol) ++rank;

    // comps_ortho = P * R^-1 applied to the permuted full components.
    const Eigen::MatrixXd permuted =
        comps.transpose() * qr.colsPermutation(); // n_px x k
    const Eigen::MatrixXd r_top = r_mat.topLeftCorner(rank, rank);
    const Eigen::MatrixXd ortho =
        r_top.transpose()
            .triangularView<Eigen::Lower>()
            .solve(permuted.leftCols(rank).transpose()); // rank x n_px

    basis.k = int(rank);
    basis.comps.assign(size_t(rank) * n_px, 0.0);
    for (long j = 0; j < rank; ++j)
        for (size_t i = 0; i < n_px; ++i)
            basis.comps[size_t(j) * n_px + i] = ortho(j, long(i));
    return basis;
}

Reconstruction pca_reconstruct(const ImageFrame& frame, const PcaBasis& basis) {
    const size_t n_px = size_t(basis.h) * basis.w;
    if (frame.px.size() != n_px) throw DomainError("frame does not match PCA basis shape");

    std::vector<double> centered(n_px);
    for (size_t i = 0; i < n_px; ++i) centered[i] = frame.px[i] - basis.mean[i];

    Reconstruction rec;
    rec.background.h = rec.residual.h = basis.h;
    rec.background.w = rec.residual.w = basis.w;
    rec.background.px = basis.mean;

    // Coefficients from masked pixels only; applied to the full components.
    for (int j = 0; j < basis.k; ++j) {
        const double* comp = basis.comps.data() + size_t(j) * n_px;
        double coef = 0.0;
        for (size_t i = 0; i < n_px; ++i)
            if (basis.fit_mask[i]) coef += comp[i] * centered[i];
        for (size_t i = 0; i < n_px; ++i) rec.background.px[i] += coef * comp[i];
    }
    rec.residual.px.resize(n_px);
    for (size_t i = 0; i < n_px; ++i)
        rec.residual.px[i] = frame.px[i] - rec.background.px[i];
    return rec;
}

QuadrantSignal quadrant_signal(const ImageFrame& residual, const ImageFrame& background,
                               const CloudModel& cloud, const RoiSpec& roi) {
    roi.validate();
    if (residual.px.size() != background.px.size())
        throw DomainError("residual and background shapes differ");
    if (roi.cx - roi.radius < 0 || roi.cx + roi.radius >= residual.w ||
        roi.cy - roi.radius < 0 || roi.cy + roi.radius >= residual.h)
        throw DomainError("ROI exceeds frame bounds");

    const double inv_scale = 1.0 / cloud.phase_per_imbalance();
    double q[5] = {0, 0, 0, 0, 0};
    double imbalance = 0.0;
    for (int r = 0; r < residual.h; ++r) {
        for (int c = 0; c < residual.w; ++c) {
            const int quad = roi.quadrant(r, c);
            if (quad == 0) continue;
            const double bg = background.at(r, c);
            if (!(bg > 1e-12)) continue;
            const double s = std::clamp(residual.at(r, c) / bg, -1.0, 1.0);
            // intensity law: I = bg * (1 - sin(theta)) => residual/bg = -sin(theta)
            const double theta = -std::asin(s);
            const double m = theta * inv_scale;
            q[quad] += 0.5 * m; // per-pixel spin = imbalance / 2
            imbalance += m;
        }
    }
    QuadrantSignal out;
    out.s_a = q[1] + q[3];
    out.s_b = q[2] + q[4];
    out.s_diff = out.s_a - out.s_b;
    out.imbalance_sum = imbalance;
    return out;
}

LatticeProjection project_lattice(const LatticeGeometry& g,
                                  const std::vector<double>& sz,
                                  const std::vector<uint8_t>& hole, int h, int w,
                                  double cx, double cy, double scale_px) {
    if (int(hole.size()) != g.n_sites())
        throw DomainError("hole mask does not match lattice");
    LatticeProjection out;
    out.imbalance.h = out.density.h = h;
    out.imbalance.w = out.density.w = w;
    out.imbalance.px.assign(size_t(h) * w, 0.0);
    out.density.px.assign(size_t(h) * w, 0.0);

    const auto d = g.dims();
    for (int s = 0; s < g.n_sites(); ++s) {
        const auto c = g.site_coords(s);
        const int px = int(std::lround(cx + scale_px * (c[0] - 0.5 * (d[0] - 1))));
        const int py = int(std::lround(cy + scale_px * (c[1] - 0.5 * (d[1] - 1))));
        if (px < 0 || px >= w || py < 0 || py >= h)
            throw DomainError("lattice projection exceeds frame bounds");
        if (hole[size_t(s)]) continue;
        out.imbalance.px[size_t(py) * w + px] += 2.0 * sz[size_t(s)];
        out.density.px[size_t(py) * w + px] += 1.0;
    }
    return out;
}

} // namespace xxzsim::imaging
