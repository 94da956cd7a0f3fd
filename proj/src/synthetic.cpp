#include "emcal/synthetic.hpp"

#include "emcal/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace emcal {

void PatternConfig::validate() const {
    if (width_px < 2 || height_px < 2) throw ConfigError("pattern must be at least 2x2 pixels");
    if (disk_count < 0) throw ConfigError("disk count must be non-negative");
    if (!(radius_min_px >= 2.0) || !(radius_max_px >= radius_min_px)) {
        throw ConfigError("disk radii must satisfy 2 <= radius_min <= radius_max");
    }
}

ImagePlane gen_radial_pattern(const PatternConfig& cfg) {
    cfg.validate();
    constexpr int kRetries = 100;
    Rng rng(derive_seed(cfg.seed, {0x6469736b}));
    std::uniform_real_distribution<double> pick_radius(cfg.radius_min_px, cfg.radius_max_px);
    Raster img = Raster::Zero(cfg.height_px, cfg.width_px);

    for (int disk = 0; disk < cfg.disk_count; ++disk) {
        double r = 0.0;
        int reach = 0;
        bool placed = false;
        for (int attempt = 0; attempt < kRetries && !placed; ++attempt) {
            r = pick_radius(rng);
            reach = static_cast<int>(std::ceil(r));
            placed = 2 * reach < cfg.width_px && 2 * reach < cfg.height_px;
        }
        if (!placed) {
            throw DataError("cannot place disk " + std::to_string(disk) + " inside a " + std::to_string(cfg.width_px) +
                            "x" + std::to_string(cfg.height_px) + " pattern");
        }
        std::uniform_int_distribution<int> pick_x(reach, cfg.width_px - 1 - reach);
        std::uniform_int_distribution<int> pick_y(reach, cfg.height_px - 1 - reach);
        const int cx = pick_x(rng);
        const int cy = pick_y(rng);
        for (int y = cy - reach; y <= cy + reach; ++y) {
            for (int x = cx - reach; x <= cx + reach; ++x) {
                const double dist = std::hypot(double(x - cx), double(y - cy));
                const double v = 1.0 - dist / r;
                if (v > img(y, x)) img(y, x) = v;
            }
        }
    }
    return ImagePlane(std::move(img), cfg.resolution);
}

ImagePlane compress_y(const ImagePlane& img, double factor) {
    if (!(factor > 0.0 && factor <= 1.0)) throw ConfigError("compression factor must lie in (0, 1]");
    const int h = img.height();
    const int out_h = static_cast<int>(std::lround(h * factor));
    if (out_h < 2) throw DataError("compressed image height " + std::to_string(out_h) + " is below 2 rows");
    if (out_h == h) return img;

    const double scale = static_cast<double>(h) / out_h;
    const Raster& src = img.pixels();
    Raster out(out_h, img.width());
    for (int y = 0; y < out_h; ++y) {
        const double sy = std::clamp((y + 0.5) * scale - 0.5, 0.0, double(h - 1));
        const int y0 = static_cast<int>(std::floor(sy));
        const int y1 = std::min(y0 + 1, h - 1);
        const double t = sy - y0;
        out.row(y) = (1.0 - t) * src.row(y0) + t * src.row(y1);
    }
    return ImagePlane(std::move(out), img.resolution());
}

Volume::Volume(int nx, int ny, int nz, Eigen::ArrayXd values, double voxel_nm)
    : nx_(nx), ny_(ny), nz_(nz), values_(std::move(values)), voxel_nm_(voxel_nm) {
    if (nx < 1 || ny < 1 || nz < 1) throw ConfigError("volume dimensions must be positive");
    if (values_.size() != static_cast<Eigen::Index>(nx) * ny * nz) throw DataError("volume value count mismatch");
    if (!(voxel_nm > 0.0)) throw ConfigError("voxel size must be positive");
}

ImagePlane Volume::slice_z(int z) const {
    if (z < 0 || z >= nz_) throw DataError("slice index " + std::to_string(z) + " outside volume depth");
    Raster plane(ny_, nx_);
    for (int y = 0; y < ny_; ++y)
        for (int x = 0; x < nx_; ++x) plane(y, x) = at(x, y, z);
    return ImagePlane(std::move(plane), Resolution(voxel_nm_, voxel_nm_));
}

void VolumeConfig::validate() const {
    if (nx < 16 || ny < 16 || nz < 16) throw ConfigError("volume dimensions must be at least 16 voxels per axis");
    if (!(smoothing_voxels >= 1.0)) throw ConfigError("smoothing scale must be at least 1 voxel");
    if (!(voxel_nm > 0.0)) throw ConfigError("voxel size must be positive");
}

namespace {

std::vector<double> gaussian_taps(double sigma) {
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> taps(2 * radius + 1);
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        taps[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        total += taps[i + radius];
    }
    for (auto& t : taps) t /= total;
    return taps;
}

// Periodic 1D convolution of every line along one axis. `stride` is the element step along the
// axis, `len` its length; `line_starts` enumerates the first element of each line.
void convolve_lines(Eigen::ArrayXd& data, const std::vector<double>& taps, Eigen::Index stride, int len,
                    const std::vector<Eigen::Index>& line_starts) {
    const int radius = static_cast<int>(taps.size() / 2);
    std::vector<double> line(len), out(len);
    for (Eigen::Index start : line_starts) {
        for (int i = 0; i < len; ++i) line[i] = data[start + i * stride];
        for (int i = 0; i < len; ++i) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                int j = (i + k) % len;
                if (j < 0) j += len;
                acc += taps[k + radius] * line[j];
            }
            out[i] = acc;
        }
        for (int i = 0; i < len; ++i) data[start + i * stride] = out[i];
    }
}

}  // namespace

Volume gen_isotropic_volume(const VolumeConfig& cfg) {
    cfg.validate();
    const Eigen::Index total = static_cast<Eigen::Index>(cfg.nx) * cfg.ny * cfg.nz;
    Eigen::ArrayXd data(total);
    Rng rng(derive_seed(cfg.seed, {0x766f6c}));
    std::normal_distribution<double> noise(0.0, 1.0);
    for (Eigen::Index i = 0; i < total; ++i) data[i] = noise(rng);

    const auto taps = gaussian_taps(cfg.smoothing_voxels);
    const Eigen::Index sx = 1, sy = cfg.nx, sz = static_cast<Eigen::Index>(cfg.nx) * cfg.ny;
    std::vector<Eigen::Index> starts;

    starts.clear();
    for (int z = 0; z < cfg.nz; ++z)
        for (int y = 0; y < cfg.ny; ++y) starts.push_back(z * sz + y * sy);
    convolve_lines(data, taps, sx, cfg.nx, starts);

    starts.clear();
    for (int z = 0; z < cfg.nz; ++z)
        for (int x = 0; x < cfg.nx; ++x) starts.push_back(z * sz + x);
    convolve_lines(data, taps, sy, cfg.ny, starts);

    starts.clear();
    for (int y = 0; y < cfg.ny; ++y)
        for (int x = 0; x < cfg.nx; ++x) starts.push_back(y * sy + x);
    convolve_lines(data, taps, sz, cfg.nz, starts);

    const double lo = data.minCoeff();
    const double hi = data.maxCoeff();
    data = (data - lo) / (hi - lo);
    return Volume(cfg.nx, cfg.ny, cfg.nz, std::move(data), cfg.voxel_nm);
}

ImageStack slice_volume(const Volume& vol, int spacing_voxels) {
    if (spacing_voxels < 1) throw ConfigError("slice spacing must be at least 1 voxel");
    const int count = (vol.nz() - 1) / spacing_voxels + 1;
    if (count < 2) {
        throw DataError("spacing " + std::to_string(spacing_voxels) + " leaves fewer than 2 planes in a depth of " +
                        std::to_string(vol.nz()));
    }
    std::vector<ImagePlane> planes;
    planes.reserve(count);
    for (int i = 0; i < count; ++i) planes.push_back(vol.slice_z(i * spacing_voxels));
    return ImageStack(std::move(planes), spacing_voxels * vol.voxel_nm());
}

}  // namespace emcal
