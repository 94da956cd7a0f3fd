#pragma once

#include "emcal/core.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace emcal {

/// Field of bright disks whose intensity falls linearly from 1 at the center to 0 at the rim.
struct PatternConfig {
    int width_px = 1000;
    int height_px = 1000;
    int disk_count = 300;
    double radius_min_px = 8.0;
    double radius_max_px = 25.0;
    std::uint64_t seed = 0;
    Resolution resolution{5.0, 5.0};

    void validate() const;
};

ImagePlane gen_radial_pattern(const PatternConfig& cfg);

/// Resamples along Y only to round(height * factor) rows (bilinear, pixel-center aligned).
/// Resolution metadata is left untouched: the compression is latent.
ImagePlane compress_y(const ImagePlane& img, double factor);

/// Dense scalar volume, x fastest.
class Volume {
public:
    Volume(int nx, int ny, int nz, Eigen::ArrayXd values, double voxel_nm);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }
    double voxel_nm() const { return voxel_nm_; }
    const Eigen::ArrayXd& values() const { return values_; }

    double at(int x, int y, int z) const { return values_[index(x, y, z)]; }
    Eigen::Index index(int x, int y, int z) const {
        return (static_cast<Eigen::Index>(z) * ny_ + y) * nx_ + x;
    }

    /// Plane z as an image with isotropic in-plane resolution.
    ImagePlane slice_z(int z) const;

private:
    int nx_, ny_, nz_;
    Eigen::ArrayXd values_;
    double voxel_nm_;
};

struct VolumeConfig {
    int nx = 128;
    int ny = 128;
    int nz = 128;
    double smoothing_voxels = 4.0;
    double voxel_nm = 5.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Seeded white noise convolved periodically with an isotropic Gaussian, rescaled to [0,1].
Volume gen_isotropic_volume(const VolumeConfig& cfg);

/// Planes z = 0, s, 2s, ... with nominal spacing s * voxel size.
ImageStack slice_volume(const Volume& vol, int spacing_voxels);

}  // namespace emcal
