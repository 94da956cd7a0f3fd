#pragma once

#include "emcal/config.hpp"
#include "emcal/core.hpp"
#include "emcal/gp.hpp"

#include <vector>

namespace emcal {

/// Stretching of Y relative to X: gamma_yx = aspect_ratio / n_hat_yx, where n_hat_yx is the
/// one-pixel Y displacement expressed in X pixels through the X-axis regressor.
struct GammaEstimate {
    double gamma_yx = 1.0;
    double n_hat_yx = 1.0;
    double aspect_ratio = 1.0;
    /// Per-plane gamma values; gamma_yx is their mean.
    std::vector<double> per_plane_values;
    std::vector<double> per_plane_dissimilarity;
    double std = 0.0;
};

/// Maps the mean one-pixel-Y SDI of each plane through fx. Throws DataError when the
/// predicted distance is not positive.
GammaEstimate estimate_gamma(const GpModel<double>& fx, const std::vector<ImagePlane>& planes,
                             const CalibrationConfig& cfg);

/// Learns fx from the planes' own X statistics, then estimates gamma on them.
GammaEstimate gamma_for_planes(const std::vector<ImagePlane>& planes, const CalibrationConfig& cfg);

/// Bilinear rotation about the image center (counter-clockwise in the displayed image for
/// positive angles), cropped to the largest centered axis-aligned rectangle whose pixels all
/// sample inside the source.
ImagePlane rotate_plane(const ImagePlane& img, double angle_deg);

struct RotationScan {
    std::vector<double> angles_deg;
    std::vector<double> gammas;
    std::vector<GammaEstimate> estimates;
    double gamma_star = 0.0;
    double angle_star = 0.0;

    bool empty() const { return angles_deg.empty(); }
};

/// Re-trains fx and re-estimates gamma on the calibration planes rotated by each angle.
RotationScan rotation_scan(const ImageStack& stack, const std::vector<double>& angles_deg,
                           const CalibrationConfig& cfg);

/// 0, 10, ..., 170 degrees.
std::vector<double> default_scan_angles();

}  // namespace emcal
