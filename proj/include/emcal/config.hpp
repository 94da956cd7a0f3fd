#pragma once

#include "emcal/core.hpp"
#include "emcal/gp.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace emcal {

/// Sampling and regression settings shared by calibration, anisotropy and thickness estimation.
struct CalibrationConfig {
    int max_shift_px = 20;
    std::optional<int> patch_w_px;
    std::optional<int> patch_h_px;
    /// Physical patch edge used when no pixel size is given.
    double patch_um = 7.0;
    int positions_per_shift = 20;
    std::uint64_t seed = 0;
    /// Planes used for calibration; empty means every plane of the stack.
    std::vector<std::size_t> calibration_planes;

    std::optional<double> sigma;
    std::optional<double> ell;
    std::optional<double> noise_var;
    /// Dissimilarities are measured on intensities in [0,1]; selects the default length scale.
    bool normalized_intensities = true;

    void validate() const;
};

struct PatchSize {
    int width_px;
    int height_px;
};

/// Patch size for images of the given dimensions. Unset sides default to patch_um converted with
/// the axis resolution, clamped to half of the span left after the maximum shift.
PatchSize resolve_patch(const CalibrationConfig& cfg, int width, int height, const Resolution& res);

/// Planes selected by cfg.calibration_planes (all when empty).
std::vector<ImagePlane> select_calibration_planes(const ImageStack& stack, const CalibrationConfig& cfg);

}  // namespace emcal
