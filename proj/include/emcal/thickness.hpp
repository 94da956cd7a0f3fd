#pragma once

#include "emcal/calibration.hpp"
#include "emcal/config.hpp"
#include "emcal/core.hpp"
#include "emcal/gp.hpp"

#include <vector>

namespace emcal {

/// Predicted distance between sections k and k+1, attributed to section k.
struct ThicknessEstimate {
    std::size_t pair_index = 0;
    double dissimilarity = 0.0;
    double thickness_nm = 0.0;
    double std_nm = 0.0;
    bool negative = false;
};

struct ThicknessReport {
    std::vector<ThicknessEstimate> estimates;
    double mean_nm = 0.0;
    /// Sample standard deviation of the per-pair means.
    double std_nm = 0.0;
    Axis axis_used = Axis::X;
    double gamma_yx = 1.0;

    std::size_t negative_count() const;
};

ThicknessReport estimate_stack_thickness(const ImageStack& stack, const GpModel<double>& model,
                                         const CalibrationConfig& cfg);

/// Uses the calibration's chosen regressor and records its axis and gamma.
ThicknessReport estimate_stack_thickness(const ImageStack& stack, const CalibrationResult& calibration,
                                         const CalibrationConfig& cfg);

struct SweepPoint {
    int size_px;
    double mean_nm;
    double std_nm;
};

/// Square patch sizes; recalibrates on the stack for each size.
std::vector<SweepPoint> size_sweep(const ImageStack& stack, const CalibrationConfig& cfg,
                                   const std::vector<int>& sizes_px);

/// Square patch sizes with a fixed regressor.
std::vector<SweepPoint> size_sweep(const ImageStack& stack, const GpModel<double>& model,
                                   const CalibrationConfig& cfg, const std::vector<int>& sizes_px);

}  // namespace emcal
