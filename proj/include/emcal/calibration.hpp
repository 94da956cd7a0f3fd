#pragma once

#include "emcal/anisotropy.hpp"
#include "emcal/config.hpp"
#include "emcal/dissimilarity.hpp"
#include "emcal/gp.hpp"
#include "emcal/power_law.hpp"

#include <vector>

namespace emcal {

/// One trained distance-dissimilarity function together with the data it was learned from.
struct AxisRegressor {
    Axis axis = Axis::X;
    DissimilarityDataset dataset;
    PowerLawFit<double> power_law;
    GpModel<double> model;
};

struct CalibrationResult {
    AxisRegressor fx;
    AxisRegressor fy;
    GammaEstimate gamma;
    Axis chosen_axis = Axis::X;

    double gamma_yx() const { return gamma.gamma_yx; }
    const AxisRegressor& regressor(Axis axis) const { return axis == Axis::X ? fx : fy; }
    const AxisRegressor& chosen() const { return regressor(chosen_axis); }
};

/// Regressor of the less compressed axis: X when gamma_yx < 1, else Y.
Axis select_axis(double gamma_yx);

DissimilarityDataset build_axis_dataset(const std::vector<ImagePlane>& planes, Axis axis,
                                        const CalibrationConfig& cfg);

/// Observation noise used when the config leaves it unset: sigma^2. Repeated shifts scatter in
/// dissimilarity, so a noise-free posterior would bend between the clusters of each shift.
double default_noise_var(double sigma);

Hyperparameters<double> make_hyperparameters(const CalibrationConfig& cfg, const PowerLawFit<double>& fit);

/// Power-law fit followed by GP training on one axis dataset.
AxisRegressor fit_axis_regressor(DissimilarityDataset dataset, const CalibrationConfig& cfg);

CalibrationResult calibrate(const ImageStack& stack, const CalibrationConfig& cfg);

}  // namespace emcal
