#include "emcal/calibration.hpp"

#include "emcal/diagnostics.hpp"
#include "emcal/seeding.hpp"

#include <string>

namespace emcal {

Axis select_axis(double gamma_yx) { return gamma_yx < 1.0 ? Axis::X : Axis::Y; }

DissimilarityDataset build_axis_dataset(const std::vector<ImagePlane>& planes, Axis axis,
                                        const CalibrationConfig& cfg) {
    cfg.validate();
    if (planes.empty()) throw DataError("no calibration planes");
    const auto patch = resolve_patch(cfg, planes.front().width(), planes.front().height(),
                                     planes.front().resolution());
    DissimilarityDataset ds;
    ds.axis = axis;
    ds.patch_width_px = patch.width_px;
    ds.patch_height_px = patch.height_px;
    ds.source_count = static_cast<int>(planes.size());
    const std::uint64_t axis_tag = axis == Axis::X ? kTagAxisX : kTagAxisY;
    for (std::size_t i = 0; i < planes.size(); ++i) {
        ShiftSampling sampling{cfg.max_shift_px, patch.width_px, patch.height_px, cfg.positions_per_shift,
                               derive_seed(cfg.seed, {axis_tag, i})};
        auto samples = sample_shifted_pairs(planes[i], axis, sampling);
        ds.samples.insert(ds.samples.end(), samples.begin(), samples.end());
    }
    return ds;
}

double default_noise_var(double sigma) { return sigma * sigma; }

Hyperparameters<double> make_hyperparameters(const CalibrationConfig& cfg, const PowerLawFit<double>& fit) {
    Hyperparameters<double> h;
    h.sigma = cfg.sigma.value_or(1.0);
    h.ell = cfg.ell.value_or(default_length_scale(cfg.normalized_intensities));
    h.a = fit.a;
    h.b = fit.b;
    h.noise_var = cfg.noise_var ? *cfg.noise_var : default_noise_var(h.sigma);
    return h;
}

AxisRegressor fit_axis_regressor(DissimilarityDataset dataset, const CalibrationConfig& cfg) {
    if (dataset.samples.empty()) throw DataError("empty calibration dataset");
    const Eigen::VectorXd s = dataset.dissimilarities();
    const Eigen::VectorXd d = dataset.distances_nm();
    if (s.maxCoeff() == s.minCoeff()) {
        throw DataError("degenerate " + std::string(to_string(dataset.axis)) +
                        "-axis dataset: every dissimilarity equals " + std::to_string(s[0]));
    }
    AxisRegressor reg;
    reg.axis = dataset.axis;
    reg.power_law = fit_power_law_lm<double>(s, d);
    if (reg.power_law.nonphysical_exponent) {
        warn("negative power-law exponent b=" + std::to_string(reg.power_law.b) + " on the " +
             std::string(to_string(dataset.axis)) + " axis");
    }
    const auto hyper = make_hyperparameters(cfg, reg.power_law);
    reg.model = train_gp<double>(s, d, hyper);
    reg.dataset = std::move(dataset);
    return reg;
}

CalibrationResult calibrate(const ImageStack& stack, const CalibrationConfig& cfg) {
    cfg.validate();
    const auto planes = select_calibration_planes(stack, cfg);
    CalibrationResult result;
    result.fx = fit_axis_regressor(build_axis_dataset(planes, Axis::X, cfg), cfg);
    result.fy = fit_axis_regressor(build_axis_dataset(planes, Axis::Y, cfg), cfg);
    result.gamma = estimate_gamma(result.fx.model, planes, cfg);
    result.chosen_axis = select_axis(result.gamma.gamma_yx);
    return result;
}

}  // namespace emcal
