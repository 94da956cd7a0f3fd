#include "emcal/thickness.hpp"

#include "emcal/diagnostics.hpp"
#include "emcal/dissimilarity.hpp"

#include <algorithm>
#include <cmath>

namespace emcal {

std::size_t ThicknessReport::negative_count() const {
    return static_cast<std::size_t>(
        std::count_if(estimates.begin(), estimates.end(), [](const auto& e) { return e.negative; }));
}

ThicknessReport estimate_stack_thickness(const ImageStack& stack, const GpModel<double>& model,
                                         const CalibrationConfig& cfg) {
    cfg.validate();
    if (stack.size() < 2) throw DataError("thickness estimation needs at least 2 planes");
    const auto patch = resolve_patch(cfg, stack.width(), stack.height(), stack.resolution());

    ThicknessReport report;
    report.estimates.resize(stack.size() - 1);
    parallel_for(report.estimates.size(), [&](std::size_t k) {
        const double s =
            pair_dissimilarity(stack, k, patch.width_px, patch.height_px, cfg.positions_per_shift, cfg.seed);
        const auto p = predict(model, s);
        report.estimates[k] = ThicknessEstimate{k, s, p.mean, p.std, p.mean < 0.0};
    });

    const auto n = static_cast<double>(report.estimates.size());
    double sum = 0.0;
    for (const auto& e : report.estimates) sum += e.thickness_nm;
    report.mean_nm = sum / n;
    double ss = 0.0;
    for (const auto& e : report.estimates) ss += (e.thickness_nm - report.mean_nm) * (e.thickness_nm - report.mean_nm);
    report.std_nm = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;

    if (const auto neg = report.negative_count(); neg > 0) {
        warn(std::to_string(neg) + " section pair(s) have a negative predicted thickness");
    }
    return report;
}

ThicknessReport estimate_stack_thickness(const ImageStack& stack, const CalibrationResult& calibration,
                                         const CalibrationConfig& cfg) {
    auto report = estimate_stack_thickness(stack, calibration.chosen().model, cfg);
    report.axis_used = calibration.chosen_axis;
    report.gamma_yx = calibration.gamma_yx();
    return report;
}

std::vector<SweepPoint> size_sweep(const ImageStack& stack, const CalibrationConfig& cfg,
                                   const std::vector<int>& sizes_px) {
    std::vector<SweepPoint> out;
    out.reserve(sizes_px.size());
    for (int size : sizes_px) {
        CalibrationConfig sized = cfg;
        sized.patch_w_px = size;
        sized.patch_h_px = size;
        const auto calibration = calibrate(stack, sized);
        const auto report = estimate_stack_thickness(stack, calibration, sized);
        out.push_back({size, report.mean_nm, report.std_nm});
    }
    return out;
}

std::vector<SweepPoint> size_sweep(const ImageStack& stack, const GpModel<double>& model,
                                   const CalibrationConfig& cfg, const std::vector<int>& sizes_px) {
    std::vector<SweepPoint> out;
    out.reserve(sizes_px.size());
    for (int size : sizes_px) {
        CalibrationConfig sized = cfg;
        sized.patch_w_px = size;
        sized.patch_h_px = size;
        const auto report = estimate_stack_thickness(stack, model, sized);
        out.push_back({size, report.mean_nm, report.std_nm});
    }
    return out;
}

}  // namespace emcal
