#include "emcal/config.hpp"

#include "emcal/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace emcal {

void CalibrationConfig::validate() const {
    if (max_shift_px < 1) throw ConfigError("max shift must be at least 1 pixel");
    if (positions_per_shift < 1) throw ConfigError("positions per shift must be at least 1");
    if (patch_w_px && *patch_w_px < 1) throw ConfigError("patch width must be positive");
    if (patch_h_px && *patch_h_px < 1) throw ConfigError("patch height must be positive");
    if (!(patch_um > 0.0)) throw ConfigError("patch size in micrometers must be positive");
    if (sigma && !(*sigma > 0.0)) throw ConfigError("sigma must be positive");
    if (ell && !(*ell > 0.0)) throw ConfigError("length scale must be positive");
    if (noise_var && !(*noise_var >= 0.0)) throw ConfigError("noise variance must be non-negative");
}

namespace {

int default_side(double patch_um, double step_nm, int dim, int max_shift, const char* axis_name) {
    const int wanted = static_cast<int>(std::ceil(patch_um * 1000.0 / step_nm - 1e-9));
    const int limit = std::max(1, (dim - max_shift) / 2);
    if (wanted > limit) {
        warn("default " + std::to_string(patch_um) + " um patch (" + std::to_string(wanted) + " px along " +
             axis_name + ") does not fit; using " + std::to_string(limit) + " px");
        return limit;
    }
    return wanted;
}

}  // namespace

PatchSize resolve_patch(const CalibrationConfig& cfg, int width, int height, const Resolution& res) {
    const int w = cfg.patch_w_px ? *cfg.patch_w_px : default_side(cfg.patch_um, res.dx(), width, cfg.max_shift_px, "x");
    const int h = cfg.patch_h_px ? *cfg.patch_h_px : default_side(cfg.patch_um, res.dy(), height, cfg.max_shift_px, "y");
    return {w, h};
}

std::vector<ImagePlane> select_calibration_planes(const ImageStack& stack, const CalibrationConfig& cfg) {
    if (cfg.calibration_planes.empty()) return stack.planes();
    std::vector<ImagePlane> planes;
    planes.reserve(cfg.calibration_planes.size());
    for (auto idx : cfg.calibration_planes) {
        if (idx >= stack.size()) {
            throw ConfigError("calibration plane " + std::to_string(idx) + " does not exist (stack has " +
                              std::to_string(stack.size()) + " planes)");
        }
        planes.push_back(stack[idx]);
    }
    return planes;
}

}  // namespace emcal
