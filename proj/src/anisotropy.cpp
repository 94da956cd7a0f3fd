#include "emcal/anisotropy.hpp"

#include "emcal/calibration.hpp"
#include "emcal/diagnostics.hpp"
#include "emcal/dissimilarity.hpp"
#include "emcal/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace emcal {

GammaEstimate estimate_gamma(const GpModel<double>& fx, const std::vector<ImagePlane>& planes,
                             const CalibrationConfig& cfg) {
    cfg.validate();
    if (planes.empty()) throw DataError("gamma estimation needs at least one plane");
    const auto& res = planes.front().resolution();
    const auto patch = resolve_patch(cfg, planes.front().width(), planes.front().height(), res);

    GammaEstimate est;
    est.aspect_ratio = aspect_ratio(res);
    for (std::size_t i = 0; i < planes.size(); ++i) {
        ShiftSampling sampling{1, patch.width_px, patch.height_px, cfg.positions_per_shift,
                               derive_seed(cfg.seed, {kTagGamma, kTagAxisY, i})};
        const auto samples = sample_shifted_pairs(planes[i], Axis::Y, sampling);
        double s = 0.0;
        for (const auto& smp : samples) s += smp.dissimilarity;
        s /= static_cast<double>(samples.size());

        const double d_hat = predict(fx, s).mean;
        if (!(d_hat > 0.0)) {
            std::ostringstream os;
            os << "X-axis regressor predicts a non-positive distance (" << d_hat << " nm) for plane " << i
               << " at dissimilarity " << s;
            throw DataError(os.str());
        }
        const double n_hat = d_hat / res.dx();
        est.per_plane_dissimilarity.push_back(s);
        est.per_plane_values.push_back(est.aspect_ratio / n_hat);
    }
    const auto n = static_cast<double>(est.per_plane_values.size());
    est.gamma_yx = std::accumulate(est.per_plane_values.begin(), est.per_plane_values.end(), 0.0) / n;
    double ss = 0.0;
    for (double g : est.per_plane_values) ss += (g - est.gamma_yx) * (g - est.gamma_yx);
    est.std = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    est.n_hat_yx = est.aspect_ratio / est.gamma_yx;
    return est;
}

GammaEstimate gamma_for_planes(const std::vector<ImagePlane>& planes, const CalibrationConfig& cfg) {
    const auto fx = fit_axis_regressor(build_axis_dataset(planes, Axis::X, cfg), cfg);
    return estimate_gamma(fx.model, planes, cfg);
}

namespace {

struct CropSize {
    double w, h;
};

// Largest-area axis-aligned rectangle centered inside a w x h rectangle rotated by the angle.
CropSize inscribed_rectangle(double w, double h, double sin_a, double cos_a) {
    if (w <= 0.0 || h <= 0.0) return {0.0, 0.0};
    const bool width_longer = w >= h;
    const double side_long = width_longer ? w : h;
    const double side_short = width_longer ? h : w;
    if (side_short <= 2.0 * sin_a * cos_a * side_long || std::abs(sin_a - cos_a) < 1e-10) {
        const double x = 0.5 * side_short;
        return width_longer ? CropSize{x / sin_a, x / cos_a} : CropSize{x / cos_a, x / sin_a};
    }
    const double cos_2a = cos_a * cos_a - sin_a * sin_a;
    return {(w * cos_a - h * sin_a) / cos_2a, (h * cos_a - w * sin_a) / cos_2a};
}

}  // namespace

ImagePlane rotate_plane(const ImagePlane& img, double angle_deg) {
    double a = std::fmod(angle_deg, 360.0);
    if (a < 0.0) a += 360.0;
    double c, s;
    if (a == 0.0) {
        return img;
    } else if (a == 90.0) {
        c = 0.0, s = 1.0;
    } else if (a == 180.0) {
        c = -1.0, s = 0.0;
    } else if (a == 270.0) {
        c = 0.0, s = -1.0;
    } else {
        const double rad = a * std::numbers::pi / 180.0;
        c = std::cos(rad);
        s = std::sin(rad);
    }

    const int w = img.width();
    const int h = img.height();
    const auto crop = inscribed_rectangle(w - 1.0, h - 1.0, std::abs(s), std::abs(c));
    const int out_w = static_cast<int>(std::floor(crop.w + 1e-9)) + 1;
    const int out_h = static_cast<int>(std::floor(crop.h + 1e-9)) + 1;
    if (out_w < 2 || out_h < 2) {
        throw DataError("rotation by " + std::to_string(angle_deg) + " degrees leaves a crop smaller than 2x2");
    }

    const Raster& src = img.pixels();
    const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
    const double ox = (out_w - 1) / 2.0, oy = (out_h - 1) / 2.0;
    Raster out(out_h, out_w);
    for (int yo = 0; yo < out_h; ++yo) {
        const double v = yo - oy;
        for (int xo = 0; xo < out_w; ++xo) {
            const double u = xo - ox;
            const double sx = std::clamp(cx + u * c - v * s, 0.0, w - 1.0);
            const double sy = std::clamp(cy + u * s + v * c, 0.0, h - 1.0);
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            const int x1 = std::min(x0 + 1, w - 1);
            const int y1 = std::min(y0 + 1, h - 1);
            const double tx = sx - x0, ty = sy - y0;
            const double top = (1.0 - tx) * src(y0, x0) + tx * src(y0, x1);
            const double bottom = (1.0 - tx) * src(y1, x0) + tx * src(y1, x1);
            out(yo, xo) = std::clamp((1.0 - ty) * top + ty * bottom, 0.0, 1.0);
        }
    }
    return ImagePlane(std::move(out), img.resolution());
}

RotationScan rotation_scan(const ImageStack& stack, const std::vector<double>& angles_deg,
                           const CalibrationConfig& cfg) {
    if (angles_deg.empty()) throw ConfigError("rotation scan needs at least one angle");
    for (double a : angles_deg) {
        if (!(a >= 0.0 && a < 180.0)) {
            throw ConfigError("scan angle " + std::to_string(a) + " outside [0, 180) degrees");
        }
    }
    const auto planes = select_calibration_planes(stack, cfg);

    RotationScan scan;
    scan.angles_deg = angles_deg;
    scan.estimates.resize(angles_deg.size());
    parallel_for(angles_deg.size(), [&](std::size_t i) {
        std::vector<ImagePlane> rotated;
        rotated.reserve(planes.size());
        for (const auto& p : planes) rotated.push_back(rotate_plane(p, angles_deg[i]));
        scan.estimates[i] = gamma_for_planes(rotated, cfg);
    });
    for (const auto& e : scan.estimates) scan.gammas.push_back(e.gamma_yx);
    const auto best = std::min_element(scan.gammas.begin(), scan.gammas.end());
    scan.gamma_star = *best;
    scan.angle_star = scan.angles_deg[static_cast<std::size_t>(best - scan.gammas.begin())];
    return scan;
}

std::vector<double> default_scan_angles() {
    std::vector<double> angles;
    for (int a = 0; a < 180; a += 10) angles.push_back(a);
    return angles;
}

}  // namespace emcal
