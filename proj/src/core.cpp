#include "emcal/core.hpp"

#include <cmath>
#include <sstream>

namespace emcal {

std::string_view to_string(Axis axis) { return axis == Axis::X ? "x" : "y"; }

Axis axis_from_string(std::string_view name) {
    if (name == "x" || name == "X") return Axis::X;
    if (name == "y" || name == "Y") return Axis::Y;
    throw ConfigError("unknown axis '" + std::string(name) + "'");
}

Resolution::Resolution(double dx_nm, double dy_nm) : dx_(dx_nm), dy_(dy_nm) {
    if (!(dx_nm > 0.0) || !(dy_nm > 0.0) || !std::isfinite(dx_nm) || !std::isfinite(dy_nm)) {
        std::ostringstream os;
        os << "resolution must be positive and finite, got dx=" << dx_nm << " dy=" << dy_nm;
        throw ConfigError(os.str());
    }
}

Raster normalize_intensities(const Raster& raw, BitDepth depth) {
    switch (depth) {
        case BitDepth::Unit: return raw;
        case BitDepth::U8: return raw / 255.0;
        case BitDepth::U16: return raw / 65535.0;
    }
    return raw;
}

Raster normalize_min_max(const Raster& raw) {
    if (raw.size() == 0) return raw;
    const double lo = raw.minCoeff();
    const double hi = raw.maxCoeff();
    if (!(hi > lo)) return Raster::Zero(raw.rows(), raw.cols());
    return (raw - lo) / (hi - lo);
}

ImagePlane::ImagePlane(Raster pixels, Resolution res) : pixels_(std::move(pixels)), res_(res) {
    if (pixels_.size() == 0) throw DataError("image plane must contain at least one pixel");
    if (!pixels_.allFinite() || pixels_.minCoeff() < 0.0 || pixels_.maxCoeff() > 1.0) {
        throw DataError("image intensities must lie within [0,1]");
    }
}

ImagePlane ImagePlane::transposed() const {
    Raster t = pixels_.transpose();
    return ImagePlane(std::move(t), res_.transposed());
}

ImageStack::ImageStack(std::vector<ImagePlane> planes, std::optional<double> nominal_spacing_nm)
    : planes_(std::move(planes)), nominal_spacing_(nominal_spacing_nm) {
    if (planes_.empty()) throw DataError("image stack needs at least one plane");
    const auto& first = planes_.front();
    for (std::size_t i = 1; i < planes_.size(); ++i) {
        const auto& p = planes_[i];
        if (p.width() != first.width() || p.height() != first.height()) {
            std::ostringstream os;
            os << "plane " << i << " is " << p.width() << "x" << p.height() << ", expected " << first.width()
               << "x" << first.height();
            throw DataError(os.str());
        }
        if (!(p.resolution() == first.resolution())) {
            throw DataError("plane " + std::to_string(i) + " has a different resolution");
        }
    }
    if (nominal_spacing_ && !(*nominal_spacing_ > 0.0)) throw ConfigError("nominal spacing must be positive");
}

}  // namespace emcal
