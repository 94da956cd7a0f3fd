#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace emcal {

/// Row-major intensity raster: rows index Y (top to bottom), columns index X.
using Raster = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raised for malformed input data (bad shapes, infeasible parameters, degenerate datasets).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for invalid caller-supplied configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Axis { X, Y };

std::string_view to_string(Axis axis);
Axis axis_from_string(std::string_view name);

/// Physical pixel size in nanometers per pixel.
class Resolution {
public:
    Resolution(double dx_nm, double dy_nm);

    double dx() const { return dx_; }
    double dy() const { return dy_; }

    /// Length of one pixel step along the given axis.
    double step(Axis axis) const { return axis == Axis::X ? dx_ : dy_; }

    Resolution transposed() const { return {dy_, dx_}; }

    friend bool operator==(const Resolution&, const Resolution&) = default;

private:
    double dx_;
    double dy_;
};

/// Pixel aspect ratio dy / dx.
inline double aspect_ratio(const Resolution& res) { return res.dy() / res.dx(); }

/// Source encoding of raw intensities.
enum class BitDepth { Unit, U8, U16 };

/// Maps raw values onto [0,1]: Unit is identity, U8 divides by 255, U16 by 65535.
Raster normalize_intensities(const Raster& raw, BitDepth depth);

/// Affine min-max rescale onto [0,1]. A constant raster maps to all zeros.
Raster normalize_min_max(const Raster& raw);

/// One grayscale section. Immutable after construction.
class ImagePlane {
public:
    /// `pixels` must already be normalized to [0,1].
    ImagePlane(Raster pixels, Resolution res);

    int width() const { return static_cast<int>(pixels_.cols()); }
    int height() const { return static_cast<int>(pixels_.rows()); }
    const Raster& pixels() const { return pixels_; }
    const Resolution& resolution() const { return res_; }

    double at(int x, int y) const { return pixels_(y, x); }

    /// Rectangular view of the plane: top-left corner (x0, y0), size w x h.
    auto region(int x0, int y0, int w, int h) const { return pixels_.block(y0, x0, h, w); }

    /// Swaps the roles of X and Y, including dx and dy.
    ImagePlane transposed() const;

private:
    Raster pixels_;
    Resolution res_;
};

/// Ordered sections sharing dimensions and resolution.
class ImageStack {
public:
    explicit ImageStack(std::vector<ImagePlane> planes, std::optional<double> nominal_spacing_nm = std::nullopt);

    std::size_t size() const { return planes_.size(); }
    const ImagePlane& operator[](std::size_t i) const { return planes_[i]; }
    const std::vector<ImagePlane>& planes() const { return planes_; }

    int width() const { return planes_.front().width(); }
    int height() const { return planes_.front().height(); }
    const Resolution& resolution() const { return planes_.front().resolution(); }
    std::optional<double> nominal_spacing_nm() const { return nominal_spacing_; }

private:
    std::vector<ImagePlane> planes_;
    std::optional<double> nominal_spacing_;
};

}  // namespace emcal
