#pragma once

#include "emcal/core.hpp"
#include "emcal/diagnostics.hpp"
#include "emcal/seeding.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

namespace testing {

/// Temporary directory removed on scope exit.
class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "emcal-test-XXXXXX").string();
        if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Routes library warnings into a string for the lifetime of the object.
class WarningCapture {
public:
    WarningCapture() : previous_(emcal::set_warning_stream(&buffer_)) {}
    ~WarningCapture() { emcal::set_warning_stream(previous_); }
    std::string text() const { return buffer_.str(); }

private:
    std::ostringstream buffer_;
    std::ostream* previous_;
};

inline emcal::Raster uniform_raster(int w, int h, std::uint64_t seed) {
    emcal::Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    emcal::Raster r(h, w);
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = u(rng);
    return r;
}

inline emcal::ImagePlane uniform_plane(int w, int h, std::uint64_t seed, emcal::Resolution res = {5.0, 5.0}) {
    return emcal::ImagePlane(uniform_raster(w, h, seed), res);
}

inline emcal::ImagePlane constant_plane(int w, int h, double v, emcal::Resolution res = {5.0, 5.0}) {
    return emcal::ImagePlane(emcal::Raster::Constant(h, w, v), res);
}

}  // namespace testing
