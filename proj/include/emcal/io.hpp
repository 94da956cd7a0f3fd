#pragma once

#include "emcal/anisotropy.hpp"
#include "emcal/calibration.hpp"
#include "emcal/config.hpp"
#include "emcal/core.hpp"
#include "emcal/thickness.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace emcal::io {

/// Errors reading or writing files; the message carries the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Orders names so embedded digit runs compare numerically: sec2 < sec10.
bool natural_less(const std::string& a, const std::string& b);

/// Expands shell-style globs; literal paths pass through. Result is naturally sorted.
std::vector<std::string> expand_inputs(const std::vector<std::string>& patterns);

/// Grayscale PNG, TIFF (8/16-bit, one channel) or PGM, normalized to [0,1].
ImagePlane read_image(const std::filesystem::path& path, const Resolution& res);

/// Reads the files in natural filename order.
ImageStack load_stack(std::vector<std::string> paths, double dx_nm, double dy_nm);

void write_png16(const std::filesystem::path& path, const ImagePlane& plane);
void write_pgm16(const std::filesystem::path& path, const ImagePlane& plane);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Renders with 17 significant digits (lossless for doubles).
std::string format_double(double v);

// ---- model files ---------------------------------------------------------------------------

inline constexpr int kFormatVersion = 1;

struct Provenance {
    std::uint64_t seed = 0;
    std::string config_hash;
};

std::string config_hash(const CalibrationConfig& cfg);

/// A regressor as stored on disk; the GP is re-trained from the stored arrays on load.
struct ModelFile {
    Axis axis = Axis::X;
    Resolution resolution{1.0, 1.0};
    PowerLawFit<double> hyperprior;
    GpModel<double> model;
    Provenance provenance;
};

nlohmann::json to_json(const ModelFile& m);
ModelFile model_from_json(const nlohmann::json& j);

struct CalibrationFile {
    ModelFile fx;
    ModelFile fy;
    GammaEstimate gamma;
    Axis chosen_axis = Axis::X;

    const ModelFile& model(Axis axis) const { return axis == Axis::X ? fx : fy; }
};

CalibrationFile make_calibration_file(const CalibrationResult& result, const Resolution& res,
                                      const CalibrationConfig& cfg);
nlohmann::json to_json(const CalibrationFile& c);
CalibrationFile calibration_from_json(const nlohmann::json& j);
CalibrationFile load_calibration(const std::filesystem::path& path);

// ---- tabular reports -----------------------------------------------------------------------

std::string dataset_csv(const DissimilarityDataset& ds);
std::string thickness_csv(const ThicknessReport& report);
nlohmann::json thickness_summary(const ThicknessReport& report);
std::string anisotropy_csv(const GammaEstimate& gamma);
std::string rotation_scan_csv(const RotationScan& scan);
std::string size_sweep_csv(const std::vector<SweepPoint>& sweep);

struct ReportSet {
    std::optional<CalibrationFile> calibration;
    std::optional<ThicknessReport> thickness;
    std::optional<GammaEstimate> anisotropy;
    std::optional<RotationScan> rotation;
};

/// Writes whichever reports are present; an empty rotation scan produces no file and a note in
/// `log`. Returns the written paths.
std::vector<std::filesystem::path> write_reports(const ReportSet& reports, const std::filesystem::path& out_dir,
                                                 std::ostream& log);

// ---- plots ---------------------------------------------------------------------------------

/// SVG of the training points, predictive mean (>= 200 samples) and 2/3/5-sigma bands.
std::string distance_dissimilarity_svg(const GpModel<double>& model, const DissimilarityDataset& dataset);
void emit_distance_dissimilarity_plot(const GpModel<double>& model, const DissimilarityDataset& dataset,
                                      const std::filesystem::path& out_path);

}  // namespace emcal::io
