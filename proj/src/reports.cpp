#include "emcal/io.hpp"

#include <ostream>
#include <sstream>

namespace emcal::io {

std::string dataset_csv(const DissimilarityDataset& ds) {
    std::ostringstream os;
    os << "axis,distance_px,distance_nm,dissimilarity\n";
    for (const auto& s : ds.samples) {
        os << to_string(s.axis) << ',' << s.distance_px << ',' << format_double(s.distance_nm) << ','
           << format_double(s.dissimilarity) << '\n';
    }
    return os.str();
}

std::string thickness_csv(const ThicknessReport& report) {
    std::ostringstream os;
    os << "pair_index,dissimilarity,thickness_nm,std_nm\n";
    for (const auto& e : report.estimates) {
        os << e.pair_index << ',' << format_double(e.dissimilarity) << ',' << format_double(e.thickness_nm) << ','
           << format_double(e.std_nm) << '\n';
    }
    return os.str();
}

nlohmann::json thickness_summary(const ThicknessReport& report) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& e : report.estimates) {
        pairs.push_back({{"pair_index", e.pair_index},
                         {"section_index", e.pair_index},
                         {"thickness_nm", e.thickness_nm},
                         {"std_nm", e.std_nm},
                         {"negative", e.negative}});
    }
    return {{"mean_nm", report.mean_nm},
            {"std_nm", report.std_nm},
            {"pair_count", report.estimates.size()},
            {"negative_count", report.negative_count()},
            {"axis_used", std::string(to_string(report.axis_used))},
            {"gamma_yx", report.gamma_yx},
            {"attribution", "pair k (sections k and k+1) is reported as the thickness of section k"},
            {"pairs", pairs}};
}

std::string anisotropy_csv(const GammaEstimate& gamma) {
    std::ostringstream os;
    os << "plane_index,gamma_yx\n";
    for (std::size_t i = 0; i < gamma.per_plane_values.size(); ++i) {
        os << i << ',' << format_double(gamma.per_plane_values[i]) << '\n';
    }
    return os.str();
}

std::string rotation_scan_csv(const RotationScan& scan) {
    std::ostringstream os;
    os << "angle_deg,gamma_yx\n";
    for (std::size_t i = 0; i < scan.angles_deg.size(); ++i) {
        os << format_double(scan.angles_deg[i]) << ',' << format_double(scan.gammas[i]) << '\n';
    }
    return os.str();
}

std::string size_sweep_csv(const std::vector<SweepPoint>& sweep) {
    std::ostringstream os;
    os << "size_px,mean_nm,std_nm\n";
    for (const auto& p : sweep) {
        os << p.size_px << ',' << format_double(p.mean_nm) << ',' << format_double(p.std_nm) << '\n';
    }
    return os.str();
}

std::vector<std::filesystem::path> write_reports(const ReportSet& reports, const std::filesystem::path& out_dir,
                                                 std::ostream& log) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());

    std::vector<std::filesystem::path> written;
    auto put = [&](const std::string& name, const std::string& content) {
        const auto path = out_dir / name;
        write_file_atomic(path, content);
        written.push_back(path);
    };
    if (reports.calibration) put("calibration.json", to_json(*reports.calibration).dump(2) + "\n");
    if (reports.thickness) {
        put("thickness.csv", thickness_csv(*reports.thickness));
        put("thickness.json", thickness_summary(*reports.thickness).dump(2) + "\n");
    }
    if (reports.anisotropy) put("anisotropy.csv", anisotropy_csv(*reports.anisotropy));
    if (reports.rotation) {
        if (reports.rotation->empty()) {
            log << "note: rotation scan has no angles; rotation_scan.csv not written\n";
        } else {
            put("rotation_scan.csv", rotation_scan_csv(*reports.rotation));
        }
    }
    return written;
}

}  // namespace emcal::io
