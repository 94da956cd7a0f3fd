#include "emcal/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace emcal::io {

using nlohmann::json;

std::string config_hash(const CalibrationConfig& cfg) {
    std::ostringstream os;
    os << cfg.max_shift_px << '|' << cfg.patch_w_px.value_or(-1) << '|' << cfg.patch_h_px.value_or(-1) << '|'
       << format_double(cfg.patch_um) << '|' << cfg.positions_per_shift << '|' << cfg.seed << '|';
    for (auto p : cfg.calibration_planes) os << p << ',';
    os << '|' << (cfg.sigma ? format_double(*cfg.sigma) : "-") << '|' << (cfg.ell ? format_double(*cfg.ell) : "-")
       << '|' << (cfg.noise_var ? format_double(*cfg.noise_var) : "-") << '|' << cfg.normalized_intensities;
    // FNV-1a, 64 bit.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : os.str()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << h;
    return hex.str();
}

namespace {

json vector_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    return v;
}

json gamma_json(const GammaEstimate& g) {
    return {{"gamma_yx", g.gamma_yx},
            {"n_hat_yx", g.n_hat_yx},
            {"aspect_ratio", g.aspect_ratio},
            {"std", g.std},
            {"per_plane", g.per_plane_values},
            {"per_plane_dissimilarity", g.per_plane_dissimilarity}};
}

GammaEstimate gamma_from_json(const json& j) {
    GammaEstimate g;
    g.gamma_yx = j.at("gamma_yx").get<double>();
    g.n_hat_yx = j.at("n_hat_yx").get<double>();
    g.aspect_ratio = j.at("aspect_ratio").get<double>();
    g.std = j.at("std").get<double>();
    g.per_plane_values = j.at("per_plane").get<std::vector<double>>();
    g.per_plane_dissimilarity = j.value("per_plane_dissimilarity", std::vector<double>{});
    return g;
}

}  // namespace

json to_json(const ModelFile& m) {
    const auto& h = m.model.hyper;
    return {{"format_version", kFormatVersion},
            {"axis", std::string(to_string(m.axis))},
            {"resolution", {{"dx", m.resolution.dx()}, {"dy", m.resolution.dy()}}},
            {"hyperparameters",
             {{"sigma", h.sigma}, {"ell", h.ell}, {"a", h.a}, {"b", h.b}, {"noise_var", h.noise_var}}},
            {"hyperprior",
             {{"mu_a", m.hyperprior.mu_a},
              {"sigma_a", m.hyperprior.sigma_a},
              {"mu_b", m.hyperprior.mu_b},
              {"sigma_b", m.hyperprior.sigma_b}}},
            {"training", {{"s", vector_json(m.model.train_s)}, {"d", vector_json(m.model.train_d)}}},
            {"provenance", {{"seed", m.provenance.seed}, {"config_hash", m.provenance.config_hash}}}};
}

ModelFile model_from_json(const json& j) {
    try {
        if (j.at("format_version").get<int>() != kFormatVersion) {
            throw IoError("unsupported model format_version " + j.at("format_version").dump());
        }
        ModelFile m;
        m.axis = axis_from_string(j.at("axis").get<std::string>());
        m.resolution = Resolution(j.at("resolution").at("dx").get<double>(), j.at("resolution").at("dy").get<double>());
        const auto& hj = j.at("hyperparameters");
        Hyperparameters<double> h;
        h.sigma = hj.at("sigma").get<double>();
        h.ell = hj.at("ell").get<double>();
        h.a = hj.at("a").get<double>();
        h.b = hj.at("b").get<double>();
        h.noise_var = hj.at("noise_var").get<double>();
        const auto& pj = j.at("hyperprior");
        m.hyperprior.a = m.hyperprior.mu_a = pj.at("mu_a").get<double>();
        m.hyperprior.b = m.hyperprior.mu_b = pj.at("mu_b").get<double>();
        m.hyperprior.sigma_a = pj.at("sigma_a").get<double>();
        m.hyperprior.sigma_b = pj.at("sigma_b").get<double>();
        const auto s = vector_from_json(j.at("training").at("s"));
        const auto d = vector_from_json(j.at("training").at("d"));
        m.model = train_gp<double>(s, d, h);
        m.provenance.seed = j.at("provenance").at("seed").get<std::uint64_t>();
        m.provenance.config_hash = j.at("provenance").at("config_hash").get<std::string>();
        return m;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed model JSON: ") + e.what());
    }
}

CalibrationFile make_calibration_file(const CalibrationResult& result, const Resolution& res,
                                      const CalibrationConfig& cfg) {
    const Provenance prov{cfg.seed, config_hash(cfg)};
    CalibrationFile c;
    c.fx = ModelFile{Axis::X, res, result.fx.power_law, result.fx.model, prov};
    c.fy = ModelFile{Axis::Y, res, result.fy.power_law, result.fy.model, prov};
    c.gamma = result.gamma;
    c.chosen_axis = result.chosen_axis;
    return c;
}

json to_json(const CalibrationFile& c) {
    return {{"format_version", kFormatVersion},
            {"gamma", gamma_json(c.gamma)},
            {"chosen_axis", std::string(to_string(c.chosen_axis))},
            {"models", {{"x", to_json(c.fx)}, {"y", to_json(c.fy)}}}};
}

CalibrationFile calibration_from_json(const json& j) {
    try {
        if (j.at("format_version").get<int>() != kFormatVersion) {
            throw IoError("unsupported calibration format_version " + j.at("format_version").dump());
        }
        CalibrationFile c;
        c.gamma = gamma_from_json(j.at("gamma"));
        c.chosen_axis = axis_from_string(j.at("chosen_axis").get<std::string>());
        c.fx = model_from_json(j.at("models").at("x"));
        c.fy = model_from_json(j.at("models").at("y"));
        return c;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed calibration JSON: ") + e.what());
    }
}

CalibrationFile load_calibration(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("cannot parse '" + path.string() + "': " + e.what());
    }
    try {
        return calibration_from_json(j);
    } catch (const IoError& e) {
        throw IoError("'" + path.string() + "': " + e.what());
    }
}

}  // namespace emcal::io
