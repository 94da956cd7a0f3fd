#include "emcal/dissimilarity.hpp"
#include "emcal/synthetic.hpp"
#include "emcal/thickness.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace emcal;

namespace {

const Volume& shared_volume() {
    static const Volume vol = [] {
        VolumeConfig vc;
        vc.nx = vc.ny = 192;
        vc.nz = 451;
        vc.smoothing_voxels = 8.0;
        vc.seed = 3;
        return gen_isotropic_volume(vc);
    }();
    return vol;
}

CalibrationConfig volume_config() {
    CalibrationConfig cfg;
    cfg.patch_w_px = cfg.patch_h_px = 128;
    cfg.max_shift_px = 20;
    cfg.positions_per_shift = 5;
    cfg.seed = 5;
    for (std::size_t z = 3; z < 451; z += 15) cfg.calibration_planes.push_back(z);
    return cfg;
}

const CalibrationResult& shared_calibration() {
    static const CalibrationResult cal = calibrate(slice_volume(shared_volume(), 1), volume_config());
    return cal;
}

CalibrationConfig pair_config() {
    auto cfg = volume_config();
    cfg.calibration_planes.clear();
    return cfg;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

}  // namespace

TEST_CASE("thickness of slices recovers the true spacing") {
    const auto& cal = shared_calibration();
    for (int spacing : {2, 10, 15}) {
        const double truth = spacing * 5.0;
        const auto report = estimate_stack_thickness(slice_volume(shared_volume(), spacing), cal, pair_config());
        INFO("spacing ", truth, " nm: mean ", report.mean_nm);
        CHECK(std::abs(report.mean_nm - truth) <= 0.10 * truth);
        CHECK(report.negative_count() == 0);
    }
}

TEST_CASE("identical sections have near-zero thickness") {
    const auto& cal = shared_calibration();
    const auto plane = shared_volume().slice_z(100);
    const ImageStack dup({plane, plane, plane});
    testing::WarningCapture warnings;
    const auto report = estimate_stack_thickness(dup, cal, pair_config());
    for (const auto& e : report.estimates) {
        CHECK(e.dissimilarity == 0.0);
        CHECK(std::abs(e.thickness_nm) < 0.5 * 5.0);
    }
}

TEST_CASE("per-pair estimates equal the model prediction") {
    const auto& cal = shared_calibration();
    const auto stack = slice_volume(shared_volume(), 30);
    const auto cfg = pair_config();
    const auto report = estimate_stack_thickness(stack, cal, cfg);
    REQUIRE(report.estimates.size() == stack.size() - 1);
    CHECK(report.axis_used == cal.chosen_axis);
    CHECK(report.gamma_yx == cal.gamma_yx());
    double sum = 0.0;
    for (std::size_t k = 0; k < report.estimates.size(); ++k) {
        const auto& e = report.estimates[k];
        CHECK(e.pair_index == k);
        const double s = pair_dissimilarity(stack, k, 128, 128, cfg.positions_per_shift, cfg.seed);
        CHECK(e.dissimilarity == s);
        const auto p = predict(cal.chosen().model, s);
        CHECK(e.thickness_nm == p.mean);
        CHECK(e.std_nm == p.std);
        sum += e.thickness_nm;
    }
    CHECK(report.mean_nm == doctest::Approx(sum / report.estimates.size()).epsilon(1e-14).scale(0.0));
}

TEST_CASE("constant intensity offset leaves thickness unchanged") {
    const auto& cal = shared_calibration();
    const auto stack = slice_volume(shared_volume(), 40);
    std::vector<ImagePlane> shifted;
    for (const auto& p : stack.planes()) shifted.emplace_back((p.pixels() * 0.75 + 0.125).eval(), p.resolution());
    std::vector<ImagePlane> scaled;
    for (const auto& p : stack.planes()) scaled.emplace_back((p.pixels() * 0.75).eval(), p.resolution());
    const auto a = estimate_stack_thickness(ImageStack(shifted), cal, pair_config());
    const auto b = estimate_stack_thickness(ImageStack(scaled), cal, pair_config());
    CHECK(a.mean_nm == doctest::Approx(b.mean_nm).epsilon(1e-9).scale(0.0));
}

TEST_CASE("negative predictions are flagged and warned") {
    Hyperparameters<double> h;
    h.sigma = 20.0;
    h.ell = 0.5;
    h.a = 1e-6;
    h.b = 1.0;
    h.noise_var = 1e-4;
    const Eigen::VectorXd s = Eigen::VectorXd::LinSpaced(11, 0.0, 1.0);
    const Eigen::VectorXd d = Eigen::VectorXd::Constant(11, -10.0);
    const auto model = train_gp<double>(s, d, h);
    testing::WarningCapture warnings;
    const auto report = estimate_stack_thickness(slice_volume(shared_volume(), 100), model, pair_config());
    CHECK(report.negative_count() == report.estimates.size());
    for (const auto& e : report.estimates) CHECK(e.negative);
    CHECK(warnings.text().find("negative predicted thickness") != std::string::npos);
}

TEST_CASE("a single section is rejected") {
    const ImageStack one({shared_volume().slice_z(0)});
    CHECK_THROWS_AS(estimate_stack_thickness(one, shared_calibration(), pair_config()), DataError);
}

TEST_CASE("size sweep at one size equals the stack estimate") {
    const auto& cal = shared_calibration();
    const auto stack = slice_volume(shared_volume(), 10);
    auto cfg = pair_config();
    cfg.patch_w_px = cfg.patch_h_px = 96;
    const auto sweep = size_sweep(stack, cal.chosen().model, cfg, {96});
    const auto report = estimate_stack_thickness(stack, cal.chosen().model, cfg);
    REQUIRE(sweep.size() == 1);
    CHECK(sweep[0].size_px == 96);
    CHECK(sweep[0].mean_nm == report.mean_nm);
    CHECK(sweep[0].std_nm == report.std_nm);
}

TEST_CASE("spread across sections shrinks with patch size") {
    const auto& cal = shared_calibration();
    const auto stack = slice_volume(shared_volume(), 10);
    const std::vector<int> sizes{24, 48, 96, 160};
    const auto sweep = size_sweep(stack, cal.chosen().model, pair_config(), sizes);
    std::vector<double> sz, sd;
    for (const auto& p : sweep) {
        sz.push_back(p.size_px);
        sd.push_back(p.std_nm);
    }
    CHECK(spearman(sz, sd) < -0.5);
    CHECK(sweep.back().std_nm < sweep.front().std_nm);
}
