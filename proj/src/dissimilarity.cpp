#include "emcal/dissimilarity.hpp"

#include "emcal/diagnostics.hpp"
#include "emcal/seeding.hpp"

#include <random>
#include <string>

namespace emcal {

Eigen::VectorXd DissimilarityDataset::dissimilarities() const {
    Eigen::VectorXd s(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) s[static_cast<Eigen::Index>(i)] = samples[i].dissimilarity;
    return s;
}

Eigen::VectorXd DissimilarityDataset::distances_nm() const {
    Eigen::VectorXd d(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) d[static_cast<Eigen::Index>(i)] = samples[i].distance_nm;
    return d;
}

std::vector<PatchPairSample> sample_shifted_pairs(const ImagePlane& img, Axis axis, const ShiftSampling& params) {
    if (params.max_shift_px < 1) throw ConfigError("max_shift_px must be at least 1");
    if (params.positions_per_shift < 1) throw ConfigError("positions_per_shift must be at least 1");
    if (params.patch_w_px < 1 || params.patch_h_px < 1) throw ConfigError("patch dimensions must be positive");

    const int along = axis == Axis::X ? img.width() : img.height();
    const int patch_along = axis == Axis::X ? params.patch_w_px : params.patch_h_px;
    const int across = axis == Axis::X ? img.height() : img.width();
    const int patch_across = axis == Axis::X ? params.patch_h_px : params.patch_w_px;

    if (patch_across > across || patch_along >= along) {
        throw DataError("patch " + std::to_string(params.patch_w_px) + "x" + std::to_string(params.patch_h_px) +
                        " does not fit image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                        " with any shift");
    }
    if (params.max_shift_px + patch_along > along) {
        throw DataError("max shift " + std::to_string(params.max_shift_px) + " px exceeds image bounds along " +
                        std::string(to_string(axis)) + "; maximum feasible shift is " +
                        std::to_string(along - patch_along) + " px");
    }

    const double step_nm = img.resolution().step(axis);
    const auto per_shift = static_cast<std::size_t>(params.positions_per_shift);
    std::vector<PatchPairSample> out(static_cast<std::size_t>(params.max_shift_px) * per_shift);
    const std::uint64_t axis_tag = axis == Axis::X ? kTagAxisX : kTagAxisY;

    parallel_for(static_cast<std::size_t>(params.max_shift_px), [&](std::size_t shift_index) {
        const int n = static_cast<int>(shift_index) + 1;
        Rng rng(derive_seed(params.seed, {axis_tag, static_cast<std::uint64_t>(n)}));
        std::uniform_int_distribution<int> pick_along(0, along - patch_along - n);
        std::uniform_int_distribution<int> pick_across(0, across - patch_across);
        for (std::size_t p = 0; p < per_shift; ++p) {
            const int u = pick_along(rng);
            const int v = pick_across(rng);
            double s;
            if (axis == Axis::X) {
                s = sdi(img.region(u, v, params.patch_w_px, params.patch_h_px),
                        img.region(u + n, v, params.patch_w_px, params.patch_h_px));
            } else {
                s = sdi(img.region(v, u, params.patch_w_px, params.patch_h_px),
                        img.region(v, u + n, params.patch_w_px, params.patch_h_px));
            }
            out[shift_index * per_shift + p] = PatchPairSample{n, n * step_nm, s, axis};
        }
    });
    return out;
}

double pair_dissimilarity(const ImageStack& stack, std::size_t k, int patch_w_px, int patch_h_px, int positions,
                          std::uint64_t seed) {
    if (k + 1 >= stack.size()) {
        throw DataError("section pair index " + std::to_string(k) + " out of range for a stack of " +
                        std::to_string(stack.size()) + " planes");
    }
    if (positions < 1) throw ConfigError("positions must be at least 1");
    if (patch_w_px < 1 || patch_h_px < 1 || patch_w_px > stack.width() || patch_h_px > stack.height()) {
        throw DataError("patch " + std::to_string(patch_w_px) + "x" + std::to_string(patch_h_px) +
                        " does not fit the stack planes");
    }
    const auto& a = stack[k];
    const auto& b = stack[k + 1];
    Rng rng(derive_seed(seed, {kTagPair, static_cast<std::uint64_t>(k)}));
    std::uniform_int_distribution<int> pick_x(0, stack.width() - patch_w_px);
    std::uniform_int_distribution<int> pick_y(0, stack.height() - patch_h_px);
    double total = 0.0;
    for (int p = 0; p < positions; ++p) {
        const int x = pick_x(rng);
        const int y = pick_y(rng);
        total += sdi(a.region(x, y, patch_w_px, patch_h_px), b.region(x, y, patch_w_px, patch_h_px));
    }
    return total / positions;
}

}  // namespace emcal
