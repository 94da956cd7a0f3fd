#pragma once

#include "emcal/core.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

namespace emcal {

/// Standard deviation of pixel-wise intensity differences between two equally sized regions:
/// sqrt(mean((a - b)^2)). Works on any Eigen array expression.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar sdi(const Eigen::ArrayBase<DerivedA>& a, const Eigen::ArrayBase<DerivedB>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream os;
        os << "sdi: region shapes differ (" << a.cols() << "x" << a.rows() << " vs " << b.cols() << "x"
           << b.rows() << ")";
        throw DataError(os.str());
    }
    if (a.size() == 0) throw DataError("sdi: regions must contain at least one pixel");
    using std::sqrt;
    return sqrt((a.derived() - b.derived()).square().mean());
}

struct PatchPairSample {
    int distance_px;
    double distance_nm;
    double dissimilarity;
    Axis axis;
};

/// Training points (distance, dissimilarity) collected along one in-plane axis.
struct DissimilarityDataset {
    std::vector<PatchPairSample> samples;
    Axis axis = Axis::X;
    int patch_width_px = 0;
    int patch_height_px = 0;
    int source_count = 0;

    std::size_t size() const { return samples.size(); }
    Eigen::VectorXd dissimilarities() const;
    Eigen::VectorXd distances_nm() const;
};

struct ShiftSampling {
    int max_shift_px = 20;
    int patch_w_px = 0;
    int patch_h_px = 0;
    int positions_per_shift = 20;
    std::uint64_t seed = 0;
};

/// Patch pairs displaced by n = 1..max_shift_px pixels along `axis`, positions_per_shift
/// seeded anchors per shift. Output is ordered by (shift, position index).
std::vector<PatchPairSample> sample_shifted_pairs(const ImagePlane& img, Axis axis, const ShiftSampling& params);

/// Mean SDI over `positions` seeded co-located patches of planes k and k+1.
double pair_dissimilarity(const ImageStack& stack, std::size_t k, int patch_w_px, int patch_h_px, int positions,
                          std::uint64_t seed);

}  // namespace emcal
