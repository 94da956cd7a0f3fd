#include "emcal/io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace emcal::io {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 60.0;
constexpr int kSamples = 240;

struct Frame {
    double s_min, s_max, d_min, d_max;

    double px(double s) const { return kLeft + (s - s_min) / (s_max - s_min) * (kWidth - kLeft - kRight); }
    double py(double d) const { return kHeight - kBottom - (d - d_min) / (d_max - d_min) * (kHeight - kTop - kBottom); }
};

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::string band_polygon(const Frame& f, const std::vector<double>& s, const std::vector<double>& mean,
                         const std::vector<double>& sd, double k, const char* fill) {
    std::ostringstream os;
    os << "<polygon class=\"band\" data-sigma=\"" << k << "\" fill=\"" << fill << "\" fill-opacity=\"0.35\" points=\"";
    for (std::size_t i = 0; i < s.size(); ++i) os << num(f.px(s[i])) << ',' << num(f.py(mean[i] + k * sd[i])) << ' ';
    for (std::size_t i = s.size(); i-- > 0;) os << num(f.px(s[i])) << ',' << num(f.py(mean[i] - k * sd[i])) << ' ';
    os << "\"/>\n";
    return os.str();
}

}  // namespace

std::string distance_dissimilarity_svg(const GpModel<double>& model, const DissimilarityDataset& dataset) {
    if (dataset.samples.empty()) throw DataError("cannot plot an empty dataset");
    const auto svals = dataset.dissimilarities();
    const auto dvals = dataset.distances_nm();
    const double s_lo = 0.0;
    double s_hi = svals.maxCoeff() * 1.05;
    if (!(s_hi > s_lo)) s_hi = 1.0;

    std::vector<double> s(kSamples), mean(kSamples), sd(kSamples);
    for (int i = 0; i < kSamples; ++i) {
        s[i] = s_lo + (s_hi - s_lo) * i / (kSamples - 1);
        const auto p = predict(model, s[i]);
        mean[i] = p.mean;
        sd[i] = p.std;
    }
    double d_lo = std::min(0.0, dvals.minCoeff()), d_hi = dvals.maxCoeff();
    for (int i = 0; i < kSamples; ++i) {
        d_lo = std::min(d_lo, mean[i] - 5.0 * sd[i]);
        d_hi = std::max(d_hi, mean[i] + 5.0 * sd[i]);
    }
    if (!(d_hi > d_lo)) d_hi = d_lo + 1.0;
    const Frame f{s_lo, s_hi, d_lo, d_hi};
    const std::string axis_name(to_string(dataset.axis));

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << band_polygon(f, s, mean, sd, 5.0, "#dbe9f6");
    os << band_polygon(f, s, mean, sd, 3.0, "#9ecae1");
    os << band_polygon(f, s, mean, sd, 2.0, "#4292c6");

    os << "<polyline class=\"mean\" fill=\"none\" stroke=\"#08306b\" stroke-width=\"2\" points=\"";
    for (int i = 0; i < kSamples; ++i) os << num(f.px(s[i])) << ',' << num(f.py(mean[i])) << ' ';
    os << "\"/>\n<g class=\"points\" fill=\"#d62728\">\n";
    for (Eigen::Index i = 0; i < svals.size(); ++i) {
        os << "<circle cx=\"" << num(f.px(svals[i])) << "\" cy=\"" << num(f.py(dvals[i])) << "\" r=\"2\"/>\n";
    }
    os << "</g>\n";

    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    os << "<g stroke=\"black\" fill=\"none\"><line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\""
       << y0 << "\"/><line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\"/></g>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int t = 0; t <= 4; ++t) {
        const double sv = s_lo + (s_hi - s_lo) * t / 4.0;
        const double dv = d_lo + (d_hi - d_lo) * t / 4.0;
        os << "<text x=\"" << num(f.px(sv)) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">" << num(sv)
           << "</text>\n";
        os << "<text x=\"" << x0 - 6 << "\" y=\"" << num(f.py(dv) + 4) << "\" text-anchor=\"end\">" << num(dv)
           << "</text>\n";
    }
    os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 16
       << "\" text-anchor=\"middle\" font-size=\"13\">dissimilarity (normalized intensity)</text>\n";
    os << "<text x=\"18\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
       << (y0 + y1) / 2 << ")\">" << axis_name << " distance (nm)</text>\n";
    os << "</g>\n</svg>\n";
    return os.str();
}

void emit_distance_dissimilarity_plot(const GpModel<double>& model, const DissimilarityDataset& dataset,
                                      const std::filesystem::path& out_path) {
    write_file_atomic(out_path, distance_dissimilarity_svg(model, dataset));
}

}  // namespace emcal::io
