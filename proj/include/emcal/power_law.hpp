#pragma once

#include "emcal/core.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>

namespace emcal {

/// Power-law mean m(s) = a * s^b. m(0) is 0 for b > 0 and undefined otherwise.
template <typename Scalar>
Scalar power_law(Scalar s, Scalar a, Scalar b) {
    using std::pow;
    if (s == Scalar(0)) {
        if (b > Scalar(0)) return Scalar(0);
        throw DataError("power-law mean is undefined at s = 0 for exponent b <= 0");
    }
    return a * pow(s, b);
}

/// Levenberg-Marquardt estimate of (a, b) plus Gaussian hyperprior moments taken from the
/// residual-scaled inverse Gauss-Newton Hessian.
template <typename Scalar>
struct PowerLawFit {
    Scalar a{};
    Scalar b{};
    Scalar mu_a{};
    Scalar sigma_a{};
    Scalar mu_b{};
    Scalar sigma_b{};
    Scalar residual_ss{};
    int iterations = 0;
    bool nonphysical_exponent = false;
};

struct LmOptions {
    double initial_damping = 1e-3;
    double damping_factor = 10.0;
    int max_iterations = 200;
    double relative_tolerance = 1e-10;
};

/// Thrown when LM exhausts its iteration budget. Carries the last iterate.
class LmNonConvergence : public DataError {
public:
    LmNonConvergence(double a, double b, double residual_ss, int iterations)
        : DataError(message(a, b, residual_ss, iterations)), a_(a), b_(b), residual_ss_(residual_ss) {}

    double a() const { return a_; }
    double b() const { return b_; }
    double residual_ss() const { return residual_ss_; }

private:
    static std::string message(double a, double b, double rss, int it) {
        std::ostringstream os;
        os.precision(17);
        os << "Levenberg-Marquardt did not converge after " << it << " iterations (a=" << a << ", b=" << b
           << ", residual sum of squares=" << rss << ")";
        return os.str();
    }
    double a_, b_, residual_ss_;
};

namespace detail {

template <typename Scalar>
Scalar power_law_rss(const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& s,
                     const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& d, Scalar a, Scalar b) {
    using std::pow;
    Scalar rss(0);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const Scalar model = s[i] > Scalar(0) ? a * pow(s[i], b) : Scalar(0);
        const Scalar r = d[i] - model;
        rss += r * r;
    }
    return rss;
}

/// Log-log least squares on points with s > 0 and d > 0; falls back to (1, 1).
template <typename Scalar>
std::pair<Scalar, Scalar> log_log_guess(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& s,
                                        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& d) {
    using std::exp;
    using std::log;
    Scalar sx(0), sy(0), sxx(0), sxy(0);
    int n = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] > Scalar(0) && d[i] > Scalar(0)) {
            const Scalar x = log(s[i]);
            const Scalar y = log(d[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
    }
    const Scalar denom = n * sxx - sx * sx;
    if (n < 2 || !(std::abs(denom) > Scalar(0))) return {Scalar(1), Scalar(1)};
    const Scalar b = (n * sxy - sx * sy) / denom;
    const Scalar a = exp((sy - b * sx) / n);
    if (!std::isfinite(static_cast<double>(a)) || !std::isfinite(static_cast<double>(b))) return {Scalar(1), Scalar(1)};
    return {a, b};
}

}  // namespace detail

/// Least-squares fit of d = a * s^b by Levenberg-Marquardt. Points with s = 0 contribute a
/// zero model value and zero Jacobian.
template <typename Scalar>
PowerLawFit<Scalar> fit_power_law_lm(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& s,
                                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& d,
                                     std::optional<std::pair<Scalar, Scalar>> init = std::nullopt,
                                     const LmOptions& opts = {}) {
    using std::abs;
    using std::log;
    using std::pow;
    using std::sqrt;
    using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
    using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

    if (s.size() != d.size()) throw DataError("power-law fit: input and target lengths differ");
    if (s.size() < 2) throw DataError("power-law fit needs at least 2 points");
    if ((s.array() < Scalar(0)).any() || (d.array() < Scalar(0)).any()) {
        throw DataError("power-law fit requires non-negative inputs and targets");
    }

    auto [a, b] = init ? *init : detail::log_log_guess<Scalar>(s, d);
    Scalar lambda(opts.initial_damping);
    Scalar rss = detail::power_law_rss<Scalar>(s, d, a, b);
    const Scalar scale = d.squaredNorm();
    const Scalar tiny = std::numeric_limits<Scalar>::epsilon();

    auto normal_equations = [&](Scalar pa, Scalar pb, Mat2& jtj, Vec2& jtr) {
        jtj.setZero();
        jtr.setZero();
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (!(s[i] > Scalar(0))) continue;
            const Scalar p = pow(s[i], pb);
            const Vec2 g(p, pa * p * log(s[i]));
            const Scalar r = d[i] - pa * p;
            jtj.noalias() += g * g.transpose();
            jtr.noalias() += g * r;
        }
    };

    Mat2 jtj;
    Vec2 jtr;
    bool converged = false;
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (rss <= tiny * tiny * scale) {
            converged = true;
            break;
        }
        normal_equations(a, b, jtj, jtr);
        bool accepted = false;
        Scalar new_rss = rss;
        Vec2 step = Vec2::Zero();
        while (lambda < Scalar(1e20)) {
            Mat2 damped = jtj;
            damped.diagonal() += lambda * jtj.diagonal().cwiseMax(tiny);
            step = damped.ldlt().solve(jtr);
            new_rss = detail::power_law_rss<Scalar>(s, d, a + step[0], b + step[1]);
            if (std::isfinite(static_cast<double>(new_rss)) && new_rss < rss) {
                accepted = true;
                break;
            }
            lambda *= Scalar(opts.damping_factor);
        }
        if (!accepted) {
            // No descent direction improves the residual: stationary point.
            converged = true;
            break;
        }
        a += step[0];
        b += step[1];
        lambda = std::max(lambda / Scalar(opts.damping_factor), Scalar(1e-15));
        const Scalar change = (rss - new_rss) / std::max(rss, tiny);
        rss = new_rss;
        if (change < Scalar(opts.relative_tolerance) ||
            step.norm() <= Scalar(1e-14) * (abs(a) + abs(b) + Scalar(1e-14))) {
            converged = true;
            ++it;
            break;
        }
    }
    if (!converged) {
        throw LmNonConvergence(static_cast<double>(a), static_cast<double>(b), static_cast<double>(rss), it);
    }

    PowerLawFit<Scalar> fit;
    fit.a = a;
    fit.b = b;
    fit.mu_a = a;
    fit.mu_b = b;
    fit.residual_ss = rss;
    fit.iterations = it;
    fit.nonphysical_exponent = b < Scalar(0);

    normal_equations(a, b, jtj, jtr);
    const Eigen::Index n = s.size();
    const Scalar residual_var = n > 2 ? rss / Scalar(n - 2) : Scalar(0);
    const Mat2 cov = residual_var * Eigen::CompleteOrthogonalDecomposition<Mat2>(jtj).pseudoInverse();
    fit.sigma_a = sqrt(std::max(cov(0, 0), Scalar(0)));
    fit.sigma_b = sqrt(std::max(cov(1, 1), Scalar(0)));
    return fit;
}

}  // namespace emcal
