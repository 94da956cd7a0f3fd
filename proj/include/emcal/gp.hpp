#pragma once

#include "emcal/core.hpp"
#include "emcal/power_law.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <sstream>

namespace emcal {

/// GP hyperparameters: SE kernel (sigma, ell), power-law mean (a, b), observation noise.
template <typename Scalar>
struct Hyperparameters {
    Scalar sigma{1};
    Scalar ell{1};
    Scalar a{1};
    Scalar b{1};
    Scalar noise_var{1e-6};

    void validate() const {
        if (!(sigma > Scalar(0)) || !(ell > Scalar(0)) || !(noise_var >= Scalar(0)) || !(a >= Scalar(0)) ||
            !std::isfinite(static_cast<double>(b))) {
            std::ostringstream os;
            os << "invalid hyperparameters: sigma=" << sigma << " ell=" << ell << " a=" << a << " b=" << b
               << " noise_var=" << noise_var;
            throw ConfigError(os.str());
        }
    }

    Scalar mean(Scalar s) const { return power_law(s, a, b); }
};

/// Default length scale: 10 intensity levels of an 8-bit image, expressed in the unit the
/// dissimilarities are measured in.
inline constexpr double default_length_scale(bool normalized_intensities) {
    return normalized_intensities ? 10.0 / 255.0 : 10.0;
}

template <typename Scalar>
Scalar se_kernel(Scalar s1, Scalar s2, const Hyperparameters<Scalar>& h) {
    using std::exp;
    const Scalar diff = s1 - s2;
    return h.sigma * h.sigma * exp(-diff * diff / (Scalar(2) * h.ell * h.ell));
}

template <typename Scalar>
using GpVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using GpMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Cross-covariance matrix K(rows, cols).
template <typename Scalar>
GpMatrix<Scalar> kernel_matrix(const GpVector<Scalar>& rows, const GpVector<Scalar>& cols,
                               const Hyperparameters<Scalar>& h) {
    GpMatrix<Scalar> k(rows.size(), cols.size());
    for (Eigen::Index j = 0; j < cols.size(); ++j)
        for (Eigen::Index i = 0; i < rows.size(); ++i) k(i, j) = se_kernel(rows[i], cols[j], h);
    return k;
}

class FactorizationError : public DataError {
public:
    FactorizationError(const std::string& what, double condition_estimate)
        : DataError(what), condition_(condition_estimate) {}
    double condition_estimate() const { return condition_; }

private:
    double condition_;
};

/// Trained regressor. `hyper.noise_var` holds the noise actually used, after any jitter escalation.
template <typename Scalar>
struct GpModel {
    Hyperparameters<Scalar> hyper;
    GpVector<Scalar> train_s;
    GpVector<Scalar> train_d;
    GpMatrix<Scalar> chol;  // lower factor of K + noise_var I
    GpVector<Scalar> alpha;
    int jitter_escalations = 0;

    Eigen::Index size() const { return train_s.size(); }
};

template <typename Scalar>
struct Prediction {
    Scalar mean;
    Scalar std;
};

/// Factorizes K + noise_var I, escalating noise by x10 up to 1e-2 sigma^2 when the factor fails.
/// With noise_var = 0 the first escalation step starts from 1e-6 sigma^2.
template <typename Scalar>
GpModel<Scalar> train_gp(const GpVector<Scalar>& s, const GpVector<Scalar>& d, Hyperparameters<Scalar> hyper) {
    using std::sqrt;
    hyper.validate();
    if (s.size() == 0) throw DataError("cannot train a GP on an empty dataset");
    if (s.size() != d.size()) throw DataError("GP training inputs and targets differ in length");

    const Scalar signal_var = hyper.sigma * hyper.sigma;
    const Scalar max_noise = Scalar(1e-2) * signal_var;
    const GpMatrix<Scalar> k = kernel_matrix<Scalar>(s, s, hyper);
    const Eigen::Index n = s.size();

    GpModel<Scalar> model;
    for (;;) {
        GpMatrix<Scalar> kn = k;
        kn.diagonal().array() += hyper.noise_var;
        Eigen::LLT<GpMatrix<Scalar>> llt(kn);
        bool ok = llt.info() == Eigen::Success;
        if (ok) {
            // Reject numerically singular factors whose smallest pivot vanished to rounding.
            // Non-finite factors come from non-finite inputs and count as failures.
            const auto pivots = llt.matrixLLT().diagonal();
            const Scalar min_pivot = pivots.minCoeff();
            ok = pivots.allFinite() && min_pivot * min_pivot > Scalar(n) * std::numeric_limits<Scalar>::epsilon() * signal_var;
        }
        if (ok) {
            model.chol = llt.matrixL();
            break;
        }
        if (hyper.noise_var >= max_noise) {
            const double cond = static_cast<double>(llt.rcond() > Scalar(0) ? Scalar(1) / llt.rcond()
                                                                              : std::numeric_limits<Scalar>::infinity());
            std::ostringstream os;
            os << "kernel matrix factorization failed after jitter escalation to noise_var=" << hyper.noise_var
               << " (condition estimate " << cond << ")";
            throw FactorizationError(os.str(), cond);
        }
        hyper.noise_var = hyper.noise_var > Scalar(0) ? std::min(hyper.noise_var * Scalar(10), max_noise)
                                                      : Scalar(1e-6) * signal_var;
        ++model.jitter_escalations;
    }

    GpVector<Scalar> residual(n);
    for (Eigen::Index i = 0; i < n; ++i) residual[i] = d[i] - hyper.mean(s[i]);
    model.alpha = model.chol.template triangularView<Eigen::Lower>().solve(residual);
    model.chol.transpose().template triangularView<Eigen::Upper>().solveInPlace(model.alpha);
    model.hyper = hyper;
    model.train_s = s;
    model.train_d = d;
    return model;
}

template <typename Scalar>
Prediction<Scalar> predict(const GpModel<Scalar>& model, Scalar s_star) {
    using std::sqrt;
    const auto& h = model.hyper;
    GpVector<Scalar> k_star(model.size());
    for (Eigen::Index i = 0; i < model.size(); ++i) k_star[i] = se_kernel(s_star, model.train_s[i], h);
    const Scalar mean = h.mean(s_star) + k_star.dot(model.alpha);
    const GpVector<Scalar> v = model.chol.template triangularView<Eigen::Lower>().solve(k_star);
    const Scalar var = h.sigma * h.sigma + h.noise_var - v.squaredNorm();
    return {mean, sqrt(std::max(var, Scalar(0)))};
}

template <typename Scalar>
Scalar log_marginal_likelihood(const GpModel<Scalar>& model) {
    using std::log;
    const Eigen::Index n = model.size();
    GpVector<Scalar> residual(n);
    for (Eigen::Index i = 0; i < n; ++i) residual[i] = model.train_d[i] - model.hyper.mean(model.train_s[i]);
    const Scalar log_det_half = model.chol.diagonal().array().log().sum();
    return Scalar(-0.5) * residual.dot(model.alpha) - log_det_half -
           Scalar(0.5) * Scalar(n) * log(Scalar(2) * std::numbers::pi_v<Scalar>);
}

}  // namespace emcal
