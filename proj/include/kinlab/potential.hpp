#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "kinlab/errors.hpp"
#include "kinlab/torus.hpp"

namespace kinlab {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// One term a * cos(2*pi*(k.x + phi)) of a trigonometric potential.
struct CosineTerm {
    double amplitude = 0.0;
    Eigen::VectorXi wave;
    double phase = 0.0;
};

/// Certified bounds attached to a potential: G >= sup |grad W|,
/// H >= sup ||Hess W||, and the Gibbs normalisation Z = int exp(-W) dx.
struct PotentialBounds {
    double grad_sup = 0.0;
    double hess_sup = 0.0;
    double gibbs_mass = 1.0;
};

/// Smooth 1-periodic potential on the unit torus: either identically zero or
/// a finite sum of cosine terms. Bounds are certified at construction by
/// combining dense grid maxima (plus a Lipschitz slack) with the analytic
/// coefficient majorants, keeping whichever upper bound is tighter.
class Potential {
  public:
    enum class Kind { Zero, CosineSum };

    static Potential zero(int dim) { return Potential(dim); }

    static Potential cosine_sum(int dim, std::vector<CosineTerm> terms) {
        Potential w(dim);
        for (const auto& t : terms) {
            if (t.wave.size() != dim) throw ConfigError("potential term wave vector has wrong dimension");
            if (t.wave.isZero() && t.amplitude != 0.0)
                throw ConfigError("potential term with zero wave vector is a constant; fold it into the phase reference");
        }
        w.kind_ = Kind::CosineSum;
        w.terms_ = std::move(terms);
        w.certify_bounds();
        return w;
    }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool is_zero() const { return kind_ == Kind::Zero; }
    const std::vector<CosineTerm>& terms() const { return terms_; }

    double value(const Vec& x) const {
        double s = 0.0;
        for (const auto& t : terms_) s += t.amplitude * std::cos(two_pi * (t.wave.cast<double>().dot(x) + t.phase));
        return s;
    }

    Vec gradient(const Vec& x) const {
        Vec g = Vec::Zero(dim_);
        for (const auto& t : terms_) {
            double ph = two_pi * (t.wave.cast<double>().dot(x) + t.phase);
            g -= t.amplitude * two_pi * std::sin(ph) * t.wave.cast<double>();
        }
        return g;
    }

    Mat hessian(const Vec& x) const {
        Mat h = Mat::Zero(dim_, dim_);
        for (const auto& t : terms_) {
            double ph = two_pi * (t.wave.cast<double>().dot(x) + t.phase);
            Vec k = t.wave.cast<double>();
            h -= t.amplitude * two_pi * two_pi * std::cos(ph) * (k * k.transpose());
        }
        return h;
    }

    /// Certified sup |grad W|.
    double grad_sup_bound() const { return grad_sup_; }
    /// Certified sup ||Hess W|| (operator norm).
    double hess_sup_bound() const { return hess_sup_; }
    /// int_T^d exp(-W) dx, by the periodic trapezoidal rule (spectrally
    /// accurate for these smooth integrands).
    double gibbs_mass() const { return gibbs_mass_; }

  private:
    explicit Potential(int dim) : dim_(dim) {
        if (dim < 1) throw ConfigError("potential dimension must be >= 1");
    }

    double coeff_majorant(int deriv_order) const {
        double s = 0.0;
        for (const auto& t : terms_)
            s += std::abs(t.amplitude) * std::pow(two_pi * t.wave.cast<double>().norm(), deriv_order);
        return s;
    }

    double hess_norm(const Mat& h) const {
        if (dim_ == 1) return std::abs(h(0, 0));
        Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }

    void certify_bounds() {
        const double g_major = coeff_majorant(1);
        const double h_major = coeff_majorant(2);
        const double d3_major = coeff_majorant(3);

        int n = dim_ == 1 ? 4096 : (dim_ == 2 ? 192 : 24);
        const double h = 1.0 / n;
        const double reach = 0.5 * h * std::sqrt(double(dim_));  // farthest point from a grid node

        double g_grid = 0.0, h_grid = 0.0, z_sum = 0.0;
        Vec x(dim_);
        Eigen::VectorXi idx = Eigen::VectorXi::Zero(dim_);
        const long total = static_cast<long>(std::pow(double(n), dim_));
        for (long c = 0; c < total; ++c) {
            long rem = c;
            for (int k = 0; k < dim_; ++k) {
                x[k] = (rem % n) * h;
                rem /= n;
            }
            g_grid = std::max(g_grid, gradient(x).norm());
            h_grid = std::max(h_grid, hess_norm(hessian(x)));
            z_sum += std::exp(-value(x));
        }
        grad_sup_ = std::min(g_major, g_grid + reach * h_major);
        hess_sup_ = std::min(h_major, h_grid + reach * d3_major);
        gibbs_mass_ = z_sum / double(total);
    }

    Kind kind_ = Kind::Zero;
    int dim_;
    std::vector<CosineTerm> terms_;
    double grad_sup_ = 0.0;
    double hess_sup_ = 0.0;
    double gibbs_mass_ = 1.0;
};

/// (G, H, Z) of the potential: certified gradient and Hessian sups and the
/// Gibbs mass int exp(-W).
inline PotentialBounds potential_bounds(const Potential& w) {
    return {w.grad_sup_bound(), w.hess_sup_bound(), w.gibbs_mass()};
}

}  // namespace kinlab
