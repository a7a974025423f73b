#pragma once

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <utility>

#include "kinlab/errors.hpp"
#include "kinlab/torus.hpp"

namespace kinlab {

/// The set V of admissible velocities. Ball and Box are continuous with
/// uniform equilibrium law; Discrete carries explicit atoms and probability
/// weights; Full is R^d with the standard Maxwellian law.
class VelocitySpace {
  public:
    enum class Kind { Ball, Box, Discrete, Full };

    static VelocitySpace ball(int dim, double radius) {
        if (radius <= 0.0) throw ConfigError("velocity ball radius must be > 0");
        VelocitySpace v(dim, Kind::Ball);
        v.radius_ = radius;
        return v;
    }

    static VelocitySpace box(Vec lo, Vec hi) {
        if (lo.size() != hi.size() || lo.size() < 1) throw ConfigError("velocity box bounds must align");
        if (((hi - lo).array() <= 0.0).any()) throw ConfigError("velocity box must have positive extent");
        VelocitySpace v(int(lo.size()), Kind::Box);
        v.lo_ = std::move(lo);
        v.hi_ = std::move(hi);
        return v;
    }

    /// atoms: one velocity per row; weights: probabilities summing to 1.
    static VelocitySpace discrete(Mat atoms, Vec weights) {
        if (atoms.rows() < 1 || atoms.rows() != weights.size())
            throw ConfigError("discrete velocity atoms and weights must align");
        if ((weights.array() < 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-12)
            throw ConfigError("discrete velocity weights must be nonnegative and sum to 1");
        VelocitySpace v(int(atoms.cols()), Kind::Discrete);
        v.atoms_ = std::move(atoms);
        v.weights_ = std::move(weights);
        return v;
    }

    static VelocitySpace full(int dim) { return VelocitySpace(dim, Kind::Full); }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool bounded() const { return kind_ != Kind::Full; }
    const Mat& atoms() const { return atoms_; }
    const Vec& weights() const { return weights_; }
    double ball_radius() const { return radius_; }
    const Vec& box_lo() const { return lo_; }
    const Vec& box_hi() const { return hi_; }

    bool contains(const Vec& v, double tol = 1e-12) const {
        if (v.size() != dim_) return false;
        switch (kind_) {
            case Kind::Ball:
                return v.norm() <= radius_ + tol;
            case Kind::Box:
                return (v.array() >= lo_.array() - tol).all() && (v.array() <= hi_.array() + tol).all();
            case Kind::Discrete:
                for (Eigen::Index i = 0; i < atoms_.rows(); ++i)
                    if ((v - atoms_.row(i).transpose()).norm() <= tol) return true;
                return false;
            case Kind::Full:
                return true;
        }
        std::abort();
    }

    /// Lebesgue volume of V (continuous kinds only).
    double volume() const {
        switch (kind_) {
            case Kind::Ball:
                if (dim_ == 1) return 2.0 * radius_;
                if (dim_ == 2) return std::numbers::pi * radius_ * radius_;
                throw DomainError("ball volume implemented for d <= 2");
            case Kind::Box:
                return (hi_ - lo_).prod();
            default:
                throw DomainError("volume is only defined for continuous velocity spaces");
        }
    }

    /// Measure of B(center, r) intersected with V: Lebesgue for continuous
    /// kinds (closed form in d=1, grid quadrature in d=2), weight mass for
    /// Discrete. Used to check that a kernel lower bound is sub-probability.
    double ball_overlap(const Vec& center, double r) const {
        if (center.size() != dim_ || r <= 0.0) throw DomainError("ball overlap needs matching dim and r > 0");
        switch (kind_) {
            case Kind::Discrete: {
                double m = 0.0;
                for (Eigen::Index i = 0; i < atoms_.rows(); ++i)
                    if ((atoms_.row(i).transpose() - center).norm() <= r) m += weights_[i];
                return m;
            }
            case Kind::Full:
                if (dim_ == 1) return 2.0 * r;
                if (dim_ == 2) return std::numbers::pi * r * r;
                throw DomainError("ball overlap implemented for d <= 2");
            case Kind::Ball:
            case Kind::Box: {
                if (dim_ == 1) {
                    const double a = kind_ == Kind::Ball ? -radius_ : lo_[0];
                    const double b = kind_ == Kind::Ball ? radius_ : hi_[0];
                    return std::max(0.0, std::min(b, center[0] + r) - std::max(a, center[0] - r));
                }
                // d = 2: midpoint quadrature of the intersection indicator.
                const int n = 600;
                const double h = 2.0 * r / n;
                long hits = 0;
                Vec p(2);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        p[0] = center[0] - r + (i + 0.5) * h;
                        p[1] = center[1] - r + (j + 0.5) * h;
                        if ((p - center).norm() <= r && contains(p)) ++hits;
                    }
                return double(hits) * h * h;
            }
        }
        std::abort();
    }

    /// Sample nodes for searching over v: atoms for Discrete; an inclusive
    /// tensor grid otherwise (odd per-dim counts hit 0 and the extremes).
    /// v_max bounds the search box for the Full kind.
    Mat search_nodes(int per_dim, double v_max) const {
        if (kind_ == Kind::Discrete) return atoms_;
        if (per_dim < 2) throw ConfigError("velocity search grid needs at least 2 nodes per dim");
        Vec lo(dim_), hi(dim_);
        switch (kind_) {
            case Kind::Ball:
                lo.setConstant(-radius_), hi.setConstant(radius_);
                break;
            case Kind::Box:
                lo = lo_, hi = hi_;
                break;
            case Kind::Full:
                if (v_max <= 0.0) throw ConfigError("velocity truncation radius must be > 0 for unbounded V");
                lo.setConstant(-v_max), hi.setConstant(v_max);
                break;
            default:
                std::abort();
        }
        const long total = static_cast<long>(std::pow(double(per_dim), dim_));
        Mat nodes(total, dim_);
        Vec row(dim_);
        long kept = 0;
        for (long c = 0; c < total; ++c) {
            long rem = c;
            for (int k = 0; k < dim_; ++k) {
                row[k] = lo[k] + (hi[k] - lo[k]) * double(rem % per_dim) / double(per_dim - 1);
                rem /= per_dim;
            }
            if (kind_ == Kind::Ball && row.norm() > radius_) continue;
            nodes.row(kept++) = row.transpose();
        }
        return nodes.topRows(kept);
    }

  private:
    VelocitySpace(int dim, Kind kind) : kind_(kind), dim_(dim) {
        if (dim < 1) throw ConfigError("velocity space dimension must be >= 1");
    }

    Kind kind_;
    int dim_;
    double radius_ = 0.0;
    Vec lo_, hi_;
    Mat atoms_;
    Vec weights_;
};

}  // namespace kinlab
