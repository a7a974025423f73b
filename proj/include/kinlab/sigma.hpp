#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "kinlab/errors.hpp"
#include "kinlab/torus.hpp"

namespace kinlab {

namespace detail {

/// g(u) = exp(-1/u) on u > 0, extended by 0. All derivatives vanish at 0.
inline double smooth_g(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

/// Smooth step S: 0 on (-inf,0], 1 on [1,inf), strictly increasing between.
inline double smooth_step(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = smooth_g(u);
    const double b = smooth_g(1.0 - u);
    return a / (a + b);
}

/// Radial bump with value `height` at the centre, support radius `radius`.
inline double smooth_bump(double r, double radius, double height) {
    const double s = r / radius;
    if (s >= 1.0) return 0.0;
    return height * std::exp(1.0 - 1.0 / (1.0 - s * s));
}

}  // namespace detail

/// Spatial jump rate sigma >= 0 on the torus. Three shapes: a constant, a sum
/// of compactly supported smooth bumps, and a mollified box indicator (ramps
/// of the given width inside each edge, plateau value 1). All are C^infinity
/// and come with a certified sup bound that needs no grid search.
class SigmaField {
  public:
    enum class Kind { Constant, Bumps, MollifiedBox };

    static SigmaField constant(int dim, double value) {
        if (value < 0.0) throw ConfigError("constant jump rate must be >= 0");
        SigmaField s(dim, Kind::Constant);
        s.constant_ = value;
        s.sup_ = value;
        return s;
    }

    /// centers: one row per bump (torus coordinates); radii, heights > 0.
    static SigmaField bumps(int dim, Mat centers, Vec radii, Vec heights) {
        if (centers.cols() != dim) throw ConfigError("bump centers have wrong dimension");
        if (centers.rows() != radii.size() || centers.rows() != heights.size())
            throw ConfigError("bump centers, radii and heights must align");
        if (centers.rows() == 0) throw ConfigError("bump field needs at least one bump");
        if ((radii.array() <= 0.0).any()) throw ConfigError("bump radii must be > 0");
        if ((heights.array() <= 0.0).any()) throw ConfigError("bump heights must be > 0");
        if ((radii.array() > 0.5).any()) throw ConfigError("bump radius must be <= 1/2 on the unit torus");
        SigmaField s(dim, Kind::Bumps);
        s.centers_ = centers.unaryExpr([](double y) { return wrap1(y); });
        s.radii_ = std::move(radii);
        s.heights_ = std::move(heights);
        s.sup_ = s.heights_.sum();  // bumps may overlap; the sum always majorises
        return s;
    }

    /// Mollified indicator of the box prod_c [lo_c, hi_c] (arcs taken from lo
    /// to hi in the positive direction; lengths in (0,1)). The rate climbs
    /// from 0 to 1 over `width` inside each face.
    static SigmaField mollified_box(int dim, Vec lo, Vec hi, double width) {
        if (lo.size() != dim || hi.size() != dim) throw ConfigError("box bounds have wrong dimension");
        if (width <= 0.0) throw ConfigError("mollifier width must be > 0");
        SigmaField s(dim, Kind::MollifiedBox);
        s.lo_ = wrap(std::move(lo));
        s.arc_ = Vec(dim);
        for (int c = 0; c < dim; ++c) {
            double len = wrap1(hi[c] - s.lo_[c]);
            if (len <= 0.0) throw ConfigError("box arc length must be in (0,1)");
            if (len <= 2.0 * width) throw ConfigError("box arcs must be longer than twice the mollifier width");
            s.arc_[c] = len;
        }
        s.width_ = width;
        s.sup_ = 1.0;
        return s;
    }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool is_constant() const { return kind_ == Kind::Constant; }
    double constant_value() const { return constant_; }

    /// Certified sup-norm bound, exact for Constant and MollifiedBox.
    double sup_norm() const { return sup_; }

    const Mat& bump_centers() const { return centers_; }
    const Vec& bump_radii() const { return radii_; }
    const Vec& bump_heights() const { return heights_; }
    const Vec& box_lo() const { return lo_; }
    Vec box_hi() const {
        return (lo_ + arc_).unaryExpr([](double y) { return wrap1(y); });
    }
    double box_width() const { return width_; }

    double operator()(const TorusPoint& x) const { return value_wrapped(x.coords()); }

    /// Evaluate at arbitrary coordinates (wraps first).
    double value(const Vec& x) const { return value_wrapped(wrap(x)); }

  private:
    SigmaField(int dim, Kind kind) : kind_(kind), dim_(dim) {
        if (dim < 1) throw ConfigError("jump rate dimension must be >= 1");
    }

    double value_wrapped(const Vec& x) const {
        switch (kind_) {
            case Kind::Constant:
                return constant_;
            case Kind::Bumps: {
                double s = 0.0;
                for (Eigen::Index i = 0; i < centers_.rows(); ++i)
                    s += detail::smooth_bump(torus_dist(x, centers_.row(i).transpose()), radii_[i], heights_[i]);
                return s;
            }
            case Kind::MollifiedBox: {
                double s = 1.0;
                for (int c = 0; c < dim_; ++c) {
                    const double t = wrap1(x[c] - lo_[c]);
                    if (t > arc_[c]) return 0.0;
                    const double depth = std::min(t, arc_[c] - t);
                    s *= detail::smooth_step(depth / width_);
                    if (s == 0.0) return 0.0;
                }
                return s;
            }
        }
        std::abort();
    }

    Kind kind_;
    int dim_;
    double sup_ = 0.0;
    double constant_ = 0.0;
    Mat centers_;
    Vec radii_, heights_;
    Vec lo_, arc_;
    double width_ = 0.0;
};

}  // namespace kinlab
