#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace kinlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Canonical representative of y on the unit circle, in [0, 1).
inline double wrap1(double y) {
    double r = y - std::floor(y);
    if (r >= 1.0) r -= 1.0;  // floor rounding can land exactly on 1
    return r;
}

/// Componentwise canonical representative on the unit torus.
template <typename Derived>
Vec wrap(const Eigen::MatrixBase<Derived>& y) {
    Vec r(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) r[i] = wrap1(y[i]);
    return r;
}

/// Shortest signed displacement a -> b on the unit circle, in [-1/2, 1/2).
inline double circle_delta(double a, double b) {
    double d = wrap1(b - a);
    return d < 0.5 ? d : d - 1.0;
}

/// Geodesic distance on the unit circle.
inline double circle_dist(double a, double b) { return std::abs(circle_delta(a, b)); }

/// Euclidean geodesic distance on the unit torus.
template <typename DA, typename DB>
double torus_dist(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double d = circle_dist(a[i], b[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

/// A point of the unit torus; every coordinate is kept in [0, 1).
class TorusPoint {
  public:
    TorusPoint() = default;
    explicit TorusPoint(const Vec& y) : coords_(wrap(y)) {}

    const Vec& coords() const { return coords_; }
    double operator[](Eigen::Index i) const { return coords_[i]; }
    Eigen::Index dim() const { return coords_.size(); }

    /// Canonical translate by an arbitrary displacement.
    TorusPoint translated(const Vec& dy) const { return TorusPoint(coords_ + dy); }

  private:
    Vec coords_;
};

/// Phase-space point (x, v) with x on the torus.
struct PhasePoint {
    TorusPoint x;
    Vec v;

    PhasePoint() = default;
    PhasePoint(const Vec& x_, const Vec& v_) : x(x_), v(v_) {}
    PhasePoint(const TorusPoint& x_, const Vec& v_) : x(x_), v(v_) {}

    Eigen::Index dim() const { return v.size(); }
};

}  // namespace kinlab
