#pragma once

#include <cmath>
#include <utility>

#include "kinlab/errors.hpp"
#include "kinlab/torus.hpp"
#include "kinlab/velocity_space.hpp"

namespace kinlab {

/// Velocity discretization for the grid solver: either the atoms of a
/// discrete velocity space, or uniform cells on a symmetric 1-D interval.
/// Quadrature weights q sum to 1; the equilibrium velocity law is stored as
/// a density m against q with sum(q*m) = 1, so densities relative to q make
/// the relaxation step exactly solvable.
class VelocityGrid {
  public:
    enum class Kind { Discrete, UniformBall1D };
    enum class Profile { Uniform, Maxwellian };

    static VelocityGrid discrete(Mat atoms, Vec weights) {
        if (atoms.rows() < 1 || atoms.rows() != weights.size())
            throw ConfigError("velocity grid atoms and weights must align");
        if ((weights.array() <= 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-12)
            throw ConfigError("velocity weights must be positive and sum to 1");
        VelocityGrid g;
        g.kind_ = Kind::Discrete;
        g.dim_ = int(atoms.cols());
        g.nodes_ = std::move(atoms);
        g.q_ = std::move(weights);
        g.q_ /= g.q_.sum();
        g.m_ = Vec::Ones(g.q_.size());
        return g;
    }

    static VelocityGrid uniform_ball_1d(double v_max, int n_v, Profile profile = Profile::Uniform) {
        if (v_max <= 0.0 || n_v < 1) throw ConfigError("velocity interval needs v_max > 0 and n_v >= 1");
        VelocityGrid g;
        g.kind_ = Kind::UniformBall1D;
        g.dim_ = 1;
        g.v_max_ = v_max;
        g.nodes_ = Mat(n_v, 1);
        const double dv = 2.0 * v_max / n_v;
        for (int j = 0; j < n_v; ++j) g.nodes_(j, 0) = -v_max + (j + 0.5) * dv;
        g.q_ = Vec::Constant(n_v, 1.0 / n_v);
        if (profile == Profile::Uniform) {
            g.m_ = Vec::Ones(n_v);
        } else {
            g.m_ = (-0.5 * g.nodes_.col(0).array().square()).exp();
            g.m_ /= g.q_.dot(g.m_);  // renormalize the truncated Maxwellian on the grid
        }
        return g;
    }

    /// Grid matching a velocity space: atoms for Discrete, uniform cells on
    /// the interval for a 1-D ball (profile Uniform), and uniform cells on a
    /// truncation of the line with Maxwellian weights for the full space.
    static VelocityGrid for_space(const VelocitySpace& vs, int n_v, double v_trunc = 0.0) {
        switch (vs.kind()) {
            case VelocitySpace::Kind::Discrete:
                return discrete(vs.atoms(), vs.weights());
            case VelocitySpace::Kind::Ball:
                if (vs.dim() != 1) throw ConfigError("grid solver covers 1-D velocity balls only");
                return uniform_ball_1d(vs.ball_radius(), n_v);
            case VelocitySpace::Kind::Full:
                if (vs.dim() != 1) throw ConfigError("grid solver covers the 1-D full space only");
                if (v_trunc <= 0.0) throw ConfigError("full velocity space needs a truncation radius");
                return uniform_ball_1d(v_trunc, n_v, Profile::Maxwellian);
            case VelocitySpace::Kind::Box:
                if (vs.dim() != 1) throw ConfigError("grid solver covers 1-D velocity boxes only");
                if (std::abs(vs.box_hi()[0] + vs.box_lo()[0]) > 1e-12)
                    throw ConfigError("1-D velocity boxes must be symmetric for the solver grid");
                return uniform_ball_1d(vs.box_hi()[0], n_v);
        }
        std::abort();
    }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    int n() const { return int(nodes_.rows()); }
    const Mat& nodes() const { return nodes_; }
    double node_speed_max() const { return nodes_.rowwise().norm().maxCoeff(); }
    const Vec& quad_weights() const { return q_; }
    const Vec& equilibrium_density() const { return m_; }
    double ball_v_max() const { return v_max_; }

  private:
    VelocityGrid() = default;

    Kind kind_ = Kind::Discrete;
    int dim_ = 1;
    double v_max_ = 0.0;
    Mat nodes_;
    Vec q_, m_;
};

}  // namespace kinlab
