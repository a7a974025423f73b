#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kinlab/certificate.hpp"
#include "kinlab/control.hpp"
#include "kinlab/io.hpp"
#include "kinlab/particles.hpp"
#include "kinlab/phase_density.hpp"
#include "kinlab/problem.hpp"
#include "kinlab/solver.hpp"

namespace kinlab {

// JSON run configuration. Parsing is strict: every key is checked against the
// schema and unknown or ill-typed entries fail with the full field path, so a
// typo can never silently fall back to a default.

namespace cfgdetail {

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
    throw ConfigError("config field '" + path + "': " + msg);
}

inline std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline const ordered_json& need(const ordered_json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) fail(join(path, key), "missing");
    return j.at(key);
}

inline void check_keys(const ordered_json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path, "must be an object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (item.key() == a) ok = true;
        if (!ok) fail(join(path, item.key()), "unknown key");
    }
}

inline double as_double(const ordered_json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "must be a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
}

inline double get_double(const ordered_json& j, const std::string& path, const std::string& key) {
    return as_double(need(j, path, key), join(path, key));
}

inline double get_double_or(const ordered_json& j, const std::string& path, const std::string& key, double dflt) {
    return j.contains(key) ? as_double(j.at(key), join(path, key)) : dflt;
}

inline long get_long(const ordered_json& j, const std::string& path, const std::string& key) {
    const auto& v = need(j, path, key);
    if (!v.is_number_integer()) fail(join(path, key), "must be an integer");
    return v.get<long>();
}

inline long get_long_or(const ordered_json& j, const std::string& path, const std::string& key, long dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number_integer()) fail(join(path, key), "must be an integer");
    return j.at(key).get<long>();
}

inline int get_int_or(const ordered_json& j, const std::string& path, const std::string& key, int dflt) {
    return int(get_long_or(j, path, key, dflt));
}

inline bool get_bool_or(const ordered_json& j, const std::string& path, const std::string& key, bool dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_boolean()) fail(join(path, key), "must be a boolean");
    return j.at(key).get<bool>();
}

inline std::string get_string(const ordered_json& j, const std::string& path, const std::string& key) {
    const auto& v = need(j, path, key);
    if (!v.is_string()) fail(join(path, key), "must be a string");
    return v.get<std::string>();
}

inline std::string get_string_or(const ordered_json& j, const std::string& path, const std::string& key,
                                 const std::string& dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_string()) fail(join(path, key), "must be a string");
    return j.at(key).get<std::string>();
}

inline Vec as_vec(const ordered_json& j, const std::string& path) {
    if (j.is_number()) {
        Vec v(1);
        v[0] = as_double(j, path);
        return v;
    }
    if (!j.is_array() || j.empty()) fail(path, "must be a nonempty array of numbers");
    Vec v(long(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v[long(i)] = as_double(j[i], path + "[" + std::to_string(i) + "]");
    return v;
}

inline Vec get_vec(const ordered_json& j, const std::string& path, const std::string& key) {
    return as_vec(need(j, path, key), join(path, key));
}

inline Vec get_vec_dim(const ordered_json& j, const std::string& path, const std::string& key, int d) {
    Vec v = get_vec(j, path, key);
    if (v.size() != d) fail(join(path, key), "expected " + std::to_string(d) + " entries");
    return v;
}

/// Rows-of-points matrix: an array of length-d arrays, or (d = 1) a flat
/// array of numbers.
inline Mat get_mat(const ordered_json& j, const std::string& path, const std::string& key, int d) {
    const auto& v = need(j, path, key);
    const std::string p = join(path, key);
    if (!v.is_array() || v.empty()) fail(p, "must be a nonempty array");
    const bool nested = v[0].is_array();
    Mat m(long(v.size()), d);
    for (size_t i = 0; i < v.size(); ++i) {
        const std::string pi = p + "[" + std::to_string(i) + "]";
        if (nested) {
            const Vec row = as_vec(v[i], pi);
            if (row.size() != d) fail(pi, "expected " + std::to_string(d) + " entries");
            m.row(long(i)) = row.transpose();
        } else {
            if (d != 1) fail(pi, "expected an array of points");
            m(long(i), 0) = as_double(v[i], pi);
        }
    }
    return m;
}

inline std::vector<double> get_times(const ordered_json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) return {};
    const Vec v = get_vec(j, path, key);
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace cfgdetail

/// Initial datum for grid and particle runs.
struct InitialSpec {
    enum class Kind { Equilibrium, CellDelta, VelocityImbalance, CosineX, Point };
    Kind kind = Kind::Equilibrium;
    Vec x;          // cell_delta, point
    Vec v;          // cell_delta (nearest node), point (exact)
    Vec weights;    // velocity_imbalance, one weight per velocity node
    double amplitude = 0.0;  // cosine_x
};

struct GccConfig {
    double T = 1.0;
    std::vector<double> T_list;  // for the spectral constants; defaults to {T}
    GccGrid grid;
    bool samples_csv = false;
};

struct SolveConfig {
    bool present = false;
    int n_x = 64;
    int n_v = 16;
    double dt = 0.0;
    double t_end = 1.0;
    double v_trunc = 0.0;
    std::vector<double> snapshot_times;
    InitialSpec initial;
    bool save_densities = false;
};

struct McConfig {
    bool present = false;
    long n_particles = 10000;
    double t_end = 1.0;
    std::vector<double> snapshot_times;
    InitialSpec initial;
    bool csv = true;
};

struct FitConfig {
    bool present = false;
    std::string series;  // CSV path, resolved against the output directory
    std::string t_col = "t";
    std::string y_col = "tv";
    bool has_window = false;
    double lo = 0.0, hi = 0.0;
};

struct ReportConfig {
    double minorization_slack = 0.5;
    double envelope_eps = 1e-9;
    bool has_fit_window = false;
    double fit_lo = 0.0, fit_hi = 0.0;
};

struct RunConfig {
    int d = 1;
    uint64_t seed = 0;
    int workers = 1;
    SigmaField sigma = SigmaField::constant(1, 1.0);
    Potential potential = Potential::zero(1);
    VelocitySpace vspace = VelocitySpace::ball(1, 1.0);
    std::optional<RegimeSpec> regime;
    std::string cert_variant = "default";  // default | lemma | theorem
    GccConfig gcc;
    SolveConfig solve;
    McConfig mc;
    FitConfig fit;
    ReportConfig report;

    ScatterProblem problem() const {
        if (!regime) throw ConfigError("config field 'regime': missing (required for certificates)");
        return ScatterProblem(sigma, potential, vspace, *regime);
    }

    AlphaVariant variant() const {
        if (cert_variant == "lemma") return AlphaVariant::LemmaForm;
        if (cert_variant == "theorem") return AlphaVariant::TheoremForm;
        if (!regime) throw ConfigError("config field 'regime': missing (required for certificates)");
        return default_variant(regime->regime);
    }
};

namespace cfgdetail {

inline SigmaField parse_sigma(const ordered_json& j, int d) {
    check_keys(j, "sigma", {"kind", "value", "centers", "radii", "heights", "lo", "hi", "width"});
    const std::string kind = get_string(j, "sigma", "kind");
    if (kind == "constant") {
        check_keys(j, "sigma", {"kind", "value"});
        return SigmaField::constant(d, get_double(j, "sigma", "value"));
    }
    if (kind == "bumps") {
        check_keys(j, "sigma", {"kind", "centers", "radii", "heights"});
        return SigmaField::bumps(d, get_mat(j, "sigma", "centers", d), get_vec(j, "sigma", "radii"),
                                 get_vec(j, "sigma", "heights"));
    }
    if (kind == "mollified_box") {
        check_keys(j, "sigma", {"kind", "lo", "hi", "width"});
        return SigmaField::mollified_box(d, get_vec_dim(j, "sigma", "lo", d), get_vec_dim(j, "sigma", "hi", d),
                                         get_double(j, "sigma", "width"));
    }
    fail("sigma.kind", "expected constant, bumps or mollified_box");
}

inline Potential parse_potential(const ordered_json& j, int d) {
    check_keys(j, "potential", {"kind", "terms"});
    const std::string kind = get_string(j, "potential", "kind");
    if (kind == "zero") {
        check_keys(j, "potential", {"kind"});
        return Potential::zero(d);
    }
    if (kind == "cosine_sum") {
        const auto& terms = need(j, "potential", "terms");
        if (!terms.is_array() || terms.empty()) fail("potential.terms", "must be a nonempty array");
        std::vector<CosineTerm> out;
        for (size_t i = 0; i < terms.size(); ++i) {
            const std::string p = "potential.terms[" + std::to_string(i) + "]";
            check_keys(terms[i], p, {"a", "k", "phi"});
            CosineTerm t;
            t.amplitude = get_double(terms[i], p, "a");
            const Vec k = get_vec_dim(terms[i], p, "k", d);
            t.wave = Eigen::VectorXi(d);
            for (int c = 0; c < d; ++c) {
                const double r = std::round(k[c]);
                if (std::abs(k[c] - r) > 0.0) fail(p + ".k", "wave numbers must be integers");
                t.wave[c] = int(r);
            }
            t.phase = get_double_or(terms[i], p, "phi", 0.0);
            out.push_back(std::move(t));
        }
        return Potential::cosine_sum(d, std::move(out));
    }
    fail("potential.kind", "expected zero or cosine_sum");
}

inline VelocitySpace parse_vspace(const ordered_json& j, int d) {
    check_keys(j, "velocity_space", {"kind", "radius", "lo", "hi", "atoms", "weights"});
    const std::string kind = get_string(j, "velocity_space", "kind");
    if (kind == "ball") {
        check_keys(j, "velocity_space", {"kind", "radius"});
        return VelocitySpace::ball(d, get_double(j, "velocity_space", "radius"));
    }
    if (kind == "box") {
        check_keys(j, "velocity_space", {"kind", "lo", "hi"});
        return VelocitySpace::box(get_vec_dim(j, "velocity_space", "lo", d),
                                  get_vec_dim(j, "velocity_space", "hi", d));
    }
    if (kind == "discrete") {
        check_keys(j, "velocity_space", {"kind", "atoms", "weights"});
        return VelocitySpace::discrete(get_mat(j, "velocity_space", "atoms", d),
                                       get_vec(j, "velocity_space", "weights"));
    }
    if (kind == "full") {
        check_keys(j, "velocity_space", {"kind"});
        return VelocitySpace::full(d);
    }
    fail("velocity_space.kind", "expected ball, box, discrete or full");
}

inline RegimeSpec parse_regime(const ordered_json& j, int d) {
    check_keys(j, "regime", {"kind", "gamma", "v0", "r0", "c"});
    const std::string kind = get_string(j, "regime", "kind");
    if (kind == "flat") {
        check_keys(j, "regime", {"kind", "gamma", "v0", "r0"});
        return RegimeSpec::r1(get_double(j, "regime", "gamma"), get_vec_dim(j, "regime", "v0", d),
                              get_double(j, "regime", "r0"));
    }
    if (kind == "radial") {
        check_keys(j, "regime", {"kind", "c"});
        return RegimeSpec::r2(MaxwellianProfile{d, get_double_or(j, "regime", "c", 1.0)});
    }
    fail("regime.kind", "expected flat or radial");
}

inline GccConfig parse_gcc(const ordered_json& j) {
    check_keys(j, "gcc",
               {"T", "T_list", "n_x", "n_v", "n_quad", "v_max", "threshold", "refine_passes", "refine_iters",
                "samples_csv"});
    GccConfig g;
    g.T = get_double_or(j, "gcc", "T", 1.0);
    if (g.T <= 0.0) fail("gcc.T", "must be positive");
    if (j.contains("T_list")) {
        const Vec tl = get_vec(j, "gcc", "T_list");
        g.T_list.assign(tl.data(), tl.data() + tl.size());
        for (size_t i = 0; i < g.T_list.size(); ++i) {
            if (g.T_list[i] <= 0.0) fail("gcc.T_list", "horizons must be positive");
            if (i && g.T_list[i] <= g.T_list[i - 1]) fail("gcc.T_list", "horizons must be strictly increasing");
        }
    } else {
        g.T_list = {g.T};
    }
    g.grid.n_x = get_int_or(j, "gcc", "n_x", g.grid.n_x);
    g.grid.n_v = get_int_or(j, "gcc", "n_v", g.grid.n_v);
    g.grid.n_quad = get_int_or(j, "gcc", "n_quad", g.grid.n_quad);
    g.grid.v_max = get_double_or(j, "gcc", "v_max", g.grid.v_max);
    g.grid.threshold = get_double_or(j, "gcc", "threshold", g.grid.threshold);
    g.grid.refine_passes = get_int_or(j, "gcc", "refine_passes", g.grid.refine_passes);
    g.grid.refine_iters = get_int_or(j, "gcc", "refine_iters", g.grid.refine_iters);
    g.samples_csv = get_bool_or(j, "gcc", "samples_csv", false);
    return g;
}

inline InitialSpec parse_initial(const ordered_json& j, const std::string& path, int d, bool grid_run) {
    check_keys(j, path, {"kind", "x", "v", "weights", "amplitude"});
    const std::string kind = get_string(j, path, "kind");
    InitialSpec s;
    if (kind == "equilibrium") {
        check_keys(j, path, {"kind"});
        s.kind = InitialSpec::Kind::Equilibrium;
        return s;
    }
    if (kind == "cell_delta" && grid_run) {
        check_keys(j, path, {"kind", "x", "v"});
        s.kind = InitialSpec::Kind::CellDelta;
        s.x = get_vec_dim(j, path, "x", d);
        s.v = get_vec_dim(j, path, "v", d);
        return s;
    }
    if (kind == "velocity_imbalance" && grid_run) {
        check_keys(j, path, {"kind", "weights"});
        s.kind = InitialSpec::Kind::VelocityImbalance;
        s.weights = get_vec(j, path, "weights");
        if (s.weights.minCoeff() < 0.0 || s.weights.sum() <= 0.0)
            fail(path + ".weights", "must be nonnegative with positive sum");
        return s;
    }
    if (kind == "cosine_x" && grid_run) {
        check_keys(j, path, {"kind", "amplitude"});
        s.kind = InitialSpec::Kind::CosineX;
        s.amplitude = get_double(j, path, "amplitude");
        if (std::abs(s.amplitude) >= 1.0) fail(path + ".amplitude", "must lie in (-1, 1)");
        return s;
    }
    if (kind == "point" && !grid_run) {
        check_keys(j, path, {"kind", "x", "v"});
        s.kind = InitialSpec::Kind::Point;
        s.x = get_vec_dim(j, path, "x", d);
        s.v = get_vec_dim(j, path, "v", d);
        return s;
    }
    fail(path + ".kind", grid_run ? "expected equilibrium, cell_delta, velocity_imbalance or cosine_x"
                                  : "expected equilibrium or point");
}

inline void check_snapshots(const std::vector<double>& ts, const std::string& path, double t_end) {
    for (size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < 0.0 || ts[i] > t_end + 1e-12) fail(path, "snapshot times must lie in [0, t_end]");
        if (i && ts[i] <= ts[i - 1]) fail(path, "snapshot times must be strictly increasing");
    }
}

inline SolveConfig parse_solve(const ordered_json& j, int d) {
    check_keys(j, "solve", {"n_x", "n_v", "dt", "t_end", "v_trunc", "snapshot_times", "initial", "save_densities"});
    SolveConfig s;
    s.present = true;
    s.n_x = int(get_long(j, "solve", "n_x"));
    s.n_v = int(get_long(j, "solve", "n_v"));
    s.dt = get_double(j, "solve", "dt");
    s.t_end = get_double(j, "solve", "t_end");
    if (s.t_end < 0.0) fail("solve.t_end", "must be nonnegative");
    s.v_trunc = get_double_or(j, "solve", "v_trunc", 0.0);
    s.snapshot_times = get_times(j, "solve", "snapshot_times");
    if (s.snapshot_times.empty()) s.snapshot_times = {s.t_end};
    check_snapshots(s.snapshot_times, "solve.snapshot_times", s.t_end);
    s.initial = j.contains("initial") ? parse_initial(j.at("initial"), "solve.initial", d, true) : InitialSpec{};
    s.save_densities = get_bool_or(j, "solve", "save_densities", false);
    return s;
}

inline McConfig parse_mc(const ordered_json& j, int d) {
    check_keys(j, "mc", {"n_particles", "t_end", "snapshot_times", "initial", "csv"});
    McConfig m;
    m.present = true;
    m.n_particles = get_long(j, "mc", "n_particles");
    if (m.n_particles < 1) fail("mc.n_particles", "must be positive");
    m.t_end = get_double(j, "mc", "t_end");
    if (m.t_end < 0.0) fail("mc.t_end", "must be nonnegative");
    m.snapshot_times = get_times(j, "mc", "snapshot_times");
    if (m.snapshot_times.empty()) m.snapshot_times = {m.t_end};
    check_snapshots(m.snapshot_times, "mc.snapshot_times", m.t_end);
    m.initial = j.contains("initial") ? parse_initial(j.at("initial"), "mc.initial", d, false) : InitialSpec{};
    m.csv = get_bool_or(j, "mc", "csv", true);
    return m;
}

inline FitConfig parse_fit(const ordered_json& j) {
    check_keys(j, "fit", {"series", "t_col", "y_col", "window"});
    FitConfig f;
    f.present = true;
    f.series = get_string(j, "fit", "series");
    f.t_col = get_string_or(j, "fit", "t_col", "t");
    f.y_col = get_string_or(j, "fit", "y_col", "tv");
    if (j.contains("window")) {
        const Vec w = get_vec(j, "fit", "window");
        if (w.size() != 2 || w[0] >= w[1]) fail("fit.window", "expected [lo, hi] with lo < hi");
        f.has_window = true;
        f.lo = w[0];
        f.hi = w[1];
    }
    return f;
}

inline ReportConfig parse_report(const ordered_json& j) {
    check_keys(j, "report", {"minorization_slack", "envelope_eps", "fit_window"});
    ReportConfig r;
    r.minorization_slack = get_double_or(j, "report", "minorization_slack", 0.5);
    if (r.minorization_slack <= 0.0 || r.minorization_slack > 1.0)
        fail("report.minorization_slack", "must lie in (0, 1]");
    r.envelope_eps = get_double_or(j, "report", "envelope_eps", 1e-9);
    if (j.contains("fit_window")) {
        const Vec w = get_vec(j, "report", "fit_window");
        if (w.size() != 2 || w[0] >= w[1]) fail("report.fit_window", "expected [lo, hi] with lo < hi");
        r.has_fit_window = true;
        r.fit_lo = w[0];
        r.fit_hi = w[1];
    }
    return r;
}

}  // namespace cfgdetail

inline RunConfig load_run_config(const ordered_json& j) {
    using namespace cfgdetail;
    check_keys(j, "",
               {"d", "seed", "workers", "velocity_space", "sigma", "potential", "regime", "cert", "gcc", "solve",
                "mc", "fit", "report"});
    RunConfig c;
    c.d = get_int_or(j, "", "d", 1);
    if (c.d < 1 || c.d > 2) fail("d", "supported dimensions are 1 and 2");
    const long seed = get_long_or(j, "", "seed", 0);
    if (seed < 0) fail("seed", "must be nonnegative");
    c.seed = uint64_t(seed);
    c.workers = get_int_or(j, "", "workers", 1);
    if (c.workers < 1) fail("workers", "must be positive");

    c.sigma = parse_sigma(need(j, "", "sigma"), c.d);
    c.potential = j.contains("potential") ? parse_potential(j.at("potential"), c.d) : Potential::zero(c.d);
    c.vspace = parse_vspace(need(j, "", "velocity_space"), c.d);
    if (j.contains("regime")) c.regime = parse_regime(j.at("regime"), c.d);
    if (j.contains("cert")) {
        check_keys(j.at("cert"), "cert", {"variant"});
        c.cert_variant = get_string_or(j.at("cert"), "cert", "variant", "default");
        if (c.cert_variant != "default" && c.cert_variant != "lemma" && c.cert_variant != "theorem")
            fail("cert.variant", "expected default, lemma or theorem");
    }
    if (j.contains("gcc")) c.gcc = parse_gcc(j.at("gcc"));
    if (j.contains("solve")) c.solve = parse_solve(j.at("solve"), c.d);
    if (j.contains("mc")) c.mc = parse_mc(j.at("mc"), c.d);
    if (j.contains("fit")) c.fit = parse_fit(j.at("fit"));
    if (j.contains("report")) c.report = parse_report(j.at("report"));
    return c;
}

inline RunConfig load_run_config_file(const std::filesystem::path& path) { return load_run_config(read_json(path)); }

// Manifest: the configuration as actually run, defaults materialized, written
// next to every artifact so outputs are reproducible from the manifest alone.

namespace cfgdetail {

inline ordered_json mat_json(const Mat& m) {
    ordered_json rows = ordered_json::array();
    for (long i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (long c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ordered_json sigma_json(const SigmaField& s) {
    ordered_json j;
    switch (s.kind()) {
        case SigmaField::Kind::Constant:
            j["kind"] = "constant";
            j["value"] = s.sup_norm();
            break;
        case SigmaField::Kind::Bumps:
            j["kind"] = "bumps";
            j["centers"] = mat_json(s.bump_centers());
            j["radii"] = json_vec(s.bump_radii());
            j["heights"] = json_vec(s.bump_heights());
            break;
        case SigmaField::Kind::MollifiedBox:
            j["kind"] = "mollified_box";
            j["lo"] = json_vec(s.box_lo());
            j["hi"] = json_vec(s.box_hi());
            j["width"] = s.box_width();
            break;
    }
    return j;
}

inline ordered_json potential_json(const Potential& w) {
    ordered_json j;
    if (w.is_zero()) {
        j["kind"] = "zero";
    } else {
        j["kind"] = "cosine_sum";
        ordered_json terms = ordered_json::array();
        for (const auto& t : w.terms()) {
            ordered_json e;
            e["a"] = t.amplitude;
            ordered_json k = ordered_json::array();
            for (int c = 0; c < t.wave.size(); ++c) k.push_back(t.wave[c]);
            e["k"] = std::move(k);
            e["phi"] = t.phase;
            terms.push_back(std::move(e));
        }
        j["terms"] = std::move(terms);
    }
    return j;
}

inline ordered_json vspace_json(const VelocitySpace& v) {
    ordered_json j;
    switch (v.kind()) {
        case VelocitySpace::Kind::Ball:
            j["kind"] = "ball";
            j["radius"] = v.ball_radius();
            break;
        case VelocitySpace::Kind::Box:
            j["kind"] = "box";
            j["lo"] = json_vec(v.box_lo());
            j["hi"] = json_vec(v.box_hi());
            break;
        case VelocitySpace::Kind::Discrete:
            j["kind"] = "discrete";
            j["atoms"] = mat_json(v.atoms());
            j["weights"] = json_vec(v.weights());
            break;
        case VelocitySpace::Kind::Full:
            j["kind"] = "full";
            break;
    }
    return j;
}

inline ordered_json regime_json(const RegimeSpec& r) {
    ordered_json j;
    if (r.regime == RegimeSpec::Regime::R1) {
        j["kind"] = "flat";
        j["gamma"] = r.gamma;
        j["v0"] = json_vec(r.v0);
        j["r0"] = r.r0;
    } else {
        j["kind"] = "radial";
        j["c"] = r.profile.c;
    }
    return j;
}

inline ordered_json initial_json(const InitialSpec& s) {
    ordered_json j;
    switch (s.kind) {
        case InitialSpec::Kind::Equilibrium:
            j["kind"] = "equilibrium";
            break;
        case InitialSpec::Kind::CellDelta:
            j["kind"] = "cell_delta";
            j["x"] = json_vec(s.x);
            j["v"] = json_vec(s.v);
            break;
        case InitialSpec::Kind::VelocityImbalance:
            j["kind"] = "velocity_imbalance";
            j["weights"] = json_vec(s.weights);
            break;
        case InitialSpec::Kind::CosineX:
            j["kind"] = "cosine_x";
            j["amplitude"] = s.amplitude;
            break;
        case InitialSpec::Kind::Point:
            j["kind"] = "point";
            j["x"] = json_vec(s.x);
            j["v"] = json_vec(s.v);
            break;
    }
    return j;
}

}  // namespace cfgdetail

inline ordered_json resolved_manifest(const RunConfig& c) {
    using namespace cfgdetail;
    // workers is deliberately absent: artifacts must not depend on it, and the
    // manifest is compared byte for byte across worker counts.
    ordered_json j;
    j["d"] = c.d;
    j["seed"] = c.seed;
    j["sigma"] = sigma_json(c.sigma);
    j["potential"] = potential_json(c.potential);
    j["velocity_space"] = vspace_json(c.vspace);
    if (c.regime) j["regime"] = regime_json(*c.regime);
    j["cert"] = {{"variant", c.cert_variant}};
    {
        ordered_json g;
        g["T"] = c.gcc.T;
        g["T_list"] = c.gcc.T_list;
        g["n_x"] = c.gcc.grid.n_x;
        g["n_v"] = c.gcc.grid.n_v;
        g["n_quad"] = c.gcc.grid.n_quad;
        g["v_max"] = c.gcc.grid.v_max;
        g["threshold"] = c.gcc.grid.threshold;
        g["refine_passes"] = c.gcc.grid.refine_passes;
        g["refine_iters"] = c.gcc.grid.refine_iters;
        g["samples_csv"] = c.gcc.samples_csv;
        j["gcc"] = std::move(g);
    }
    if (c.solve.present) {
        ordered_json s;
        s["n_x"] = c.solve.n_x;
        s["n_v"] = c.solve.n_v;
        s["dt"] = c.solve.dt;
        s["t_end"] = c.solve.t_end;
        s["v_trunc"] = c.solve.v_trunc;
        s["snapshot_times"] = c.solve.snapshot_times;
        s["initial"] = initial_json(c.solve.initial);
        s["save_densities"] = c.solve.save_densities;
        j["solve"] = std::move(s);
    }
    if (c.mc.present) {
        ordered_json m;
        m["n_particles"] = c.mc.n_particles;
        m["t_end"] = c.mc.t_end;
        m["snapshot_times"] = c.mc.snapshot_times;
        m["initial"] = initial_json(c.mc.initial);
        m["csv"] = c.mc.csv;
        j["mc"] = std::move(m);
    }
    if (c.fit.present) {
        ordered_json f;
        f["series"] = c.fit.series;
        f["t_col"] = c.fit.t_col;
        f["y_col"] = c.fit.y_col;
        if (c.fit.has_window) f["window"] = {c.fit.lo, c.fit.hi};
        j["fit"] = std::move(f);
    }
    {
        ordered_json r;
        r["minorization_slack"] = c.report.minorization_slack;
        r["envelope_eps"] = c.report.envelope_eps;
        if (c.report.has_fit_window) r["fit_window"] = {c.report.fit_lo, c.report.fit_hi};
        j["report"] = std::move(r);
    }
    return j;
}

// From config to runnable objects.

inline int nearest_velocity_node(const VelocityGrid& vg, const Vec& v) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int jn = 0; jn < vg.n(); ++jn) {
        const double dist = (vg.nodes().row(jn).transpose() - v).norm();
        if (dist < best_d) {
            best_d = dist;
            best = jn;
        }
    }
    return best;
}

inline PhaseDensity make_initial_density(const InitialSpec& s, const SpaceGrid& g, const VelocityGrid& vg,
                                         const Potential& w) {
    switch (s.kind) {
        case InitialSpec::Kind::Equilibrium:
            return equilibrium_density(g, vg, w);
        case InitialSpec::Kind::CellDelta:
            return cell_delta(g, vg, g.cell_of(s.x), nearest_velocity_node(vg, s.v));
        case InitialSpec::Kind::VelocityImbalance: {
            if (s.weights.size() != vg.n())
                throw ConfigError("velocity_imbalance weights must have one entry per velocity node");
            const Vec wts = s.weights / s.weights.sum();
            PhaseDensity f(g, vg.quad_weights());
            const PhaseDensity eq = equilibrium_density(g, vg, w);
            Vec rho = Vec::Zero(g.cells());
            for (int jn = 0; jn < vg.n(); ++jn) rho += vg.quad_weights()[jn] * eq.values.col(jn).matrix();
            for (int jn = 0; jn < vg.n(); ++jn)
                f.values.col(jn) = rho.array() * (wts[jn] / vg.quad_weights()[jn]);
            return f;
        }
        case InitialSpec::Kind::CosineX: {
            PhaseDensity f = equilibrium_density(g, vg, w);
            Vec mod(g.cells());
            for (long i = 0; i < g.cells(); ++i) mod[i] = 1.0 + s.amplitude * std::cos(two_pi * g.center(i)[0]);
            for (int jn = 0; jn < vg.n(); ++jn) f.values.col(jn) *= mod.array();
            f.values /= f.mass();
            return f;
        }
        case InitialSpec::Kind::Point:
            throw ConfigError("point initial data is for particle runs");
    }
    throw ConfigError("unhandled initial datum");
}

inline ParticleEnsemble make_initial_ensemble(const InitialSpec& s, long N, const Potential& w,
                                              const VelocitySpace& vs, uint64_t seed, int workers) {
    if (s.kind == InitialSpec::Kind::Equilibrium) return sample_equilibrium(N, w, vs, seed, workers);
    if (s.kind == InitialSpec::Kind::Point) {
        if (!vs.contains(s.v, 1e-12)) throw ConfigError("point initial velocity lies outside the velocity space");
        ParticleEnsemble e;
        e.x = Mat(N, s.x.size());
        e.v = Mat(N, s.v.size());
        for (long i = 0; i < N; ++i) {
            e.x.row(i) = s.x.unaryExpr([](double y) { return wrap1(y); }).transpose();
            e.v.row(i) = s.v.transpose();
        }
        e.jumps.assign(size_t(N), 0);
        e.seed = seed;
        e.time = 0.0;
        return e;
    }
    throw ConfigError("grid-only initial datum in a particle run");
}

}  // namespace kinlab
