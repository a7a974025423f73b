#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kinlab/config.hpp"
#include "kinlab/tv.hpp"

namespace fs = std::filesystem;
using namespace kinlab;

namespace {

struct CliArgs {
    std::string config;
    std::string out = "out";
    int workers = 0;     // 0: use the config value
    long long seed = -1;  // <0: use the config value
};

void add_common(CLI::App* sub, CliArgs& a) {
    sub->add_option("--config", a.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", a.out, "output directory, created if absent");
    sub->add_option("--workers", a.workers, "worker threads, overrides the config")->check(CLI::PositiveNumber);
    sub->add_option("--seed", a.seed, "RNG seed, overrides the config")->check(CLI::NonNegativeNumber);
}

RunConfig load(const CliArgs& a) {
    RunConfig c = load_run_config_file(a.config);
    if (a.workers > 0) c.workers = a.workers;
    if (a.seed >= 0) c.seed = uint64_t(a.seed);
    c.gcc.grid.workers = c.workers;
    return c;
}

void preamble(const CliArgs& a, const RunConfig& c) {
    fs::create_directories(a.out);
    write_json(fs::path(a.out) / "manifest.json", resolved_manifest(c));
}

std::string tag(const char* stem, size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%03zu", stem, i);
    return buf;
}

void write_gcc_samples(const fs::path& path, const RunConfig& c) {
    const int d = c.d;
    const double v_max = c.vspace.bounded()
                             ? 0.0
                             : (c.gcc.grid.v_max > 0.0 ? c.gcc.grid.v_max : 4.0 * (1.0 + c.potential.grad_sup_bound()) +
                                                                                5.0 * c.potential.grad_sup_bound() * c.gcc.T);
    const Mat vnodes = c.vspace.search_nodes(c.gcc.grid.n_v, v_max);
    const long nx_total = long(std::pow(double(c.gcc.grid.n_x), d));
    const FlowConfig fcfg = default_flow_config(c.potential);

    std::vector<std::string> header;
    for (int k = 0; k < d; ++k) header.push_back("x" + std::to_string(k));
    for (int k = 0; k < d; ++k) header.push_back("v" + std::to_string(k));
    header.push_back("integral");
    CsvWriter csv(path, header);
    std::vector<double> row(size_t(2 * d) + 1);
    for (long vi = 0; vi < vnodes.rows(); ++vi) {
        for (long xi = 0; xi < nx_total; ++xi) {
            Vec x(d);
            long rem = xi;
            for (int k = 0; k < d; ++k) {
                x[k] = double(rem % c.gcc.grid.n_x) / c.gcc.grid.n_x;
                rem /= c.gcc.grid.n_x;
            }
            const PhasePoint p{TorusPoint(x), vnodes.row(vi).transpose()};
            for (int k = 0; k < d; ++k) row[size_t(k)] = x[k];
            for (int k = 0; k < d; ++k) row[size_t(d + k)] = vnodes(vi, k);
            row[size_t(2 * d)] = line_integral(c.sigma, c.potential, p, c.gcc.T, c.gcc.grid.n_quad, fcfg);
            csv.row(row);
        }
    }
}

int cmd_gcc(const CliArgs& a) {
    const RunConfig c = load(a);
    preamble(a, c);
    const GccReport rep = gcc_kappa(c.sigma, c.potential, c.vspace, c.gcc.T, c.gcc.grid);
    const auto [cm, cp] = spectral_constants(c.sigma, c.potential, c.vspace, c.gcc.T_list, c.gcc.grid);
    ordered_json j = gcc_report_json(rep);
    j["T_list"] = c.gcc.T_list;
    j["C_minus"] = cm;
    j["C_plus"] = cp;
    write_json(fs::path(a.out) / "gcc.json", j);
    if (c.gcc.samples_csv) write_gcc_samples(fs::path(a.out) / "gcc_samples.csv", c);
    std::cout << (rep.satisfied ? "control satisfied" : "control not satisfied")
              << ": kappa_hat = " << fmt_double(rep.kappa_hat) << " at threshold " << fmt_double(rep.threshold)
              << "\n";
    return rep.satisfied ? 0 : 3;
}

int cmd_cert(const CliArgs& a) {
    const RunConfig c = load(a);
    preamble(a, c);
    const ScatterProblem prob = c.problem();
    const GccReport rep = gcc_kappa(c.sigma, c.potential, c.vspace, c.gcc.T, c.gcc.grid);
    write_json(fs::path(a.out) / "gcc.json", gcc_report_json(rep));
    const RateCertificate cert = build_certificate(prob, rep, c.variant(), c.gcc.grid, c.gcc.T_list);
    write_json(fs::path(a.out) / "certificate.json", certificate_json(cert));
    std::cout << "alpha = " << fmt_double(cert.alpha) << " (" << variant_name(cert.variant) << "), t_star = "
              << fmt_double(cert.t_star) << ", lambda = " << fmt_double(cert.lambda) << "\n";
    return 0;
}

struct SolveArtifacts {
    std::vector<double> times;
    std::vector<double> tvs;
    double tv0 = 0.0;
};

SolveArtifacts run_solve(const CliArgs& a, const RunConfig& c) {
    if (!c.solve.present) throw ConfigError("config needs a 'solve' block");
    const SpaceGrid g{c.d, c.solve.n_x};
    const VelocityGrid vg = VelocityGrid::for_space(c.vspace, c.solve.n_v, c.solve.v_trunc);
    const GridSolver solver(g, vg, c.sigma, c.potential, c.solve.dt, c.workers);
    const PhaseDensity f0 = make_initial_density(c.solve.initial, g, vg, c.potential);
    const PhaseDensity eq = equilibrium_density(g, vg, c.potential);

    std::vector<double> snaps = c.solve.snapshot_times;
    if (snaps.empty() || snaps.front() > 0.0) snaps.insert(snaps.begin(), 0.0);
    const GridSolver::RunResult res = solver.run(f0, c.solve.t_end, snaps);

    SolveArtifacts art;
    CsvWriter csv(fs::path(a.out) / "series.csv", {"t", "tv", "mass", "min_value"});
    for (size_t i = 0; i < res.snapshots.size(); ++i) {
        const PhaseDensity& f = res.snapshots[i];
        const double tv = tv_grid(f, eq);
        csv.row({f.time, tv, res.mass[i], res.min_value[i]});
        art.times.push_back(f.time);
        art.tvs.push_back(tv);
        if (c.solve.save_densities) save_density(fs::path(a.out) / tag("snapshot", i), f);
    }
    art.tv0 = art.tvs.front();

    double mass_drift = 0.0;
    for (double m : res.mass) mass_drift = std::max(mass_drift, std::abs(m - res.mass.front()));
    ordered_json j;
    j["t_end"] = c.solve.t_end;
    j["dt"] = c.solve.dt;
    j["cells"] = g.cells();
    j["velocity_nodes"] = vg.n();
    j["tv_initial"] = art.tv0;
    j["tv_final"] = art.tvs.back();
    j["mass_drift"] = mass_drift;
    j["min_value_final"] = res.min_value.back();
    write_json(fs::path(a.out) / "solve.json", j);
    return art;
}

int cmd_solve(const CliArgs& a) {
    const RunConfig c = load(a);
    preamble(a, c);
    const SolveArtifacts art = run_solve(a, c);
    std::cout << "tv " << fmt_double(art.tv0) << " -> " << fmt_double(art.tvs.back()) << " over t = ["
              << fmt_double(art.times.front()) << ", " << fmt_double(art.times.back()) << "]\n";
    return 0;
}

int cmd_mc(const CliArgs& a) {
    const RunConfig c = load(a);
    preamble(a, c);
    if (!c.mc.present) throw ConfigError("config needs an 'mc' block");
    const ParticleEnsemble start =
        make_initial_ensemble(c.mc.initial, c.mc.n_particles, c.potential, c.vspace, c.seed, c.workers);
    SimConfig scfg;
    scfg.flow = default_flow_config(c.potential);
    scfg.workers = c.workers;
    const std::vector<ParticleEnsemble> snaps =
        simulate(start, c.sigma, c.potential, c.vspace, c.mc.t_end, c.mc.snapshot_times, scfg);

    ordered_json stats = ordered_json::array();
    for (size_t s = 0; s < snaps.size(); ++s) {
        const ParticleEnsemble& e = snaps[s];
        double mean = 0.0, zero = 0.0;
        for (long i = 0; i < e.n(); ++i) {
            mean += double(e.jumps[size_t(i)]);
            if (e.jumps[size_t(i)] == 0) zero += 1.0;
        }
        mean /= double(e.n());
        zero /= double(e.n());
        stats.push_back({{"t", e.time}, {"mean_jumps", mean}, {"zero_jump_fraction", zero}});
        if (c.mc.csv) save_ensemble_csv(fs::path(a.out) / (tag("ensemble", s) + ".csv"), e);
    }
    ordered_json j;
    j["n_particles"] = c.mc.n_particles;
    j["seed"] = c.seed;
    j["t_end"] = c.mc.t_end;
    j["snapshots"] = std::move(stats);
    write_json(fs::path(a.out) / "mc.json", j);
    std::cout << "simulated " << c.mc.n_particles << " particles to t = " << fmt_double(c.mc.t_end) << "\n";
    return 0;
}

ordered_json fit_json(const DecayCurve& dc) {
    ordered_json j;
    j["lambda_hat"] = dc.fitted_lambda;
    j["window"] = {dc.window_lo, dc.window_hi};
    j["residual_rms"] = dc.residual;
    return j;
}

int cmd_fit(const CliArgs& a) {
    const RunConfig c = load(a);
    preamble(a, c);
    if (!c.fit.present) throw ConfigError("config needs a 'fit' block");
    fs::path series = c.fit.series;
    if (series.is_relative()) series = fs::path(a.out) / series;
    const auto [t, y] = read_series_csv(series, c.fit.t_col, c.fit.y_col);
    if (t.empty()) throw DomainError("series file has no rows");
    const double lo = c.fit.has_window ? c.fit.lo : t.front();
    const double hi = c.fit.has_window ? c.fit.hi : t.back();
    const DecayCurve dc = fit_decay(t, y, lo, hi);
    write_json(fs::path(a.out) / "fit.json", fit_json(dc));
    std::cout << "lambda_hat = " << fmt_double(dc.fitted_lambda) << " over [" << fmt_double(lo) << ", "
              << fmt_double(hi) << "], residual rms " << fmt_double(dc.residual) << "\n";
    return 0;
}

int cmd_report(const CliArgs& a) {
    const RunConfig c = load(a);
    preamble(a, c);
    const ScatterProblem prob = c.problem();
    const GccReport rep = gcc_kappa(c.sigma, c.potential, c.vspace, c.gcc.T, c.gcc.grid);
    write_json(fs::path(a.out) / "gcc.json", gcc_report_json(rep));
    const RateCertificate cert = build_certificate(prob, rep, c.variant(), c.gcc.grid, c.gcc.T_list);
    write_json(fs::path(a.out) / "certificate.json", certificate_json(cert));

    const SolveArtifacts art = run_solve(a, c);
    const EnvelopeCheck env =
        envelope_check(art.times, art.tvs, cert.lambda, cert.t_star, art.tv0, c.report.envelope_eps);

    const double fit_lo = c.report.has_fit_window ? c.report.fit_lo : cert.t_star;
    const double fit_hi = c.report.has_fit_window ? c.report.fit_hi : c.solve.t_end;
    const DecayCurve dc = fit_decay(art.times, art.tvs, fit_lo, fit_hi);

    // Doeblin minorization, checked on the worst starting point the control
    // search found: a delta there must dominate slack * alpha times the
    // equilibrium after one full cycle.
    const SpaceGrid g{c.d, c.solve.n_x};
    const VelocityGrid vg = VelocityGrid::for_space(c.vspace, c.solve.n_v, c.solve.v_trunc);
    const GridSolver solver(g, vg, c.sigma, c.potential, c.solve.dt, c.workers);
    const PhaseDensity delta =
        cell_delta(g, vg, g.cell_of(rep.argmin.x.coords()), nearest_velocity_node(vg, rep.argmin.v));
    const GridSolver::RunResult mres = solver.run(delta, cert.t_star, {cert.t_star});
    const double ratio = solver.minorization_ratio(mres.snapshots.back());
    const double threshold = c.report.minorization_slack * cert.alpha;
    const bool minor_pass = ratio >= threshold;

    ordered_json j;
    j["certificate"] = certificate_json(cert);
    j["envelope"] = {{"pass", env.pass}, {"worst_margin", env.worst_margin}, {"worst_time", env.worst_time},
                     {"eps", c.report.envelope_eps}};
    j["fit"] = fit_json(dc);
    j["minorization"] = {{"ratio", ratio}, {"alpha", cert.alpha}, {"slack", c.report.minorization_slack},
                         {"threshold", threshold}, {"pass", minor_pass}};
    const bool pass = env.pass && minor_pass;
    j["pass"] = pass;
    write_json(fs::path(a.out) / "report.json", j);

    std::cout << "lambda = " << fmt_double(cert.lambda) << ", fitted " << fmt_double(dc.fitted_lambda)
              << "; envelope " << (env.pass ? "holds" : "violated") << ", minorization ratio "
              << fmt_double(ratio) << " vs " << fmt_double(threshold) << " -> " << (pass ? "pass" : "fail")
              << "\n";
    return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kinetic relaxation laboratory: control integrals, convergence certificates, grid and particle runs"};
    app.require_subcommand(1);
    CliArgs a;
    CLI::App* sub_gcc = app.add_subcommand("gcc", "evaluate the control integral floor over phase space");
    CLI::App* sub_cert = app.add_subcommand("cert", "build a convergence rate certificate");
    CLI::App* sub_solve = app.add_subcommand("solve", "run the deterministic grid solver");
    CLI::App* sub_mc = app.add_subcommand("mc", "run the jump process particle simulation");
    CLI::App* sub_fit = app.add_subcommand("fit", "fit an exponential decay rate to a series");
    CLI::App* sub_report = app.add_subcommand("report", "certificate plus empirical verification in one run");
    for (CLI::App* s : {sub_gcc, sub_cert, sub_solve, sub_mc, sub_fit, sub_report}) add_common(s, a);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sub_gcc->parsed()) return cmd_gcc(a);
        if (sub_cert->parsed()) return cmd_cert(a);
        if (sub_solve->parsed()) return cmd_solve(a);
        if (sub_mc->parsed()) return cmd_mc(a);
        if (sub_fit->parsed()) return cmd_fit(a);
        if (sub_report->parsed()) return cmd_report(a);
    } catch (const ControlNotSatisfied& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
