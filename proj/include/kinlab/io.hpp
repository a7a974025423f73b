#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kinlab/certificate.hpp"
#include "kinlab/control.hpp"
#include "kinlab/errors.hpp"
#include "kinlab/particles.hpp"
#include "kinlab/phase_density.hpp"

namespace kinlab {

using ordered_json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of x; reparsing yields the same bits,
/// and the formatting never depends on locale or stream state.
inline std::string fmt_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw ConfigError("write failed: " + path.string());
}

inline void write_json(const std::filesystem::path& path, const ordered_json& j) {
    write_text(path, j.dump(2) + "\n");
}

inline ordered_json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open: " + path.string());
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("JSON parse error in " + path.string() + ": " + e.what());
    }
}

inline ordered_json json_vec(const Vec& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

/// Snapshot file pair: raw little-endian float64 values (velocity-major,
/// cells contiguous per velocity node) plus a JSON sidecar with the grid
/// metadata.
inline void save_density(const std::filesystem::path& base, const PhaseDensity& f) {
    static_assert(std::endian::native == std::endian::little, "grid files are little endian");
    std::ofstream out(base.string() + ".f64", std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + base.string() + ".f64");
    out.write(reinterpret_cast<const char*>(f.values.data()),
              std::streamsize(sizeof(double)) * f.values.size());
    if (!out) throw ConfigError("write failed: " + base.string() + ".f64");

    ordered_json side;
    side["format"] = "float64-le";
    side["layout"] = "cells-fastest";
    side["d"] = f.xgrid.d;
    side["n_per_dim"] = f.xgrid.n_per_dim;
    side["n_v"] = f.n_v();
    side["quad_weights"] = json_vec(f.q);
    side["time"] = f.time;
    side["mass"] = f.mass();
    write_json(base.string() + ".json", side);
}

inline ordered_json gcc_report_json(const GccReport& r) {
    ordered_json j;
    j["T"] = r.T;
    j["kappa_hat"] = r.kappa_hat;
    j["argmin"] = {{"x", json_vec(r.argmin.x.coords())}, {"v", json_vec(r.argmin.v)}};
    j["satisfied"] = r.satisfied;
    j["threshold"] = r.threshold;
    j["samples"] = {{"n_x", r.n_x}, {"n_v_nodes", r.n_v_nodes}, {"n_quad", r.n_quad}};
    j["v_truncation"] = r.v_truncation;
    j["equidistribution"] = r.equidistribution;
    return j;
}

inline const char* variant_name(AlphaVariant v) {
    return v == AlphaVariant::TheoremForm ? "theorem" : "lemma";
}

inline ordered_json certificate_json(const RateCertificate& c) {
    ordered_json j;
    j["regime"] = c.regime == RegimeSpec::Regime::R1 ? "flat" : "radial";
    j["variant"] = variant_name(c.variant);
    j["T"] = c.T;
    j["kappa"] = c.kappa;
    j["T_star"] = c.T_star;
    j["T_star_stated"] = c.T_star_stated;
    j["beta"] = c.beta;
    j["beta_alt_exponent"] = c.beta_alt;
    j["t_star"] = c.t_star;
    j["gamma"] = c.gamma;
    j["alpha"] = c.alpha;
    j["alpha_lemma"] = c.alpha_lemma;
    j["alpha_theorem"] = c.alpha_theorem;
    j["lambda"] = c.lambda;
    j["sigma_sup"] = c.sigma_sup;
    j["C_minus"] = c.C_minus;
    j["C_plus"] = c.C_plus;
    j["upper_bound_consistent"] = c.upper_bound_consistent;
    return j;
}

inline RateCertificate certificate_from_json(const ordered_json& j) {
    RateCertificate c;
    c.regime = j.at("regime").get<std::string>() == "flat" ? RegimeSpec::Regime::R1 : RegimeSpec::Regime::R2;
    c.variant = j.at("variant").get<std::string>() == "theorem" ? AlphaVariant::TheoremForm : AlphaVariant::LemmaForm;
    c.T = j.at("T").get<double>();
    c.kappa = j.at("kappa").get<double>();
    c.T_star = j.at("T_star").get<double>();
    c.T_star_stated = j.at("T_star_stated").get<double>();
    c.beta = j.at("beta").get<double>();
    c.beta_alt = j.at("beta_alt_exponent").get<double>();
    c.t_star = j.at("t_star").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.alpha = j.at("alpha").get<double>();
    c.alpha_lemma = j.at("alpha_lemma").get<double>();
    c.alpha_theorem = j.at("alpha_theorem").get<double>();
    c.lambda = j.at("lambda").get<double>();
    c.sigma_sup = j.at("sigma_sup").get<double>();
    c.C_minus = j.at("C_minus").get<double>();
    c.C_plus = j.at("C_plus").get<double>();
    c.upper_bound_consistent = j.at("upper_bound_consistent").get<bool>();
    return c;
}

/// CSV with a fixed header; all numbers in shortest round-trip form.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("cannot open for writing: " + path.string());
        for (size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }

    void row(const std::vector<double>& vals) {
        for (size_t i = 0; i < vals.size(); ++i) out_ << (i ? "," : "") << fmt_double(vals[i]);
        out_ << "\n";
    }

    void row_with_index(long idx, const std::vector<double>& vals, long extra_int = -1) {
        out_ << idx;
        for (double v : vals) out_ << "," << fmt_double(v);
        if (extra_int >= 0) out_ << "," << extra_int;
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

/// Ensemble snapshot as CSV: particle index, coordinates, velocity, jumps.
inline void save_ensemble_csv(const std::filesystem::path& path, const ParticleEnsemble& e) {
    std::vector<std::string> header{"particle"};
    for (int k = 0; k < e.dim(); ++k) header.push_back("x" + std::to_string(k));
    for (int k = 0; k < e.dim(); ++k) header.push_back("v" + std::to_string(k));
    header.push_back("jumps");
    CsvWriter csv(path, header);
    std::vector<double> vals;
    for (long i = 0; i < e.n(); ++i) {
        vals.clear();
        for (int k = 0; k < e.dim(); ++k) vals.push_back(e.x(i, k));
        for (int k = 0; k < e.dim(); ++k) vals.push_back(e.v(i, k));
        csv.row_with_index(i, vals, e.jumps[i]);
    }
}

/// Two-column (t, tv) series read back from a CSV written by CsvWriter;
/// columns are located by header name.
inline std::pair<std::vector<double>, std::vector<double>> read_series_csv(const std::filesystem::path& path,
                                                                           const std::string& tcol,
                                                                           const std::string& ycol) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty series file: " + path.string());
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        size_t start = 0;
        for (;;) {
            const size_t c = s.find(',', start);
            parts.push_back(s.substr(start, c - start));
            if (c == std::string::npos) break;
            start = c + 1;
        }
        return parts;
    };
    const auto header = split(line);
    long ti = -1, yi = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == tcol) ti = long(i);
        if (header[i] == ycol) yi = long(i);
    }
    if (ti < 0 || yi < 0) throw ConfigError("series file lacks columns " + tcol + "/" + ycol);
    std::vector<double> t, y;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto parts = split(line);
        if (long(parts.size()) <= std::max(ti, yi)) throw ConfigError("short row in series file");
        t.push_back(std::stod(parts[ti]));
        y.push_back(std::stod(parts[yi]));
    }
    return {t, y};
}

}  // namespace kinlab
