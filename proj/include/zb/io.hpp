#pragma once

#include "zb/dynamics.hpp"
#include "zb/spectral.hpp"
#include "zb/spectrum.hpp"
#include "zb/verify.hpp"
#include "zb/wavepacket.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace zb::io {

using json = nlohmann::ordered_json;

/// 12 significant digits, the fixed precision of all CSV output.
inline std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_series_header(std::ostream& os) { os << "t,value,observable,p0,delta\n"; }

/// Rows of one series; `scale_t` / `scale_v` convert from natural units.
inline void write_series_rows(std::ostream& os, const TimeSeries& ts, double p0, double delta, double scale_t = 1.0,
                              double scale_v = 1.0)
{
    for (std::size_t n = 0; n < ts.size(); ++n)
        os << fmt(ts.times[n] * scale_t) << ',' << fmt(ts.values[n] * scale_v) << ',' << ts.observable << ','
           << fmt(p0) << ',' << fmt(delta) << '\n';
}

inline const std::vector<std::string>& frequency_columns()
{
    static const std::vector<std::string> cols{"p",         "v",         "delta",    "omega_L",
                                               "omega_zb1", "omega_zb2", "omega_zb3", "omega_sb",
                                               "omega_ob1", "omega_ob2", "omega_forbidden", "omega_zb_free"};
    return cols;
}

/// One row in frequency_columns() order. Frequencies multiplied by `scale_w`,
/// momentum by `scale_p`, splitting by `scale_e`.
inline std::vector<double> frequency_row(const SweepRow& r, double scale_p = 1.0, double scale_e = 1.0,
                                         double scale_w = 1.0)
{
    const auto& f = r.freqs;
    return {f.p * scale_p,           r.kin.v,                f.delta * scale_e,
            f.omega_L * scale_w,     f.omega_zb1 * scale_w,  f.omega_zb2 * scale_w,
            f.omega_zb3 * scale_w,   f.omega_sb * scale_w,   f.omega_ob1 * scale_w,
            f.omega_ob2 * scale_w,   f.omega_forbidden * scale_w, r.omega_zb_free * scale_w};
}

inline void write_csv_row(std::ostream& os, const std::vector<double>& row)
{
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt(row[i]);
    os << '\n';
}

inline void write_csv_header(std::ostream& os, const std::vector<std::string>& cols)
{
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
}

enum class Figure { fig1, fig2, fig3 };

inline Figure parse_figure(const std::string& s)
{
    if (s == "fig1") return Figure::fig1;
    if (s == "fig2") return Figure::fig2;
    if (s == "fig3") return Figure::fig3;
    throw ConfigError("unknown figure id '" + s + "' (expected fig1, fig2 or fig3)");
}

inline std::vector<std::string> figure_columns(Figure f)
{
    switch (f) {
    case Figure::fig1: return {"v", "omega_zb"};
    case Figure::fig2: return {"v", "omega_zb2", "omega_L", "omega_sb"};
    case Figure::fig3: return {"v", "omega_zb1", "omega_zb3", "omega_ob1"};
    }
    return {};
}

inline std::vector<double> figure_row(Figure fig, const SweepRow& r, double scale_w = 1.0)
{
    const auto& f = r.freqs;
    switch (fig) {
    case Figure::fig1: return {r.kin.v, r.omega_zb_free * scale_w};
    case Figure::fig2: return {r.kin.v, f.omega_zb2 * scale_w, f.omega_L * scale_w, f.omega_sb * scale_w};
    case Figure::fig3: return {r.kin.v, f.omega_zb1 * scale_w, f.omega_zb3 * scale_w, f.omega_ob1 * scale_w};
    }
    return {};
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const Mix& m)
{
    json a = json::array();
    for (const auto& c : m) a.push_back({c.real(), c.imag()});
    return a;
}

inline Mix mix_from_json(const json& a)
{
    if (!a.is_array() || a.size() != 4) throw ConfigError("mix must be an array of four [re, im] pairs");
    Mix m;
    for (std::size_t i = 0; i < 4; ++i) m[i] = cplx(a[i].at(0).get<double>(), a[i].at(1).get<double>());
    return m;
}

/// Packet document: grid, weights, and per-mode [re, im] amplitudes in
/// (+up, +down, -up, -down) order. Values in natural units.
inline json to_json(const Wavepacket& wp)
{
    json j;
    j["delta"] = wp.cfg.reduced_delta();
    j["grid"] = wp.momenta;
    j["weights"] = wp.weights;
    json coeffs = json::array();
    for (const auto& m : wp.coeffs) coeffs.push_back(to_json(m));
    j["coeffs"] = coeffs;
    return j;
}

inline Wavepacket wavepacket_from_json(const json& j)
{
    Wavepacket wp;
    wp.cfg = ParticleConfig::natural(j.at("delta").get<double>());
    wp.momenta = j.at("grid").get<std::vector<double>>();
    wp.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& m : j.at("coeffs")) wp.coeffs.push_back(mix_from_json(m));
    const auto d = validate(wp);
    if (!d.grid_increasing || !d.weights_positive || d.normalization_residual > 1e-10)
        throw ConfigError("wavepacket document violates grid/weight/normalization invariants");
    return wp;
}

inline json to_json(const FrequencySet& f)
{
    return json{{"p", f.p},
                {"delta", f.delta},
                {"omega_L", f.omega_L},
                {"omega_zb1", f.omega_zb1},
                {"omega_zb2", f.omega_zb2},
                {"omega_zb3", f.omega_zb3},
                {"omega_sb", f.omega_sb},
                {"omega_ob1", f.omega_ob1},
                {"omega_ob2", f.omega_ob2},
                {"omega_forbidden", f.omega_forbidden}};
}

/// Match report: one entry per peak with its assigned label and residual.
inline json to_json(const MatchReport& m)
{
    json peaks = json::array();
    for (const auto& a : m.assignments)
        peaks.push_back({{"omega", a.omega},
                         {"label", a.label.empty() ? json(nullptr) : json(a.label)},
                         {"expected_omega", a.expected_omega},
                         {"residual", a.residual},
                         {"power_fraction", a.power_fraction}});
    json unmatched = json::array();
    for (const auto& u : m.unmatched) unmatched.push_back({{"label", u.label}, {"omega", u.omega}});
    return json{{"tol_rel", m.tol_rel},
                {"peaks", peaks},
                {"unexplained", m.unexplained},
                {"unmatched", unmatched},
                {"passed", m.passed()}};
}

inline json to_json(const VerificationReport& r)
{
    json j;
    const auto& o = r.options;
    j["config"] = {{"p0", o.p0},
                   {"delta", o.cfg.reduced_delta()},
                   {"sigma_p", o.sigma_p},
                   {"modes", o.modes},
                   {"mix", to_json(o.mix)},
                   {"samples", o.samples},
                   {"t_max", r.t_max},
                   {"resolution", r.resolution},
                   {"window", std::string(to_string(o.window))}};
    j["frequencies"] = to_json(r.freqs);
    j["conservation"] = {{"norm_drift", r.conservation.norm_drift},
                         {"energy_drift", r.conservation.energy_drift},
                         {"spin_x_drift", r.conservation.spin_x_drift},
                         {"population_drift", r.conservation.population_drift},
                         {"tolerance", o.conservation_tol},
                         {"passed", r.conservation.max_drift() <= o.conservation_tol}};
    json obs = json::array();
    for (const auto& c : r.checks) {
        json e;
        e["observable"] = std::string(tag(c.obs));
        json exp = json::array();
        for (const auto& t : c.expected) exp.push_back({{"label", t.label}, {"omega", t.omega}});
        e["expected"] = exp;
        e["match"] = to_json(c.match);
        if (c.expected_beat) {
            e["beat"] = {{"expected", *c.expected_beat},
                         {"measured", c.beat ? json(c.beat->envelope) : json(nullptr)},
                         {"carrier", c.beat ? json(c.beat->carrier) : json(nullptr)},
                         {"residual", c.beat_residual},
                         {"tolerance", o.beat_tol}};
        }
        e["series_max_diff"] = c.series_max_diff;
        if (c.obs == Observable::S_x) e["constant_deviation"] = c.constant_deviation;
        if (!c.error.empty()) e["error"] = c.error;
        e["passed"] = c.passed;
        obs.push_back(e);
    }
    j["observables"] = obs;
    json nulls = json::array();
    for (const auto& n : r.nulls) nulls.push_back({{"name", n.name}, {"residual", n.residual}, {"passed", n.passed}});
    j["nulls"] = nulls;
    j["passed"] = r.passed;
    return j;
}

} // namespace zb::io
