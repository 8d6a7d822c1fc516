// zbsim: frequencies, figure sweeps, wavepacket evolution and end-to-end
// spectral verification for Zitterbewegung of neutral spin-1/2 particles in
// longitudinal fields.
//
// Exit codes: 0 success, 1 validation error, 2 verification failure, 3 I/O error.

#include "zb/zb.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitVerification = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::optional<std::string> p;
    std::optional<std::string> v;
    std::optional<double> delta;
    std::optional<double> mass;
    std::optional<double> mu;
    std::optional<double> dmom;
    std::optional<double> bfield;
    std::optional<double> efield;
    std::string config;
    std::string units = "natural";
    std::string out;
    std::string format = "csv";
    std::string figure;
    std::vector<std::string> observables;
    std::optional<double> t_max;
    std::size_t samples = 4096;
    std::size_t modes = 1;
    double sigma_p = 0.05;
    double periods = 20.0;
    std::optional<std::uint64_t> seed;
    std::string method = "oracle";
    double v_max = 0.99;
    std::size_t points = 100;
};

void add_particle_options(CLI::App& app, RunConfig& rc)
{
    app.add_option("--config", rc.config, "Flat key = value file; command-line flags take precedence");
    app.add_option("--delta", rc.delta, "Splitting d*E - mu*B (mc^2 in natural units, J in SI)");
    app.add_option("--mass", rc.mass, "Rest mass (SI only, kg; default neutron)");
    app.add_option("--mu", rc.mu, "Magnetic dipole moment (J/T in SI)");
    app.add_option("--dmom", rc.dmom, "Electric dipole moment (C m in SI)");
    app.add_option("--bfield", rc.bfield, "Longitudinal magnetic field (T in SI)");
    app.add_option("--efield", rc.efield, "Longitudinal electric field (V/m in SI)");
    app.add_option("--units", rc.units, "Unit system")->check(CLI::IsMember({"natural", "si"}));
    app.add_option("--out", rc.out, "Output file (default stdout)");
    app.add_option("--format", rc.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void add_packet_options(CLI::App& app, RunConfig& rc)
{
    app.add_option("--p", rc.p, "Mean momentum (mc in natural units, kg m/s in SI)");
    app.add_option("--v", rc.v, "Velocity instead of momentum; a trailing 'c' means a fraction of c");
    app.add_option("--t-max", rc.t_max, "Time span (hbar/mc^2 in natural units, s in SI)");
    app.add_option("--samples", rc.samples, "Number of time samples");
    app.add_option("--modes", rc.modes, "Momentum modes (1 = single plane-wave mode)");
    app.add_option("--sigma-p", rc.sigma_p, "Gaussian momentum width (mc) for multi-mode packets");
    app.add_option("--periods", rc.periods, "Periods of the slowest tone when --t-max is unset");
    app.add_option("--seed", rc.seed, "Randomize the phases of the four-way mix with this seed");
}

zb::ParticleConfig particle_config(const RunConfig& rc)
{
    const bool fields = rc.mu || rc.dmom || rc.bfield || rc.efield;
    if (rc.delta && fields) throw zb::ConfigError("supply either --delta or dipole moments and fields, not both");
    const auto units = zb::parse_unit_system(rc.units);
    if (units == zb::UnitSystem::natural) {
        if (rc.mass) throw zb::ConfigError("--mass applies to SI units only");
        if (fields)
            return zb::ParticleConfig::from_fields(1.0, 1.0, 1.0, rc.mu.value_or(0.0), rc.dmom.value_or(0.0),
                                                   rc.bfield.value_or(0.0), rc.efield.value_or(0.0), units);
        return zb::ParticleConfig::natural(rc.delta.value_or(0.4));
    }
    const double mass = rc.mass.value_or(zb::codata::neutron_mass);
    if (fields)
        return zb::ParticleConfig::from_fields(mass, zb::codata::c, zb::codata::hbar,
                                               rc.mu.value_or(zb::codata::neutron_mu), rc.dmom.value_or(0.0),
                                               rc.bfield.value_or(0.0), rc.efield.value_or(0.0), units);
    zb::ParticleConfig cfg;
    cfg.mass = mass;
    cfg.c = zb::codata::c;
    cfg.hbar = zb::codata::hbar;
    cfg.units = units;
    if (!rc.delta) throw zb::ConfigError("SI units need --delta or dipole moments and fields");
    cfg.delta = *rc.delta;
    cfg.validate();
    return cfg;
}

double parse_number(const std::string& s, const std::string& what)
{
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(s, &used);
    } catch (const std::exception&) {
        throw zb::ConfigError("invalid " + what + " '" + s + "'");
    }
    if (used != s.size()) throw zb::ConfigError("invalid " + what + " '" + s + "'");
    return x;
}

/// Velocity as a fraction of c; "0.6c" is always relative, a bare number is
/// a fraction of c in natural units and m/s in SI.
double velocity_fraction(const std::string& s, const zb::ParticleConfig& cfg)
{
    if (!s.empty() && s.back() == 'c') return parse_number(s.substr(0, s.size() - 1), "velocity");
    return parse_number(s, "velocity") / cfg.c;
}

/// Momentum in units of mc, plus the velocity (fraction of c) if one was given.
std::pair<double, double> momentum(const RunConfig& rc, const zb::ParticleConfig& cfg, double fallback)
{
    if (rc.p && rc.v) throw zb::ConfigError("supply either --p or --v, not both");
    if (rc.v) {
        const auto k = zb::momentum_from_velocity(velocity_fraction(*rc.v, cfg));
        return {k.p, k.v};
    }
    const double p = rc.p ? parse_number(*rc.p, "momentum") / cfg.momentum_scale() : fallback;
    return {p, p / std::hypot(p, 1.0)};
}

zb::Mix packet_mix(const RunConfig& rc)
{
    if (!rc.seed) return zb::default_mix();
    std::mt19937_64 rng(*rc.seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    zb::Mix m;
    for (auto& c : m) c = std::polar(0.5, phase(rng));
    return m;
}

zb::VerifyOptions verify_options(const RunConfig& rc)
{
    zb::VerifyOptions o;
    o.cfg = particle_config(rc);
    o.p0 = momentum(rc, o.cfg, 0.5).first;
    o.modes = rc.modes;
    o.sigma_p = rc.sigma_p;
    o.samples = rc.samples;
    o.periods = rc.periods;
    o.mix = packet_mix(rc);
    if (rc.t_max) o.t_max = *rc.t_max / o.cfg.time_scale();
    if (o.samples < 64) throw zb::ConfigError("--samples must be at least 64");
    if (o.modes < 1) throw zb::ConfigError("--modes must be at least 1");
    return o;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool given(const std::vector<std::string>& args, const std::string& flag)
{
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

/// Expands `--config FILE` into flags inserted right after the subcommand.
/// Keys already present on the command line are skipped, so flags win.
std::vector<std::string> expand_config(std::vector<std::string> args)
{
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || args.empty()) return args;
    std::ifstream f(path);
    if (!f) throw IoError("cannot read config file '" + path + "'");

    std::vector<std::string> extra;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find_first_of("#;")));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw zb::ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty() || key == "config") throw zb::ConfigError(path + ":" + std::to_string(lineno) + ": bad key");
        const std::string flag = "--" + key;
        if (given(args, flag)) continue;
        extra.push_back(flag);
        // list-valued keys (observable) take whitespace-separated values
        std::istringstream vs(value);
        for (std::string tok; vs >> tok;) extra.push_back(tok);
    }
    args.insert(args.begin() + 1, extra.begin(), extra.end());
    return args;
}

template <class Fn>
void emit(const RunConfig& rc, Fn&& write)
{
    if (rc.out.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream f(rc.out, std::ios::binary);
    if (!f) throw IoError("cannot open '" + rc.out + "' for writing");
    write(f);
    f.flush();
    if (!f) throw IoError("failed writing '" + rc.out + "'");
}

int cmd_frequencies(const RunConfig& rc)
{
    const auto cfg = particle_config(rc);
    const auto [p, v] = momentum(rc, cfg, 0.0);
    zb::SweepRow row;
    row.kin = {v, 1.0 / std::sqrt((1.0 - v) * (1.0 + v)), p};
    row.freqs = zb::frequency_set(p, cfg);
    row.omega_zb_free = zb::free_zb_frequency(p);
    const auto values = zb::io::frequency_row(row, cfg.momentum_scale(), cfg.energy_scale(), cfg.frequency_scale());
    emit(rc, [&](std::ostream& os) {
        if (rc.format == "json") {
            zb::io::json j;
            const auto& cols = zb::io::frequency_columns();
            for (std::size_t i = 0; i < cols.size(); ++i) j[cols[i]] = values[i];
            j["units"] = std::string(zb::to_string(cfg.units));
            os << j.dump(2) << '\n';
        } else {
            zb::io::write_csv_header(os, zb::io::frequency_columns());
            zb::io::write_csv_row(os, values);
        }
    });
    return kExitOk;
}

int cmd_sweep(const RunConfig& rc)
{
    const auto cfg = particle_config(rc);
    if (rc.points < 2) throw zb::ConfigError("--points must be at least 2");
    const auto rows = zb::sweep(zb::default_velocity_grid(rc.points, rc.v_max), cfg);
    std::vector<std::string> cols;
    std::vector<std::vector<double>> table;
    if (!rc.figure.empty()) {
        const auto fig = zb::io::parse_figure(rc.figure);
        cols = zb::io::figure_columns(fig);
        for (const auto& r : rows) table.push_back(zb::io::figure_row(fig, r, cfg.frequency_scale()));
    } else {
        cols = zb::io::frequency_columns();
        for (const auto& r : rows)
            table.push_back(zb::io::frequency_row(r, cfg.momentum_scale(), cfg.energy_scale(), cfg.frequency_scale()));
    }
    emit(rc, [&](std::ostream& os) {
        if (rc.format == "json") {
            zb::io::json arr = zb::io::json::array();
            for (const auto& row : table) {
                zb::io::json j;
                for (std::size_t i = 0; i < cols.size(); ++i) j[cols[i]] = row[i];
                arr.push_back(j);
            }
            os << arr.dump(2) << '\n';
        } else {
            zb::io::write_csv_header(os, cols);
            for (const auto& row : table) zb::io::write_csv_row(os, row);
        }
    });
    return kExitOk;
}

double value_scale(zb::Observable obs, const zb::ParticleConfig& cfg)
{
    if (zb::is_position(obs)) return cfg.length_scale();
    if (obs == zb::Observable::S_x || obs == zb::Observable::S_y || obs == zb::Observable::S_z) return cfg.hbar;
    return 1.0;
}

int cmd_evolve(const RunConfig& rc)
{
    const auto o = verify_options(rc);
    const auto wp = zb::build_packet(o);
    const double t_max = o.t_max ? *o.t_max : zb::default_t_max(o);
    const auto grid = zb::uniform_time_grid(t_max, o.samples);
    if (rc.method != "oracle" && rc.method != "analytic")
        throw zb::ConfigError("--method must be 'oracle' or 'analytic'");

    std::vector<zb::Observable> obs;
    if (rc.observables.empty())
        obs.assign(zb::kObservables.begin(), zb::kObservables.end());
    else
        for (const auto& t : rc.observables) obs.push_back(zb::parse_observable(t));

    std::vector<zb::TimeSeries> series;
    for (auto ob : obs)
        series.push_back(rc.method == "oracle" ? zb::expectation_series(wp, ob, grid)
                                               : zb::analytic_series(wp, ob, grid));
    const auto& cfg = o.cfg;
    const double p0 = o.p0 * cfg.momentum_scale();
    emit(rc, [&](std::ostream& os) {
        if (rc.format == "json") {
            zb::io::json j;
            j["p0"] = p0;
            j["delta"] = cfg.delta;
            j["packet"] = zb::io::to_json(wp);
            zb::io::json arr = zb::io::json::array();
            for (std::size_t i = 0; i < series.size(); ++i) {
                std::vector<double> t, v;
                for (std::size_t n = 0; n < series[i].size(); ++n) {
                    t.push_back(series[i].times[n] * cfg.time_scale());
                    v.push_back(series[i].values[n] * value_scale(obs[i], cfg));
                }
                arr.push_back({{"observable", series[i].observable}, {"t", t}, {"value", v}});
            }
            j["series"] = arr;
            os << j.dump(2) << '\n';
        } else {
            zb::io::write_series_header(os);
            for (std::size_t i = 0; i < series.size(); ++i)
                zb::io::write_series_rows(os, series[i], p0, cfg.delta, cfg.time_scale(), value_scale(obs[i], cfg));
        }
    });
    return kExitOk;
}

int cmd_verify(const RunConfig& rc)
{
    const auto o = verify_options(rc);
    const auto report = zb::run_verification(o);
    emit(rc, [&](std::ostream& os) { os << zb::io::to_json(report).dump(2) << '\n'; });
    if (!report.passed) std::cerr << "verification FAILED\n";
    return report.passed ? kExitOk : kExitVerification;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"zbsim: Zitterbewegung of neutral particles in longitudinal fields"};
    app.require_subcommand(1);
    RunConfig rc;

    auto* freq = app.add_subcommand("frequencies", "Characteristic frequencies at one momentum");
    add_particle_options(*freq, rc);
    freq->add_option("--p", rc.p, "Momentum (mc in natural units, kg m/s in SI)");
    freq->add_option("--v", rc.v, "Velocity; a trailing 'c' means a fraction of c");

    auto* sweep = app.add_subcommand("sweep", "Frequencies over a velocity grid (figure data)");
    add_particle_options(*sweep, rc);
    sweep->add_option("--figure", rc.figure, "fig1 | fig2 | fig3; omit for all columns");
    sweep->add_option("--v-max", rc.v_max, "Largest v/c on the grid");
    sweep->add_option("--points", rc.points, "Number of grid points");

    auto* evolve = app.add_subcommand("evolve", "Expectation-value time series of a wavepacket");
    add_particle_options(*evolve, rc);
    add_packet_options(*evolve, rc);
    evolve->add_option("--observable", rc.observables, "S_x S_y S_z alpha_x alpha_y alpha_z r_x r_y r_z");
    evolve->add_option("--method", rc.method, "oracle | analytic");

    auto* verify = app.add_subcommand("verify", "Spectral verification of all nine observables (JSON)");
    add_particle_options(*verify, rc);
    add_packet_options(*verify, rc);

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = expand_config(args);
    } catch (const zb::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    }
    // CLI11 consumes the vector from the back
    std::reverse(args.begin(), args.end());

    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (freq->parsed()) return cmd_frequencies(rc);
        if (sweep->parsed()) return cmd_sweep(rc);
        if (evolve->parsed()) return cmd_evolve(rc);
        if (verify->parsed()) return cmd_verify(rc);
    } catch (const zb::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitValidation;
}
