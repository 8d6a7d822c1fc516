#pragma once

#include "zb/dynamics.hpp"
#include "zb/spectral.hpp"
#include "zb/spectrum.hpp"
#include "zb/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace zb {

/// End-to-end check: oracle evolution -> periodogram -> frequency match and
/// beat envelope for each observable, plus closed-form series agreement,
/// conservation laws and the vanishing of the transverse Larmor tone.
struct VerifyOptions {
    ParticleConfig cfg = ParticleConfig::natural(0.4);
    double p0 = 0.5;
    double sigma_p = 0.05;
    std::size_t modes = 1;
    Mix mix = default_mix();
    std::size_t samples = 4096;
    double periods = 20.0;         // of the slowest expected tone, when t_max is unset
    std::optional<double> t_max;
    Window window = Window::hann;
    double tol_rel = 1e-3;
    double beat_tol = 1e-2;
    double series_tol = 1e-9;
    double conservation_tol = 1e-10;
    double null_tol = 1e-12;
};

struct ObservableCheck {
    Observable obs = Observable::S_x;
    std::vector<ExpectedTone> expected;
    PeakSet peaks;
    MatchReport match;
    std::optional<double> expected_beat;
    std::optional<BeatEnvelope> beat;
    double beat_residual = 0.0;
    double series_max_diff = 0.0; // oracle vs closed form
    double constant_deviation = 0.0; // S_x only
    std::string error;
    bool passed = false;
};

struct NullCheck {
    std::string name;
    double residual = 0.0;
    bool passed = false;
};

struct VerificationReport {
    VerifyOptions options;
    FrequencySet freqs;
    double t_max = 0.0;
    double resolution = 0.0;
    ConservationReport conservation;
    std::vector<ObservableCheck> checks;
    std::vector<NullCheck> nulls;
    bool passed = false;
};

/// Tones each observable is expected to carry at one (p, delta) point.
/// A Larmor tone is expected only when the splitting is resolvable.
inline std::vector<ExpectedTone> expected_tones(Observable obs, const FrequencySet& f)
{
    const bool larmor = std::abs(f.omega_L) > 1e-9;
    switch (obs) {
    case Observable::S_x: return {};
    case Observable::alpha_x:
    case Observable::r_x: return {{"omega_zb1", f.omega_zb1}, {"omega_zb3", f.omega_zb3}};
    default:
        if (larmor) return {{"omega_L", std::abs(f.omega_L)}, {"omega_zb2", f.omega_zb2}};
        return {{"omega_zb2", f.omega_zb2}};
    }
}

/// Expected envelope frequency when two distinct tones are present.
inline std::optional<double> expected_beat(Observable obs, const FrequencySet& f)
{
    if (merge_expected(expected_tones(obs, f)).size() != 2) return std::nullopt;
    switch (obs) {
    case Observable::S_y:
    case Observable::S_z: return f.omega_sb;
    case Observable::alpha_x:
    case Observable::r_x: return std::abs(f.omega_ob1);
    default: return f.omega_ob2;
    }
}

inline Detrend detrend_for(Observable obs) { return obs == Observable::r_x ? Detrend::linear : Detrend::mean; }

inline double slowest_frequency(const FrequencySet& f)
{
    double slow = std::min({f.omega_zb1, f.omega_zb2, f.omega_zb3});
    if (std::abs(f.omega_L) > 1e-9) slow = std::min(slow, std::abs(f.omega_L));
    return slow;
}

inline Wavepacket build_packet(const VerifyOptions& o)
{
    return o.modes <= 1 ? single_mode(o.p0, o.mix, o.cfg) : gaussian_packet(o.p0, o.sigma_p, o.mix, o.modes, o.cfg);
}

inline double default_t_max(const VerifyOptions& o)
{
    return o.periods * 2.0 * std::numbers::pi / slowest_frequency(frequency_set(o.p0, o.cfg));
}

inline double larmor_tone_amplitude(double p, const Mix& mix, const ParticleConfig& cfg, Observable obs)
{
    // transverse terms: tones[0], tones[1] are the same-branch (+-omega_L) pair
    const ModeTerms m = mode_terms(p, mix, cfg, obs);
    return std::max(std::abs(m.tones.at(0).coefficient), std::abs(m.tones.at(1).coefficient));
}

inline ObservableCheck check_observable(const Wavepacket& wp, Observable obs, const FrequencySet& f,
                                        const std::vector<double>& t_grid, const VerifyOptions& o)
{
    ObservableCheck c;
    c.obs = obs;
    c.expected = expected_tones(obs, f);
    c.expected_beat = expected_beat(obs, f);

    const TimeSeries oracle = expectation_series(wp, obs, t_grid);
    const TimeSeries closed = analytic_series(wp, obs, t_grid);
    for (std::size_t n = 0; n < t_grid.size(); ++n)
        c.series_max_diff = std::max(c.series_max_diff, std::abs(oracle.values[n] - closed.values[n]));

    try {
        const Spectrum spec = periodogram(oracle, o.window, detrend_for(obs));
        c.peaks = extract_peaks(spec);
        c.match = match_frequencies(c.peaks, c.expected, spec, o.tol_rel);
        if (c.expected_beat) {
            c.beat = beat_envelope(oracle, o.window, detrend_for(obs));
            c.beat_residual = std::abs(c.beat->envelope - *c.expected_beat) / *c.expected_beat;
        }
    } catch (const ConfigError& e) {
        c.error = e.what();
    }

    if (obs == Observable::S_x) {
        const double sx = spin_x_constant(wp);
        for (double v : oracle.values) c.constant_deviation = std::max(c.constant_deviation, std::abs(v - sx));
    }

    c.passed = c.error.empty() && c.match.passed() && c.series_max_diff <= o.series_tol &&
               c.constant_deviation <= o.conservation_tol && (!c.expected_beat || c.beat_residual <= o.beat_tol);
    return c;
}

inline VerificationReport run_verification(const VerifyOptions& o)
{
    VerificationReport r;
    r.options = o;
    r.freqs = frequency_set(o.p0, o.cfg);
    r.t_max = o.t_max ? *o.t_max : default_t_max(o);
    const auto t_grid = uniform_time_grid(r.t_max, o.samples);
    r.resolution = 2.0 * std::numbers::pi / r.t_max;
    const Wavepacket wp = build_packet(o);

    r.conservation = conservation_check(wp, t_grid);
    for (Observable obs : kObservables) r.checks.push_back(check_observable(wp, obs, r.freqs, t_grid, o));

    // The same-branch (Larmor) transverse tone vanishes in the rest frame and
    // without splitting.
    const ParticleConfig unsplit = ParticleConfig::natural(0.0);
    for (Observable obs : {Observable::r_y, Observable::r_z}) {
        NullCheck rest{"rest_frame_larmor_" + std::string(tag(obs)),
                       larmor_tone_amplitude(0.0, o.mix, o.cfg, obs), false};
        NullCheck flat{"zero_splitting_larmor_" + std::string(tag(obs)),
                       larmor_tone_amplitude(o.p0, o.mix, unsplit, obs), false};
        rest.passed = rest.residual <= o.null_tol;
        flat.passed = flat.residual <= o.null_tol;
        r.nulls.push_back(rest);
        r.nulls.push_back(flat);
    }

    r.passed = r.conservation.max_drift() <= o.conservation_tol;
    for (const auto& c : r.checks) r.passed = r.passed && c.passed;
    for (const auto& n : r.nulls) r.passed = r.passed && n.passed;
    return r;
}

} // namespace zb
