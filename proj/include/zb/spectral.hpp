#pragma once

#include "zb/dynamics.hpp"
#include "zb/spectrum.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace zb {

enum class Window { rect, hann };
enum class Detrend { mean, linear };

inline std::string_view to_string(Window w) { return w == Window::hann ? "hann" : "rect"; }

/// Worst-case sub-bin bias of log-power quadratic interpolation for an
/// isolated tone, in bins (measured over fractional offsets).
inline double interpolation_bias_bound(Window w) { return w == Window::hann ? 1.0 / 60.0 : 0.2; }

/// One-sided power spectrum normalized so that sum(power) equals
/// sum((w x)^2) / sum(w^2) of the detrended input.
struct Spectrum {
    std::vector<double> freqs; // angular frequency bins
    std::vector<double> power;
    double resolution = 0.0;   // 2 pi / (N dt)
    Window window = Window::hann;
    double parseval_input = 0.0; // sum((w x)^2) / sum(w^2)
};

struct Peak {
    double omega = 0.0;
    double power = 0.0;
    bool refined = false;
};

struct PeakSet {
    std::vector<Peak> peaks; // power descending
};

/// Expected tone for matching. Coincident frequencies are merged by label.
struct ExpectedTone {
    std::string label;
    double omega = 0.0;
};

struct PeakAssignment {
    double omega = 0.0;
    double power_fraction = 0.0;
    std::string label; // empty when unexplained
    double expected_omega = 0.0;
    double residual = 0.0; // relative
};

struct MatchReport {
    std::vector<PeakAssignment> assignments;
    std::vector<ExpectedTone> unmatched;
    std::size_t unexplained = 0;
    double tol_rel = 1e-3;

    bool passed() const { return unexplained == 0 && unmatched.empty(); }
};

struct BeatEnvelope {
    double carrier = 0.0;
    double envelope = 0.0;
    std::array<double, 2> tones{};
};

namespace detail {

inline std::vector<double> window_weights(Window w, std::size_t n)
{
    std::vector<double> out(n, 1.0);
    if (w == Window::hann)
        for (std::size_t k = 0; k < n; ++k)
            out[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(k) / double(n));
    return out;
}

inline std::vector<double> detrended(const std::vector<double>& x, Detrend d)
{
    const std::size_t n = x.size();
    std::vector<double> y(x);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= double(n);
    if (d == Detrend::mean) {
        for (double& v : y) v -= mean;
        return y;
    }
    // least-squares line over the sample index
    const double kbar = 0.5 * double(n - 1);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxy += (double(k) - kbar) * (x[k] - mean);
        sxx += (double(k) - kbar) * (double(k) - kbar);
    }
    const double slope = sxy / sxx;
    for (std::size_t k = 0; k < n; ++k) y[k] = x[k] - mean - slope * (double(k) - kbar);
    return y;
}

inline double sample_step(const TimeSeries& s)
{
    require_uniform(s.times);
    return (s.times.back() - s.times.front()) / double(s.size() - 1);
}

} // namespace detail

inline Spectrum periodogram(const TimeSeries& series, Window window = Window::hann, Detrend detrend = Detrend::mean)
{
    const std::size_t n = series.size();
    if (n < 64) throw ConfigError("periodogram needs at least 64 samples");
    if (series.values.size() != n) throw ConfigError("time series has mismatched lengths");
    const double dt = detail::sample_step(series);

    const auto w = detail::window_weights(window, n);
    const auto x = detail::detrended(series.values, detrend);
    std::vector<std::complex<double>> in(n), out;
    double w2 = 0.0, energy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        in[k] = w[k] * x[k];
        w2 += w[k] * w[k];
        energy += std::norm(in[k]);
    }
    Eigen::FFT<double> fft;
    fft.fwd(out, in);

    Spectrum s;
    s.window = window;
    s.resolution = 2.0 * std::numbers::pi / (double(n) * dt);
    s.parseval_input = energy / w2;
    const std::size_t half = n / 2;
    s.freqs.resize(half + 1);
    s.power.resize(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
        const bool unpaired = k == 0 || (n % 2 == 0 && k == half);
        s.freqs[k] = s.resolution * double(k);
        s.power[k] = (unpaired ? 1.0 : 2.0) * std::norm(out[k]) / (double(n) * w2);
    }
    return s;
}

/// Local maxima above rel_threshold * max power (and above an absolute floor
/// that rejects rounding noise), refined by a parabola through the
/// log-powers of the three bins around each maximum.
inline PeakSet extract_peaks(const Spectrum& spec, std::size_t max_peaks = 16, double rel_threshold = 0.01,
                             double abs_floor = 1e-20)
{
    PeakSet set;
    const auto& pw = spec.power;
    if (pw.size() < 3) return set;
    const double top = *std::max_element(pw.begin() + 1, pw.end());
    const double threshold = std::max(rel_threshold * top, abs_floor);
    for (std::size_t k = 1; k + 1 < pw.size(); ++k) {
        if (!(pw[k] > pw[k - 1] && pw[k] >= pw[k + 1] && pw[k] > threshold)) continue;
        Peak pk{spec.freqs[k], pw[k], false};
        if (pw[k - 1] > 0.0 && pw[k + 1] > 0.0) {
            const double a = std::log(pw[k - 1]), b = std::log(pw[k]), c = std::log(pw[k + 1]);
            const double denom = a - 2.0 * b + c;
            if (denom < 0.0) {
                const double shift = 0.5 * (a - c) / denom;
                pk.omega = spec.freqs[k] + shift * spec.resolution;
                pk.power = std::exp(b - 0.25 * (a - c) * shift);
                pk.refined = true;
            }
        }
        set.peaks.push_back(pk);
    }
    std::stable_sort(set.peaks.begin(), set.peaks.end(),
                     [](const Peak& x, const Peak& y) { return x.power > y.power; });
    if (set.peaks.size() > max_peaks) set.peaks.resize(max_peaks);
    return set;
}

/// Merges coincident expected frequencies (relative separation below tol).
inline std::vector<ExpectedTone> merge_expected(std::vector<ExpectedTone> tones, double tol = 1e-9)
{
    std::vector<ExpectedTone> out;
    for (auto& t : tones) {
        t.omega = std::abs(t.omega);
        auto it = std::find_if(out.begin(), out.end(), [&](const ExpectedTone& e) {
            return std::abs(e.omega - t.omega) <= tol * std::max(e.omega, t.omega);
        });
        if (it == out.end())
            out.push_back(t);
        else
            it->label += "=" + t.label;
    }
    return out;
}

/**
 * Assigns each peak to the nearest expected frequency; peaks farther than
 * tol_rel are unexplained, expected tones without a peak are unmatched.
 * Refuses to run when the spectrum cannot resolve tol_rel at the lowest
 * expected frequency.
 */
inline MatchReport match_frequencies(const PeakSet& peaks, const std::vector<ExpectedTone>& expected_in,
                                     const Spectrum& spec, double tol_rel = 1e-3)
{
    const auto expected = merge_expected(expected_in);
    for (const auto& e : expected) {
        if (!(e.omega > 0.0)) throw ConfigError("expected frequency '" + e.label + "' must be positive");
        if (tol_rel * e.omega < interpolation_bias_bound(spec.window) * spec.resolution)
            throw ConfigError("insufficient resolution to match '" + e.label + "' within tolerance " +
                              std::to_string(tol_rel) + ": extend the time series");
    }
    MatchReport r;
    r.tol_rel = tol_rel;
    double total = 0.0;
    for (const auto& p : peaks.peaks) total += p.power;
    std::vector<bool> hit(expected.size(), false);
    for (const auto& p : peaks.peaks) {
        PeakAssignment a;
        a.omega = p.omega;
        a.power_fraction = total > 0.0 ? p.power / total : 0.0;
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            const double res = std::abs(p.omega - expected[i].omega) / expected[i].omega;
            if (res < best) {
                best = res;
                best_i = i;
            }
        }
        if (!expected.empty()) {
            a.expected_omega = expected[best_i].omega;
            a.residual = best;
            if (best <= tol_rel) {
                a.label = expected[best_i].label;
                hit[best_i] = true;
            }
        }
        if (a.label.empty()) ++r.unexplained;
        r.assignments.push_back(a);
    }
    for (std::size_t i = 0; i < expected.size(); ++i)
        if (!hit[i]) r.unmatched.push_back(expected[i]);
    return r;
}

/// Magnitude of the analytic signal of the mean-removed series.
inline std::vector<double> analytic_envelope(const std::vector<double>& x)
{
    const std::size_t n = x.size();
    const auto y = detail::detrended(x, Detrend::mean);
    std::vector<std::complex<double>> in(y.begin(), y.end()), spec, back;
    Eigen::FFT<double> fft;
    fft.fwd(spec, in);
    for (std::size_t k = 1; k < n; ++k) {
        if (2 * k < n)
            spec[k] *= 2.0;
        else if (2 * k > n)
            spec[k] = 0.0;
    }
    fft.inv(back, spec);
    std::vector<double> env(n);
    for (std::size_t k = 0; k < n; ++k) env[k] = std::abs(back[k]);
    return env;
}

/// Carrier and envelope frequency of a two-tone series. The envelope is the
/// dominant line in the spectrum of the analytic-signal magnitude.
inline BeatEnvelope beat_envelope(const TimeSeries& series, Window window = Window::hann,
                                  Detrend detrend = Detrend::mean)
{
    const auto tones = extract_peaks(periodogram(series, window, detrend));
    if (tones.peaks.size() != 2)
        throw ConfigError("beat_envelope requires exactly two tones, found " + std::to_string(tones.peaks.size()));

    TimeSeries base = series;
    base.values = detail::detrended(series.values, detrend);
    TimeSeries env = series;
    env.values = analytic_envelope(base.values);
    const auto env_peaks = extract_peaks(periodogram(env, window, Detrend::mean), 1);
    if (env_peaks.peaks.empty()) throw ConfigError("beat_envelope: flat envelope");

    BeatEnvelope b;
    b.tones = {tones.peaks[0].omega, tones.peaks[1].omega};
    std::sort(b.tones.begin(), b.tones.end());
    b.carrier = 0.5 * (b.tones[0] + b.tones[1]);
    b.envelope = env_peaks.peaks[0].omega;
    return b;
}

} // namespace zb
