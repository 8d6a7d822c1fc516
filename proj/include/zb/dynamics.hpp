#pragma once

#include "zb/algebra.hpp"
#include "zb/spectrum.hpp"
#include "zb/wavepacket.hpp"

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace zb {

enum class Observable { S_x, S_y, S_z, alpha_x, alpha_y, alpha_z, r_x, r_y, r_z };

inline constexpr std::array<Observable, 9> kObservables{
    Observable::S_x,     Observable::S_y,     Observable::S_z, Observable::alpha_x, Observable::alpha_y,
    Observable::alpha_z, Observable::r_x,     Observable::r_y, Observable::r_z};

inline std::string_view tag(Observable o)
{
    switch (o) {
    case Observable::S_x: return "S_x";
    case Observable::S_y: return "S_y";
    case Observable::S_z: return "S_z";
    case Observable::alpha_x: return "alpha_x";
    case Observable::alpha_y: return "alpha_y";
    case Observable::alpha_z: return "alpha_z";
    case Observable::r_x: return "r_x";
    case Observable::r_y: return "r_y";
    case Observable::r_z: return "r_z";
    }
    return "?";
}

inline Observable parse_observable(std::string_view s)
{
    for (auto o : kObservables)
        if (tag(o) == s) return o;
    throw ConfigError("unknown observable '" + std::string(s) + "'");
}

inline bool is_position(Observable o)
{
    return o == Observable::r_x || o == Observable::r_y || o == Observable::r_z;
}

/// Operator whose expectation value is reported (the velocity c*alpha_j for positions).
inline const Matrix4& observable_matrix(Observable o)
{
    const auto& ops = operators();
    switch (o) {
    case Observable::S_x: return ops.spin_x;
    case Observable::S_y: return ops.spin_y;
    case Observable::S_z: return ops.spin_z;
    case Observable::alpha_x:
    case Observable::r_x: return ops.alpha_x;
    case Observable::alpha_y:
    case Observable::r_y: return ops.alpha_y;
    case Observable::alpha_z:
    case Observable::r_z: return ops.alpha_z;
    }
    return ops.beta;
}

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;
    std::string observable;
    double imag_residue = 0.0; // largest |Im <psi|O|psi>| met while contracting

    std::size_t size() const { return times.size(); }
};

/// t_k = k * t_max / samples, k = 0..samples-1 (periodic sampling convention).
inline std::vector<double> uniform_time_grid(double t_max, std::size_t samples)
{
    if (samples < 2) throw ConfigError("time grid needs at least 2 samples");
    if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
    std::vector<double> t(samples);
    const double dt = t_max / double(samples);
    for (std::size_t k = 0; k < samples; ++k) t[k] = dt * double(k);
    return t;
}

inline void require_uniform(const std::vector<double>& t)
{
    if (t.size() < 2) throw ConfigError("time grid needs at least 2 samples");
    const double dt = (t.back() - t.front()) / double(t.size() - 1);
    if (!(dt > 0.0)) throw ConfigError("time grid must be increasing");
    for (std::size_t k = 1; k < t.size(); ++k)
        if (std::abs((t[k] - t[k - 1]) - dt) > 1e-9 * dt) throw ConfigError("time grid is not uniform");
}

// ---------------------------------------------------------------------------
// Oracle: exact per-mode eigenphase evolution and direct contraction.

struct ModeState {
    double p = 0.0;
    Spinor spinor = Spinor::Zero();
    double t = 0.0;
};

/// psi(t + dt) = sum_i exp(-i E_i dt) |v_i><v_i|psi(t)>.
inline ModeState evolve_mode(const ModeState& state, double dt, const EigenSystem& eig)
{
    if (std::abs(state.p - eig.momentum) > 1e-14 * std::max(1.0, std::abs(state.p)))
        throw ConfigError("evolve_mode: eigensystem momentum does not match the state");
    ModeState out;
    out.p = state.p;
    out.t = state.t + dt;
    Spinor psi = Spinor::Zero();
    for (std::size_t i = 0; i < 4; ++i) {
        const cplx amp = eig.spinors[i].dot(state.spinor);
        psi += std::polar(1.0, -eig.energies[i] * dt) * amp * eig.spinors[i];
    }
    out.spinor = psi;
    return out;
}

inline Spinor compose(const EigenSystem& eig, const Mix& c)
{
    Spinor psi = Spinor::Zero();
    for (std::size_t i = 0; i < 4; ++i) psi += c[i] * eig.spinors[i];
    return psi;
}

/// Heisenberg-picture position generator for one mode. With
/// X_ij = V_ij / (i (E_i - E_j)) on non-degenerate pairs and D the
/// degenerate-pair part of the velocity V, the displacement is
/// <X>(t) + t <D>, and i[H, X] = V - D.
struct PositionGenerator {
    Matrix4 oscillating = Matrix4::Zero();
    Matrix4 drift = Matrix4::Zero();
};

inline PositionGenerator position_generator(const Matrix4& velocity, const EigenSystem& eig,
                                            double degeneracy_tol = 1e-12)
{
    PositionGenerator g;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const cplx vij = matrix_element(velocity, eig.spinors[i], eig.spinors[j]);
            const Matrix4 proj = eig.spinors[i] * eig.spinors[j].adjoint();
            const double gap = eig.energies[i] - eig.energies[j];
            if (std::abs(gap) <= degeneracy_tol)
                g.drift += vij * proj;
            else
                g.oscillating += (vij / cplx(0.0, gap)) * proj;
        }
    }
    return g;
}

/// Brute-force expectation series: every mode is evolved exactly from t = 0
/// to each sample time and contracted with the full 4x4 operator.
inline TimeSeries expectation_series(const Wavepacket& wp, Observable obs, const std::vector<double>& t_grid,
                                     double r0 = 0.0)
{
    require_uniform(t_grid);
    TimeSeries ts;
    ts.times = t_grid;
    ts.values.assign(t_grid.size(), is_position(obs) ? r0 : 0.0);
    ts.observable = std::string(tag(obs));
    const Matrix4& op = observable_matrix(obs);

    for (std::size_t k = 0; k < wp.size(); ++k) {
        const double p = wp.momenta[k];
        const EigenSystem eig = eigensystem_numeric(p, wp.cfg);
        const ModeState start{p, compose(eig, wp.coeffs[k]), 0.0};
        PositionGenerator gen;
        if (is_position(obs)) gen = position_generator(op, eig);
        for (std::size_t n = 0; n < t_grid.size(); ++n) {
            const Spinor psi = evolve_mode(start, t_grid[n], eig).spinor;
            cplx v;
            if (is_position(obs))
                v = matrix_element(gen.oscillating, psi, psi) + t_grid[n] * matrix_element(gen.drift, psi, psi);
            else
                v = matrix_element(op, psi, psi);
            ts.imag_residue = std::max(ts.imag_residue, std::abs(v.imag()));
            ts.values[n] += wp.weights[k] * v.real();
        }
    }
    return ts;
}

struct ConservationReport {
    double norm_drift = 0.0;
    double energy_drift = 0.0;
    double spin_x_drift = 0.0;
    std::array<double, 4> population_drift{};

    double max_drift() const
    {
        double m = std::max({norm_drift, energy_drift, spin_x_drift});
        for (double d : population_drift) m = std::max(m, d);
        return m;
    }
};

/// Tracks norm, <H>, <S_x> and the (branch, spin) populations along an
/// oracle evolution. Populations are measured against the closed-form
/// eigenspinors, not the numeric ones used for propagation.
inline ConservationReport conservation_check(const Wavepacket& wp, const std::vector<double>& t_grid)
{
    require_uniform(t_grid);
    const std::size_t n_t = t_grid.size();
    std::vector<double> norm(n_t, 0.0), energy(n_t, 0.0), sx(n_t, 0.0);
    std::vector<std::array<double, 4>> pop(n_t, std::array<double, 4>{});
    const auto& ops = operators();

    for (std::size_t k = 0; k < wp.size(); ++k) {
        const double p = wp.momenta[k];
        const double w = wp.weights[k];
        const Matrix4 h = build_hamiltonian(p, wp.cfg);
        const EigenSystem eig = eigensystem_numeric(h, p, wp.cfg.reduced_delta());
        const EigenSystem ref = eigensystem_analytic(p, wp.cfg);
        const ModeState start{p, compose(eig, wp.coeffs[k]), 0.0};
        for (std::size_t n = 0; n < n_t; ++n) {
            const Spinor psi = evolve_mode(start, t_grid[n], eig).spinor;
            norm[n] += w * psi.squaredNorm();
            energy[n] += w * matrix_element(h, psi, psi).real();
            sx[n] += w * matrix_element(ops.spin_x, psi, psi).real();
            for (std::size_t i = 0; i < 4; ++i) pop[n][i] += w * std::norm(ref.spinors[i].dot(psi));
        }
    }

    auto drift = [](const std::vector<double>& v) {
        double d = 0.0;
        for (double x : v) d = std::max(d, std::abs(x - v.front()));
        return d;
    };
    ConservationReport r;
    r.norm_drift = drift(norm);
    r.energy_drift = drift(energy);
    r.spin_x_drift = drift(sx);
    for (std::size_t i = 0; i < 4; ++i) {
        std::vector<double> col(n_t);
        for (std::size_t n = 0; n < n_t; ++n) col[n] = pop[n][i];
        r.population_drift[i] = drift(col);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Closed-form series built from labeled eigenstates.

/// One oscillating contribution 2 Re[coefficient * exp(i omega t)].
struct Tone {
    double omega = 0.0;
    cplx coefficient{};
};

/// Per-mode decomposition of a velocity-like expectation value:
/// constant + sum of tones. Positions integrate this term by term.
struct ModeTerms {
    double constant = 0.0;
    std::vector<Tone> tones;
};

namespace detail {

inline cplx pair_coefficient(const EigenSystem& es, const Mix& c, const Matrix4& op, Branch lb, Spin sb,
                             Branch lk, Spin sk)
{
    const auto i = state_index(lb, sb);
    const auto j = state_index(lk, sk);
    return std::conj(c[i]) * c[j] * matrix_element(op, es.spinors[i], es.spinors[j]);
}

/// Same-branch opposite-spin terms at +-omega_L and opposite-branch
/// opposite-spin terms at omega_zb2.
inline ModeTerms transverse_terms(const EigenSystem& es, const FrequencySet& f, const Mix& c, const Matrix4& op)
{
    ModeTerms t;
    for (Branch l : kBranches)
        t.tones.push_back({sign(l) * f.omega_L, pair_coefficient(es, c, op, l, Spin::up, l, Spin::down)});
    cplx zb{};
    for (Spin s_bra : kSpins)
        for (Spin s_ket : kSpins)
            if (s_bra != s_ket) zb += pair_coefficient(es, c, op, Branch::positive, s_bra, Branch::negative, s_ket);
    t.tones.push_back({f.omega_zb2, zb});
    return t;
}

/// Group velocity sum_{l,s} |c|^2 p / E plus the omega_zb1 (up) and
/// omega_zb3 (down) interference terms.
inline ModeTerms longitudinal_terms(const EigenSystem& es, const FrequencySet& f, const Mix& c, double p)
{
    const auto& ops = operators();
    ModeTerms t;
    for (std::size_t i = 0; i < 4; ++i) t.constant += std::norm(c[i]) * p / es.energies[i];
    t.tones.push_back(
        {f.omega_zb1, pair_coefficient(es, c, ops.alpha_x, Branch::positive, Spin::up, Branch::negative, Spin::up)});
    t.tones.push_back({f.omega_zb3, pair_coefficient(es, c, ops.alpha_x, Branch::positive, Spin::down,
                                                     Branch::negative, Spin::down)});
    return t;
}

inline double spin_x_mode(const EigenSystem& es, const Mix& c)
{
    const auto& ops = operators();
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        s += std::norm(c[i]) * matrix_element(ops.spin_x, es.spinors[i], es.spinors[i]).real();
    return s;
}

inline constexpr double kSecularOmega = 1e-13;

inline double velocity_value(const ModeTerms& m, double t)
{
    double v = m.constant;
    for (const auto& tone : m.tones) v += 2.0 * (tone.coefficient * std::polar(1.0, tone.omega * t)).real();
    return v;
}

/// Antiderivative without integration constant; tones with vanishing
/// frequency become secular.
inline double position_value(const ModeTerms& m, double t)
{
    double r = m.constant * t;
    for (const auto& tone : m.tones) {
        if (std::abs(tone.omega) <= kSecularOmega)
            r += 2.0 * tone.coefficient.real() * t;
        else
            r += 2.0 * (tone.coefficient / cplx(0.0, tone.omega) * std::polar(1.0, tone.omega * t)).real();
    }
    return r;
}

template <class TermsFn>
TimeSeries assemble(const Wavepacket& wp, Observable obs, const std::vector<double>& t_grid, double r0,
                    TermsFn&& terms_of)
{
    require_uniform(t_grid);
    TimeSeries ts;
    ts.times = t_grid;
    ts.values.assign(t_grid.size(), is_position(obs) ? r0 : 0.0);
    ts.observable = std::string(tag(obs));
    for (std::size_t k = 0; k < wp.size(); ++k) {
        const double p = wp.momenta[k];
        const EigenSystem es = eigensystem_analytic(p, wp.cfg);
        const FrequencySet f = frequency_set(p, wp.cfg);
        const ModeTerms m = terms_of(es, f, wp.coeffs[k], p);
        for (std::size_t n = 0; n < t_grid.size(); ++n)
            ts.values[n] += wp.weights[k] * (is_position(obs) ? position_value(m, t_grid[n])
                                                              : velocity_value(m, t_grid[n]));
    }
    return ts;
}

inline const Matrix4& transverse_operator(char axis, bool spin)
{
    const auto& ops = operators();
    if (axis == 'y') return spin ? ops.spin_y : ops.alpha_y;
    if (axis == 'z') return spin ? ops.spin_z : ops.alpha_z;
    throw ConfigError("transverse axis must be 'y' or 'z'");
}

} // namespace detail

/// Time-independent <S_x>: sum of weighted populations times helicity/2.
inline double spin_x_constant(const Wavepacket& wp)
{
    double s = 0.0;
    for (std::size_t k = 0; k < wp.size(); ++k)
        s += wp.weights[k] * detail::spin_x_mode(eigensystem_analytic(wp.momenta[k], wp.cfg), wp.coeffs[k]);
    return s;
}

inline TimeSeries transverse_spin_series_analytic(const Wavepacket& wp, char axis, const std::vector<double>& t_grid)
{
    const Matrix4& op = detail::transverse_operator(axis, true);
    const Observable obs = axis == 'y' ? Observable::S_y : Observable::S_z;
    return detail::assemble(wp, obs, t_grid, 0.0, [&](const EigenSystem& es, const FrequencySet& f, const Mix& c,
                                                      double) { return detail::transverse_terms(es, f, c, op); });
}

inline TimeSeries transverse_velocity_series(const Wavepacket& wp, char axis, const std::vector<double>& t_grid)
{
    const Matrix4& op = detail::transverse_operator(axis, false);
    const Observable obs = axis == 'y' ? Observable::alpha_y : Observable::alpha_z;
    return detail::assemble(wp, obs, t_grid, 0.0, [&](const EigenSystem& es, const FrequencySet& f, const Mix& c,
                                                      double) { return detail::transverse_terms(es, f, c, op); });
}

inline TimeSeries transverse_position_series(const Wavepacket& wp, char axis, const std::vector<double>& t_grid,
                                             double r0 = 0.0)
{
    const Matrix4& op = detail::transverse_operator(axis, false);
    const Observable obs = axis == 'y' ? Observable::r_y : Observable::r_z;
    return detail::assemble(wp, obs, t_grid, r0, [&](const EigenSystem& es, const FrequencySet& f, const Mix& c,
                                                     double) { return detail::transverse_terms(es, f, c, op); });
}

inline TimeSeries longitudinal_velocity_series(const Wavepacket& wp, const std::vector<double>& t_grid)
{
    return detail::assemble(wp, Observable::alpha_x, t_grid, 0.0,
                            [](const EigenSystem& es, const FrequencySet& f, const Mix& c, double p) {
                                return detail::longitudinal_terms(es, f, c, p);
                            });
}

/// Position relative to r0: classical drift plus the ZB tones divided by i*omega.
inline TimeSeries longitudinal_position_series(const Wavepacket& wp, const std::vector<double>& t_grid,
                                               double r0 = 0.0)
{
    return detail::assemble(wp, Observable::r_x, t_grid, r0,
                            [](const EigenSystem& es, const FrequencySet& f, const Mix& c, double p) {
                                return detail::longitudinal_terms(es, f, c, p);
                            });
}

inline TimeSeries spin_x_series(const Wavepacket& wp, const std::vector<double>& t_grid)
{
    require_uniform(t_grid);
    TimeSeries ts;
    ts.times = t_grid;
    ts.values.assign(t_grid.size(), spin_x_constant(wp));
    ts.observable = std::string(tag(Observable::S_x));
    return ts;
}

/// Closed-form series for any observable tag.
inline TimeSeries analytic_series(const Wavepacket& wp, Observable obs, const std::vector<double>& t_grid,
                                  double r0 = 0.0)
{
    switch (obs) {
    case Observable::S_x: return spin_x_series(wp, t_grid);
    case Observable::S_y: return transverse_spin_series_analytic(wp, 'y', t_grid);
    case Observable::S_z: return transverse_spin_series_analytic(wp, 'z', t_grid);
    case Observable::alpha_x: return longitudinal_velocity_series(wp, t_grid);
    case Observable::alpha_y: return transverse_velocity_series(wp, 'y', t_grid);
    case Observable::alpha_z: return transverse_velocity_series(wp, 'z', t_grid);
    case Observable::r_x: return longitudinal_position_series(wp, t_grid, r0);
    case Observable::r_y: return transverse_position_series(wp, 'y', t_grid, r0);
    case Observable::r_z: return transverse_position_series(wp, 'z', t_grid, r0);
    }
    throw ConfigError("unknown observable");
}

/// Per-mode tone decomposition used by the closed-form series; lets callers
/// inspect individual tone amplitudes.
inline ModeTerms mode_terms(double p, const Mix& c, const ParticleConfig& cfg, Observable obs)
{
    const EigenSystem es = eigensystem_analytic(p, cfg);
    const FrequencySet f = frequency_set(p, cfg);
    switch (obs) {
    case Observable::S_x: return {detail::spin_x_mode(es, c), {}};
    case Observable::alpha_x:
    case Observable::r_x: return detail::longitudinal_terms(es, f, c, p);
    default: return detail::transverse_terms(es, f, c, observable_matrix(obs));
    }
}

// ---------------------------------------------------------------------------
// Matrix elements of the velocity operator.

/**
 * Longitudinal amplitudes N1, N2 and the transverse velocity matrix
 * elements, each contracted from the labeled eigenspinors and compared with
 * the closed forms in terms of zeta and eta (available for p != 0, where
 * all radicands are positive).
 */
struct AmplitudeSet {
    double p = 0.0;
    double delta = 0.0;

    double n1 = 0.0; // closed form, zero at p = 0
    double n2 = 0.0;
    cplx longitudinal_up{};   // <+,up|alpha_x|-,up>
    cplx longitudinal_down{}; // <+,down|alpha_x|-,down>

    double zeta = 0.0;
    double eta = 0.0;
    bool closed_form_available = false;

    // index 0 -> alpha_y, 1 -> alpha_z
    std::array<cplx, 2> negative_element{};     // <-,down|alpha_j|-,up>
    std::array<cplx, 2> positive_element{};     // <+,up|alpha_j|+,down>
    std::array<cplx, 2> negative_closed_form{}; // zeta term
    std::array<cplx, 2> positive_closed_form{}; // eta term
    std::array<cplx, 2> cross_up_down{};        // <+,up|alpha_j|-,down>
    std::array<cplx, 2> cross_down_up{};        // <+,down|alpha_j|-,up>

    double closed_form_residual = 0.0; // max |spinor - closed form| over all compared elements
    double negative_magnitude = 0.0;   // |<-,down|alpha_y|-,up>|
    double positive_magnitude = 0.0;   // |<+,up|alpha_y|+,down>|
    std::string dominant;              // "negative", "positive" or "equal"
};

inline AmplitudeSet transverse_matrix_elements(double p, const ParticleConfig& cfg)
{
    cfg.validate();
    const auto& ops = operators();
    const EigenSystem es = eigensystem_analytic(p, cfg);
    const FrequencySet f = frequency_set(p, cfg);
    const double d = cfg.reduced_delta();

    AmplitudeSet a;
    a.p = p;
    a.delta = d;

    const double ep_u = es.energy(Branch::positive, Spin::up), em_u = es.energy(Branch::negative, Spin::up);
    const double ep_d = es.energy(Branch::positive, Spin::down), em_d = es.energy(Branch::negative, Spin::down);
    const double e0_u = es.rest_energy_up, e0_d = es.rest_energy_down;

    auto longitudinal_amplitude = [&](double ep, double em, double e0) {
        const double rad = ep * em * (ep + e0) * (em + e0);
        return rad > 0.0 ? e0 * p / std::sqrt(rad) : 0.0;
    };
    a.n1 = longitudinal_amplitude(ep_u, em_u, e0_u);
    a.n2 = longitudinal_amplitude(ep_d, em_d, e0_d);
    a.longitudinal_up = matrix_element(ops.alpha_x, es.spinor(Branch::positive, Spin::up),
                                       es.spinor(Branch::negative, Spin::up));
    a.longitudinal_down = matrix_element(ops.alpha_x, es.spinor(Branch::positive, Spin::down),
                                         es.spinor(Branch::negative, Spin::down));

    const double zeta_rad = em_u * em_d * (em_u + e0_u) * (em_d + e0_d);
    const double eta_rad = ep_u * ep_d * (ep_u + e0_u) * (ep_d + e0_d);
    a.closed_form_available = p != 0.0 && zeta_rad > 0.0 && eta_rad > 0.0;
    a.zeta = zeta_rad > 0.0 ? 2.0 * std::sqrt(zeta_rad) : 0.0;
    a.eta = eta_rad > 0.0 ? 2.0 * std::sqrt(eta_rad) : 0.0;

    const cplx i{0.0, 1.0};
    const std::array<const Matrix4*, 2> alphas{&ops.alpha_y, &ops.alpha_z};
    for (std::size_t j = 0; j < 2; ++j) {
        const Matrix4& op = *alphas[j];
        a.negative_element[j] = matrix_element(op, es.spinor(Branch::negative, Spin::down),
                                               es.spinor(Branch::negative, Spin::up));
        a.positive_element[j] = matrix_element(op, es.spinor(Branch::positive, Spin::up),
                                               es.spinor(Branch::positive, Spin::down));
        a.cross_up_down[j] = matrix_element(op, es.spinor(Branch::positive, Spin::up),
                                            es.spinor(Branch::negative, Spin::down));
        a.cross_down_up[j] = matrix_element(op, es.spinor(Branch::positive, Spin::down),
                                            es.spinor(Branch::negative, Spin::up));
    }

    if (a.closed_form_available) {
        const double neg = p * (f.omega_L - 2.0 * d) / a.zeta;
        const double pos = p * (f.omega_L + 2.0 * d) / a.eta;
        a.negative_closed_form = {neg / i, cplx(neg, 0.0)};
        a.positive_closed_form = {pos / i, cplx(-pos, 0.0)};
        for (std::size_t j = 0; j < 2; ++j) {
            a.closed_form_residual = std::max(a.closed_form_residual,
                                              std::abs(a.negative_element[j] - a.negative_closed_form[j]));
            a.closed_form_residual = std::max(a.closed_form_residual,
                                              std::abs(a.positive_element[j] - a.positive_closed_form[j]));
        }
        a.closed_form_residual = std::max(a.closed_form_residual, std::abs(std::abs(a.longitudinal_up) - std::abs(a.n1)));
        a.closed_form_residual =
            std::max(a.closed_form_residual, std::abs(std::abs(a.longitudinal_down) - std::abs(a.n2)));
    }

    a.negative_magnitude = std::abs(a.negative_element[0]);
    a.positive_magnitude = std::abs(a.positive_element[0]);
    const double scale = std::max({a.negative_magnitude, a.positive_magnitude, 1e-300});
    if (std::abs(a.negative_magnitude - a.positive_magnitude) <= 1e-9 * scale)
        a.dominant = "equal";
    else
        a.dominant = a.negative_magnitude > a.positive_magnitude ? "negative" : "positive";
    return a;
}

} // namespace zb
