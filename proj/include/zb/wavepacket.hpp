#pragma once

#include "zb/algebra.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace zb {

/// Branch/spin amplitudes in state_index() order: (+up, +down, -up, -down).
using Mix = std::array<cplx, 4>;

/// Equal-magnitude four-way mix. The (-,up) amplitude carries a relative
/// phase i; with all four amplitudes real and equal the Larmor tone of
/// <S_z>, <alpha_y>, <r_y> and the spin-ZB tone of <S_y> cancel exactly.
inline Mix default_mix()
{
    return {cplx{0.5, 0.0}, cplx{0.5, 0.0}, cplx{0.0, 0.5}, cplx{0.5, 0.0}};
}

/**
 * Superposition of labeled plane-wave eigenstates on a momentum grid.
 * Expectation values are weighted sums over modes,
 * <O> = sum_k w_k <psi_k|O|psi_k>, with psi_k = sum_i c_{k,i} |v_i(p_k)>.
 */
struct Wavepacket {
    std::vector<double> momenta;
    std::vector<double> weights;
    std::vector<Mix> coeffs;
    ParticleConfig cfg;

    std::size_t size() const { return momenta.size(); }
};

struct WavepacketDiagnostics {
    double normalization_residual = 0.0;
    bool grid_increasing = true;
    bool weights_positive = true;
    std::array<double, 4> occupancy{};
};

inline double mix_norm2(const Mix& m)
{
    double s = 0.0;
    for (const auto& c : m) s += std::norm(c);
    return s;
}

namespace detail {

inline void normalize(Wavepacket& wp)
{
    double total = 0.0;
    for (std::size_t k = 0; k < wp.size(); ++k) total += wp.weights[k] * mix_norm2(wp.coeffs[k]);
    if (!(total > 0.0)) throw ConfigError("wavepacket has zero norm");
    const double f = 1.0 / std::sqrt(total);
    for (auto& m : wp.coeffs)
        for (auto& c : m) c *= f;
}

} // namespace detail

inline Wavepacket single_mode(double p, const Mix& mix, const ParticleConfig& cfg)
{
    cfg.validate();
    if (!(mix_norm2(mix) > 0.0)) throw ConfigError("mix vector must not be zero");
    Wavepacket wp;
    wp.momenta = {p};
    wp.weights = {1.0};
    wp.coeffs = {mix};
    wp.cfg = cfg;
    detail::normalize(wp);
    return wp;
}

/// Gaussian momentum packet, c_k ~ mix * exp(-(p_k - p0)^2 / (4 sigma^2)),
/// on a uniform grid spanning p0 +- 5 sigma with trapezoidal weights.
inline Wavepacket gaussian_packet(double p0, double sigma_p, const Mix& mix, std::size_t n_modes,
                                  const ParticleConfig& cfg)
{
    if (!(sigma_p > 0.0)) throw ConfigError("sigma_p must be positive");
    if (n_modes < 1) throw ConfigError("n_modes must be at least 1");
    if (n_modes == 1) return single_mode(p0, mix, cfg);
    cfg.validate();
    if (!(mix_norm2(mix) > 0.0)) throw ConfigError("mix vector must not be zero");

    Wavepacket wp;
    wp.cfg = cfg;
    const double lo = p0 - 5.0 * sigma_p;
    const double h = 10.0 * sigma_p / double(n_modes - 1);
    for (std::size_t k = 0; k < n_modes; ++k) {
        const double p = lo + h * double(k);
        const double w = (k == 0 || k + 1 == n_modes) ? 0.5 * h : h;
        const double x = (p - p0) / sigma_p;
        const double env = std::exp(-0.25 * x * x);
        Mix m;
        for (std::size_t i = 0; i < 4; ++i) m[i] = mix[i] * env;
        wp.momenta.push_back(p);
        wp.weights.push_back(w);
        wp.coeffs.push_back(m);
    }
    detail::normalize(wp);
    return wp;
}

inline WavepacketDiagnostics validate(const Wavepacket& wp)
{
    WavepacketDiagnostics d;
    if (wp.weights.size() != wp.size() || wp.coeffs.size() != wp.size())
        throw ConfigError("wavepacket arrays have inconsistent lengths");
    double total = 0.0;
    for (std::size_t k = 0; k < wp.size(); ++k) {
        if (k > 0 && !(wp.momenta[k] > wp.momenta[k - 1])) d.grid_increasing = false;
        if (!(wp.weights[k] > 0.0)) d.weights_positive = false;
        for (std::size_t i = 0; i < 4; ++i) {
            const double occ = wp.weights[k] * std::norm(wp.coeffs[k][i]);
            d.occupancy[i] += occ;
            total += occ;
        }
    }
    d.normalization_residual = std::abs(total - 1.0);
    if (total > 0.0)
        for (auto& o : d.occupancy) o /= total;
    return d;
}

inline double mean_momentum(const Wavepacket& wp)
{
    double s = 0.0;
    for (std::size_t k = 0; k < wp.size(); ++k) s += wp.weights[k] * mix_norm2(wp.coeffs[k]) * wp.momenta[k];
    return s;
}

} // namespace zb
