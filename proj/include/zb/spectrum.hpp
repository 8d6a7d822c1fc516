#pragma once

#include "zb/config.hpp"

#include <cmath>
#include <vector>

namespace zb {

// Closed-form frequency algebra. Momentum in units of mc, energies in mc^2,
// angular frequencies in mc^2/hbar.

/// All characteristic angular frequencies at one (p, delta) point.
struct FrequencySet {
    double p = 0.0;
    double delta = 0.0;
    double omega_L = 0.0;   // Larmor: (E+up - E+down)
    double omega_zb1 = 0.0; // E+up - E-up
    double omega_zb2 = 0.0; // E+up - E-down
    double omega_zb3 = 0.0; // E+down - E-down
    double omega_sb = 0.0;  // spin beat, zb2 - L
    double omega_ob1 = 0.0; // longitudinal orbital beat, zb1 - zb3 = 2 L
    double omega_ob2 = 0.0; // transverse orbital beat, zb2 - L
    double omega_forbidden = 2.0;
};

struct KinematicsPoint {
    double v = 0.0; // units of c
    double gamma = 1.0;
    double p = 0.0; // units of mc
};

struct SweepRow {
    KinematicsPoint kin;
    double omega_zb_free = 2.0;
    FrequencySet freqs;
};

inline double free_zb_frequency(double p) { return 2.0 * std::hypot(p, 1.0); }

/// Blue shift of the free ZB frequency relative to the rest-frame value 2.
/// Written as 2p^2/(E + 1) to stay accurate for small p.
inline double blue_shift(double p)
{
    const double e = std::hypot(p, 1.0);
    return 2.0 * p * p / (e + 1.0);
}

inline FrequencySet frequency_set(double p, const ParticleConfig& cfg)
{
    cfg.validate();
    const double d = cfg.reduced_delta();
    const double e_up = std::hypot(p, 1.0 + d);
    const double e_down = std::hypot(p, 1.0 - d);
    FrequencySet f;
    f.p = p;
    f.delta = d;
    // (e_up^2 - e_down^2) = 4 delta; avoids cancellation for weak splittings
    f.omega_L = 4.0 * d / (e_up + e_down);
    f.omega_zb1 = 2.0 * e_up;
    f.omega_zb2 = e_up + e_down;
    f.omega_zb3 = 2.0 * e_down;
    f.omega_sb = f.omega_zb2 - f.omega_L;
    f.omega_ob1 = 2.0 * f.omega_L;
    f.omega_ob2 = f.omega_zb2 - f.omega_L;
    f.omega_forbidden = 2.0;
    return f;
}

struct RestFrameLongitudinal {
    double omega_zb1 = 2.0;
    double omega_zb3 = 2.0;
};

inline RestFrameLongitudinal rest_frame_longitudinal(double reduced_delta)
{
    if (!(std::abs(reduced_delta) < 1.0)) throw ConfigError("field too strong: |delta| must be below mc^2");
    return {2.0 + 2.0 * reduced_delta, 2.0 - 2.0 * reduced_delta};
}

/// p = gamma m v, with v in units of c.
inline KinematicsPoint momentum_from_velocity(double v)
{
    if (!(std::abs(v) < 1.0)) throw ConfigError("velocity must satisfy |v| < c");
    KinematicsPoint k;
    k.v = v;
    k.gamma = 1.0 / std::sqrt((1.0 - v) * (1.0 + v));
    k.p = k.gamma * v;
    return k;
}

inline std::vector<double> default_velocity_grid(std::size_t n = 100, double v_max = 0.99)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? 0.0 : v_max * double(i) / double(n - 1);
    return v;
}

inline std::vector<SweepRow> sweep(const std::vector<double>& v_grid, const ParticleConfig& cfg)
{
    std::vector<SweepRow> rows;
    rows.reserve(v_grid.size());
    for (double v : v_grid) {
        SweepRow row;
        row.kin = momentum_from_velocity(v);
        row.omega_zb_free = free_zb_frequency(row.kin.p);
        row.freqs = frequency_set(row.kin.p, cfg);
        rows.push_back(row);
    }
    return rows;
}

} // namespace zb
