#pragma once

#include "zb/dynamics.hpp"
#include "zb/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace zb::test {

inline bool rel_close(double a, double b, double tol)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= tol * scale || (scale == 0.0);
}

/// p in {0, 0.1, ..., 5}.
inline std::vector<double> momentum_grid()
{
    std::vector<double> g;
    for (int i = 0; i <= 50; ++i) g.push_back(0.1 * i);
    return g;
}

/// delta in {0, 0.1, ..., 0.9}.
inline std::vector<double> delta_grid()
{
    std::vector<double> g;
    for (int i = 0; i <= 9; ++i) g.push_back(0.1 * i);
    return g;
}

/// Fourth-order central difference on a uniform grid; interior points only
/// (the two samples at each end are left at zero).
inline std::vector<double> central_derivative(const std::vector<double>& f, double dt)
{
    std::vector<double> d(f.size(), 0.0);
    for (std::size_t n = 2; n + 2 < f.size(); ++n)
        d[n] = (-f[n + 2] + 8.0 * f[n + 1] - 8.0 * f[n - 1] + f[n - 2]) / (12.0 * dt);
    return d;
}

/// Cumulative trapezoidal integral, starting at zero.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double dt)
{
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t n = 1; n < f.size(); ++n) out[n] = out[n - 1] + 0.5 * dt * (f[n] + f[n - 1]);
    return out;
}

// 20 periods of the slowest tone at the packet's central momentum
inline std::vector<double> suite_grid(double p, const ParticleConfig& cfg, std::size_t n = 1024)
{
    const auto f = frequency_set(p, cfg);
    double slow = std::min({f.omega_zb1, f.omega_zb2, f.omega_zb3});
    if (f.omega_L > 1e-9) slow = std::min(slow, f.omega_L);
    return uniform_time_grid(20.0 * 2.0 * std::numbers::pi / slow, n);
}

struct SuitePacket {
    std::string name;
    Wavepacket wp;
    double p0;
};

/// Packets every oracle comparison runs over.
inline std::vector<SuitePacket> suite_packets()
{
    std::vector<SuitePacket> out;
    out.push_back({"default", single_mode(0.5, default_mix(), ParticleConfig::natural(0.4)), 0.5});
    out.push_back({"real_mix", single_mode(0.5, Mix{1, 1, 1, 1}, ParticleConfig::natural(0.4)), 0.5});
    out.push_back({"gaussian16", gaussian_packet(0.5, 0.05, default_mix(), 16, ParticleConfig::natural(0.4)), 0.5});
    out.push_back({"rest_mixed", single_mode(0.0, default_mix(), ParticleConfig::natural(0.4)), 0.0});
    out.push_back({"unsplit", single_mode(0.7, default_mix(), ParticleConfig::natural(0.0)), 0.7});
    out.push_back({"negative_p", single_mode(-1.3, default_mix(), ParticleConfig::natural(0.25)), -1.3});
    out.push_back({"strong", single_mode(2.0, Mix{1, cplx(0.0, 0.3), -0.5, 2.0}, ParticleConfig::natural(0.9)), 2.0});
    out.push_back({"negative_delta", single_mode(0.8, default_mix(), ParticleConfig::natural(-0.3)), 0.8});
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g;
    for (int k = 0; k < 3; ++k) {
        Mix m;
        for (auto& c : m) c = cplx(g(rng), g(rng));
        const double p = 3.0 * std::abs(g(rng));
        out.push_back({"random" + std::to_string(k), single_mode(p, m, ParticleConfig::natural(0.6 * std::abs(g(rng)))),
                       p});
    }
    return out;
}

} // namespace zb::test
