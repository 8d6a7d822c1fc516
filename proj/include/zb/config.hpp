#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace zb {

/// Raised when a configuration or an argument violates a precondition.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class UnitSystem { natural, si };

inline std::string_view to_string(UnitSystem u) { return u == UnitSystem::natural ? "natural" : "si"; }

inline UnitSystem parse_unit_system(std::string_view s)
{
    if (s == "natural") return UnitSystem::natural;
    if (s == "si" || s == "SI") return UnitSystem::si;
    throw ConfigError("unknown unit system '" + std::string(s) + "'");
}

namespace codata {
inline constexpr double c = 299792458.0;                 // m/s
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double neutron_mass = 1.67492749804e-27; // kg
inline constexpr double neutron_mu = -9.6623651e-27;     // J/T
} // namespace codata

/**
 * Physical parameters of a neutral spin-1/2 particle in longitudinal static
 * fields. The splitting is delta = d*E - mu*B, in the energy unit of the
 * chosen system.
 *
 * All numerical routines work in natural units (hbar = c = m = 1); they read
 * the configuration only through reduced_delta(). Quantities in SI are
 * converted at the boundary with the scale factors below.
 */
struct ParticleConfig {
    double mass = 1.0;
    double c = 1.0;
    double hbar = 1.0;
    double mu = 0.0;
    double dmom = 0.0;
    double b_field = 0.0;
    double e_field = 0.0;
    double delta = 0.0;
    UnitSystem units = UnitSystem::natural;

    /// Natural units with the splitting given directly in units of mc^2.
    static ParticleConfig natural(double delta)
    {
        ParticleConfig cfg;
        cfg.delta = delta;
        cfg.validate();
        return cfg;
    }

    /// Splitting derived from dipole moments and fields.
    static ParticleConfig from_fields(double mass, double c, double hbar, double mu, double dmom,
                                      double b_field, double e_field, UnitSystem units)
    {
        ParticleConfig cfg;
        cfg.mass = mass;
        cfg.c = c;
        cfg.hbar = hbar;
        cfg.mu = mu;
        cfg.dmom = dmom;
        cfg.b_field = b_field;
        cfg.e_field = e_field;
        cfg.delta = dmom * e_field - mu * b_field;
        cfg.units = units;
        cfg.validate();
        return cfg;
    }

    double rest_energy() const { return mass * c * c; }

    /// Splitting in units of mc^2.
    double reduced_delta() const { return delta / rest_energy(); }

    // Scale factors from natural to configured units.
    double energy_scale() const { return rest_energy(); }
    double momentum_scale() const { return mass * c; }
    double frequency_scale() const { return rest_energy() / hbar; }
    double time_scale() const { return hbar / rest_energy(); }
    double length_scale() const { return hbar / (mass * c); }

    void validate() const
    {
        if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError("mass must be positive and finite");
        if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("speed of light must be positive and finite");
        if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ConfigError("hbar must be positive and finite");
        if (!std::isfinite(delta)) throw ConfigError("splitting delta must be finite");
        const double fields_delta = dmom * e_field - mu * b_field;
        const bool fields_given = mu != 0.0 || dmom != 0.0 || b_field != 0.0 || e_field != 0.0;
        if (fields_given &&
            std::abs(fields_delta - delta) > 1e-12 * std::max(std::abs(delta), std::abs(fields_delta)))
            throw ConfigError("delta is inconsistent with d*E - mu*B");
        if (!(std::abs(reduced_delta()) < 1.0))
            throw ConfigError("field too strong: |delta| must be below mc^2 (got |delta|/mc^2 = " +
                              std::to_string(std::abs(reduced_delta())) + ")");
    }
};

} // namespace zb
