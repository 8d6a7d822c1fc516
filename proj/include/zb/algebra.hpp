#pragma once

#include "zb/config.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <string>

namespace zb {

using cplx = std::complex<double>;
using Matrix4 = Eigen::Matrix4cd;
using Spinor = Eigen::Vector4cd;

enum class Branch { positive, negative };
enum class Spin { up, down };

inline constexpr std::array<Branch, 2> kBranches{Branch::positive, Branch::negative};
inline constexpr std::array<Spin, 2> kSpins{Spin::up, Spin::down};

/// Slot of the (branch, spin) label in every 4-element container:
/// 0 = (+,up), 1 = (+,down), 2 = (-,up), 3 = (-,down).
constexpr std::size_t state_index(Branch l, Spin s)
{
    return (l == Branch::positive ? 0u : 2u) + (s == Spin::up ? 0u : 1u);
}
constexpr Branch branch_of(std::size_t i) { return i < 2 ? Branch::positive : Branch::negative; }
constexpr Spin spin_of(std::size_t i) { return i % 2 == 0 ? Spin::up : Spin::down; }
constexpr double sign(Branch l) { return l == Branch::positive ? 1.0 : -1.0; }
constexpr double sign(Spin s) { return s == Spin::up ? 1.0 : -1.0; }

inline std::string label(std::size_t i)
{
    return std::string(branch_of(i) == Branch::positive ? "+" : "-") +
           (spin_of(i) == Spin::up ? "up" : "down");
}

/// Dirac-Pauli representation; spin matrices are S_j = Sigma_j / 2 (hbar = 1).
struct DiracOperatorSet {
    Matrix4 alpha_x, alpha_y, alpha_z;
    Matrix4 beta;
    Matrix4 sigma_x_big, sigma_y_big, sigma_z_big;
    Matrix4 spin_x, spin_y, spin_z;
};

namespace detail {

inline Matrix4 block(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b, const Eigen::Matrix2cd& c,
                     const Eigen::Matrix2cd& d)
{
    Matrix4 m;
    m << a, b, c, d;
    return m;
}

inline Eigen::Matrix2cd pauli(int j)
{
    const cplx i{0.0, 1.0};
    Eigen::Matrix2cd s;
    switch (j) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -i, i, 0; break;
    default: s << 1, 0, 0, -1; break;
    }
    return s;
}

} // namespace detail

inline DiracOperatorSet build_operators()
{
    using detail::block;
    using detail::pauli;
    const Eigen::Matrix2cd z = Eigen::Matrix2cd::Zero();
    DiracOperatorSet ops;
    ops.alpha_x = block(z, pauli(1), pauli(1), z);
    ops.alpha_y = block(z, pauli(2), pauli(2), z);
    ops.alpha_z = block(z, pauli(3), pauli(3), z);
    ops.beta = block(pauli(0), z, z, -pauli(0));
    ops.sigma_x_big = block(pauli(1), z, z, pauli(1));
    ops.sigma_y_big = block(pauli(2), z, z, pauli(2));
    ops.sigma_z_big = block(pauli(3), z, z, pauli(3));
    ops.spin_x = 0.5 * ops.sigma_x_big;
    ops.spin_y = 0.5 * ops.sigma_y_big;
    ops.spin_z = 0.5 * ops.sigma_z_big;
    return ops;
}

/// Shared immutable operator set.
inline const DiracOperatorSet& operators()
{
    static const DiracOperatorSet ops = build_operators();
    return ops;
}

/// H = alpha_x p + beta + 2 beta S_x delta, with p in units of mc and the
/// result in units of mc^2.
inline Matrix4 build_hamiltonian(double p, const ParticleConfig& cfg)
{
    cfg.validate();
    const auto& ops = operators();
    return p * ops.alpha_x + ops.beta + 2.0 * cfg.reduced_delta() * ops.beta * ops.spin_x;
}

inline bool is_hermitian(const Matrix4& m, double tol = 1e-12)
{
    return (m - m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

/// <bra|op|ket>.
template <class Op, class Bra, class Ket>
cplx matrix_element(const Op& op, const Bra& bra, const Ket& ket)
{
    if (op.rows() != bra.size() || op.cols() != ket.size())
        throw ConfigError("matrix_element: dimension mismatch");
    return bra.dot(op * ket);
}

/// Phase convention shared by both diagonalization routes: the first
/// component with magnitude above `threshold` is made real and positive.
inline Spinor fix_phase(const Spinor& v, double threshold = 1e-10)
{
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double mag = std::abs(v[k]);
        if (mag > threshold) return v * (std::conj(v[k]) / mag);
    }
    return v;
}

/// Energies and eigenspinors labeled by (branch, helicity), indexed by state_index().
struct EigenSystem {
    double momentum = 0.0;
    std::array<double, 4> energies{};
    std::array<Spinor, 4> spinors{};
    double rest_energy_up = 1.0;   // mc^2 + delta
    double rest_energy_down = 1.0; // mc^2 - delta

    double energy(Branch l, Spin s) const { return energies[state_index(l, s)]; }
    const Spinor& spinor(Branch l, Spin s) const { return spinors[state_index(l, s)]; }
};

/**
 * Numeric diagonalization of a Hermitian 4x4 Hamiltonian commuting with
 * Sigma_x. Clusters of eigenvalues closer than `degeneracy_tol * ||H||` are
 * co-diagonalized with Sigma_x; every vector is then projected onto its
 * helicity eigenspace to remove rounding-level admixtures. Labels: branch
 * from the sign of the energy, spin from the sign of <Sigma_x>.
 */
inline EigenSystem eigensystem_numeric(const Matrix4& h, double momentum, double reduced_delta,
                                       double degeneracy_tol = 1e-12)
{
    if (!is_hermitian(h)) throw ConfigError("eigensystem_numeric: matrix is not Hermitian");
    const auto& ops = operators();

    Eigen::SelfAdjointEigenSolver<Matrix4> solver(h);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigensystem_numeric: eigensolver failed");
    Eigen::Vector4d evals = solver.eigenvalues();
    Matrix4 evecs = solver.eigenvectors();

    const double scale = std::max(1.0, h.norm());
    int start = 0;
    while (start < 4) {
        int end = start + 1;
        while (end < 4 && evals[end] - evals[end - 1] <= degeneracy_tol * scale) ++end;
        const int n = end - start;
        if (n > 1) {
            const Eigen::MatrixXcd basis = evecs.middleCols(start, n);
            const Eigen::MatrixXcd sub = basis.adjoint() * ops.sigma_x_big * basis;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hel(sub);
            evecs.middleCols(start, n) = basis * hel.eigenvectors();
            const double mean = evals.segment(start, n).mean();
            evals.segment(start, n).setConstant(mean);
        }
        start = end;
    }

    EigenSystem es;
    es.momentum = momentum;
    es.rest_energy_up = 1.0 + reduced_delta;
    es.rest_energy_down = 1.0 - reduced_delta;
    std::array<bool, 4> filled{};
    const Matrix4 id = Matrix4::Identity();
    for (int k = 0; k < 4; ++k) {
        Spinor v = evecs.col(k);
        const double hel = matrix_element(ops.sigma_x_big, v, v).real();
        const Spin s = hel >= 0.0 ? Spin::up : Spin::down;
        const Branch l = evals[k] >= 0.0 ? Branch::positive : Branch::negative;
        v = 0.5 * (id + sign(s) * ops.sigma_x_big) * v;
        v.normalize();
        const auto idx = state_index(l, s);
        if (filled[idx]) throw std::runtime_error("eigensystem_numeric: ambiguous (branch, helicity) labels");
        filled[idx] = true;
        es.energies[idx] = evals[k];
        es.spinors[idx] = fix_phase(v);
    }
    return es;
}

inline EigenSystem eigensystem_numeric(double p, const ParticleConfig& cfg)
{
    return eigensystem_numeric(build_hamiltonian(p, cfg), p, cfg.reduced_delta());
}

/**
 * Closed-form eigensystem. In the helicity-s subspace spanned by
 * (chi_s, 0) and (0, chi_s) the Hamiltonian is the 2x2 block
 * [[M_s, s p], [s p, -M_s]] with M_s = 1 + s delta, so E = +-sqrt(p^2 + M_s^2).
 */
inline EigenSystem eigensystem_analytic(double p, const ParticleConfig& cfg)
{
    cfg.validate();
    const double delta = cfg.reduced_delta();
    EigenSystem es;
    es.momentum = p;
    es.rest_energy_up = 1.0 + delta;
    es.rest_energy_down = 1.0 - delta;

    const double r = 1.0 / std::sqrt(2.0);
    for (Spin s : kSpins) {
        const double hs = sign(s);
        const double m = 1.0 + hs * delta;
        const double q = hs * p;
        const double eps = std::hypot(q, m);
        const double norm = std::sqrt(2.0 * eps * (eps + m));
        // (upper, lower) amplitudes of the 2x2 block eigenvectors
        const double a_pos = (eps + m) / norm, b_pos = q / norm;
        const double a_neg = q / norm, b_neg = -(eps + m) / norm;
        const Eigen::Vector2cd chi(r, hs * r);
        auto assemble = [&](double a, double b) {
            Spinor v;
            v << a * chi, b * chi;
            return fix_phase(v);
        };
        es.energies[state_index(Branch::positive, s)] = eps;
        es.energies[state_index(Branch::negative, s)] = -eps;
        es.spinors[state_index(Branch::positive, s)] = assemble(a_pos, b_pos);
        es.spinors[state_index(Branch::negative, s)] = assemble(a_neg, b_neg);
    }
    return es;
}

} // namespace zb
