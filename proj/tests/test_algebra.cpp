#include "zb/algebra.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace zb;
using zb::test::rel_close;

namespace {

const cplx I{0.0, 1.0};

double max_abs(const Matrix4& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST(Operators, StandardRepresentation)
{
    const auto& ops = operators();
    Matrix4 beta = Matrix4::Zero();
    beta.diagonal() << 1, 1, -1, -1;
    EXPECT_EQ(max_abs(ops.beta - beta), 0.0);
    EXPECT_EQ(max_abs(ops.alpha_x * ops.alpha_x - Matrix4::Identity()), 0.0);
}

TEST(Operators, CliffordAlgebraAndHermiticity)
{
    const auto& ops = operators();
    const std::array<const Matrix4*, 3> alpha{&ops.alpha_x, &ops.alpha_y, &ops.alpha_z};
    const Matrix4 id = Matrix4::Identity();
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            const Matrix4 anti = *alpha[i] * *alpha[j] + *alpha[j] * *alpha[i];
            EXPECT_LE(max_abs(anti - (i == j ? 2.0 : 0.0) * id), 1e-15);
        }
        EXPECT_LE(max_abs(*alpha[i] * ops.beta + ops.beta * *alpha[i]), 1e-15);
        EXPECT_LE(max_abs(*alpha[i] - alpha[i]->adjoint()), 0.0);
    }
    EXPECT_LE(max_abs(ops.beta * ops.beta - id), 1e-15);
    for (const Matrix4* m : {&ops.beta, &ops.sigma_x_big, &ops.spin_x, &ops.spin_y, &ops.spin_z})
        EXPECT_LE(max_abs(*m - m->adjoint()), 0.0);
}

TEST(Operators, HelicityCommutesWithModelTerms)
{
    const auto& ops = operators();
    auto comm = [](const Matrix4& a, const Matrix4& b) { return a * b - b * a; };
    EXPECT_LE(max_abs(comm(ops.sigma_x_big, ops.alpha_x)), 1e-15);
    EXPECT_LE(max_abs(comm(ops.sigma_x_big, ops.beta)), 1e-15);
    EXPECT_LE(max_abs(comm(ops.sigma_x_big, ops.beta * ops.sigma_x_big)), 1e-15);
    // spin matrices are half the big Sigma and obey [S_y, S_z] = i S_x
    EXPECT_LE(max_abs(comm(ops.spin_y, ops.spin_z) - I * ops.spin_x), 1e-15);
}

TEST(Operators, HelicityEigenvalues)
{
    Eigen::SelfAdjointEigenSolver<Matrix4> es(operators().sigma_x_big);
    const Eigen::Vector4d ev = es.eigenvalues();
    EXPECT_NEAR(ev[0], -1.0, 1e-14);
    EXPECT_NEAR(ev[1], -1.0, 1e-14);
    EXPECT_NEAR(ev[2], 1.0, 1e-14);
    EXPECT_NEAR(ev[3], 1.0, 1e-14);
}

TEST(Hamiltonian, RestFrameFreeParticleIsBeta)
{
    const Matrix4 h = build_hamiltonian(0.0, ParticleConfig::natural(0.0));
    EXPECT_EQ(max_abs(h - operators().beta), 0.0);
}

TEST(Hamiltonian, SplitSpectrumAtFigureParameters)
{
    const Matrix4 h = build_hamiltonian(0.5, ParticleConfig::natural(0.4));
    EXPECT_TRUE(is_hermitian(h, 0.0));
    Eigen::SelfAdjointEigenSolver<Matrix4> es(h);
    const Eigen::Vector4d ev = es.eigenvalues();
    // sqrt(2.21), sqrt(0.61) from an independent numeric diagonalization
    EXPECT_NEAR(ev[0], -1.4866068747318506, 1e-13);
    EXPECT_NEAR(ev[1], -0.7810249675906654, 1e-13);
    EXPECT_NEAR(ev[2], 0.7810249675906654, 1e-13);
    EXPECT_NEAR(ev[3], 1.4866068747318506, 1e-13);
}

TEST(Hamiltonian, FreeParticleDoublyDegenerate)
{
    Eigen::SelfAdjointEigenSolver<Matrix4> es(build_hamiltonian(1.0, ParticleConfig::natural(0.0)));
    const Eigen::Vector4d ev = es.eigenvalues();
    EXPECT_NEAR(ev[0], -std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(ev[1], -std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(ev[2], std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(ev[3], std::sqrt(2.0), 1e-14);
}

TEST(Hamiltonian, CommutesWithHelicity)
{
    const auto& sx = operators().sigma_x_big;
    for (double p : {0.0, 0.3, 2.5, -1.7})
        for (double d : {0.0, 0.4, -0.7}) {
            const Matrix4 h = build_hamiltonian(p, ParticleConfig::natural(d));
            EXPECT_LE(max_abs(h * sx - sx * h), 1e-14);
        }
}

TEST(Hamiltonian, RejectsInvalidConfig)
{
    ParticleConfig cfg;
    cfg.delta = 1.2;
    EXPECT_THROW(build_hamiltonian(0.5, cfg), ConfigError);
    EXPECT_THROW(ParticleConfig::natural(-1.0), ConfigError);
    cfg.delta = 0.2;
    cfg.mass = 0.0;
    EXPECT_THROW(build_hamiltonian(0.5, cfg), ConfigError);
}

TEST(Config, FieldsDetermineSplitting)
{
    // delta = d E - mu B
    const auto cfg = ParticleConfig::from_fields(1.0, 1.0, 1.0, -0.1, 0.05, 2.0, 3.0, UnitSystem::natural);
    EXPECT_DOUBLE_EQ(cfg.delta, 0.05 * 3.0 + 0.1 * 2.0);
    ParticleConfig bad = cfg;
    bad.delta = 0.1;
    EXPECT_THROW(bad.validate(), ConfigError);
    EXPECT_THROW(ParticleConfig::from_fields(1.0, 1.0, 1.0, -1.0, 0.0, 1.0, 0.0, UnitSystem::natural), ConfigError);
}

TEST(Config, SIScalesToNatural)
{
    const auto cfg = ParticleConfig::from_fields(codata::neutron_mass, codata::c, codata::hbar, codata::neutron_mu,
                                                 0.0, 5.0, 0.0, UnitSystem::si);
    EXPECT_NEAR(cfg.reduced_delta(), -codata::neutron_mu * 5.0 / cfg.rest_energy(), 1e-30);
    EXPECT_GT(cfg.reduced_delta(), 0.0);
    EXPECT_NEAR(cfg.frequency_scale() * cfg.time_scale(), 1.0, 1e-15);
}

// Invariants of both diagonalization routes on the (p, delta) grid.
class EigenGrid : public ::testing::TestWithParam<double> {};

TEST_P(EigenGrid, NumericEigensystemInvariants)
{
    const double d = GetParam();
    const auto cfg = ParticleConfig::natural(d);
    const auto& sx = operators().sigma_x_big;
    for (double p : zb::test::momentum_grid()) {
        const Matrix4 h = build_hamiltonian(p, cfg);
        const EigenSystem es = eigensystem_numeric(h, p, d);
        Matrix4 v;
        for (std::size_t i = 0; i < 4; ++i) v.col(Eigen::Index(i)) = es.spinors[i];
        EXPECT_LE(max_abs(v.adjoint() * v - Matrix4::Identity()), 1e-12) << "p=" << p;
        EXPECT_LE(max_abs(v * v.adjoint() - Matrix4::Identity()), 1e-12) << "completeness p=" << p;
        for (std::size_t i = 0; i < 4; ++i) {
            const Spinor& s = es.spinors[i];
            EXPECT_LE((h * s - es.energies[i] * s).norm(), 1e-12 * h.norm());
            EXPECT_NEAR(matrix_element(sx, s, s).real(), sign(spin_of(i)), 1e-10);
            EXPECT_EQ(es.energies[i] > 0.0, branch_of(i) == Branch::positive);
        }
    }
}

TEST_P(EigenGrid, AnalyticMatchesNumeric)
{
    const double d = GetParam();
    const auto cfg = ParticleConfig::natural(d);
    for (double p : zb::test::momentum_grid()) {
        const EigenSystem num = eigensystem_numeric(p, cfg);
        const EigenSystem ana = eigensystem_analytic(p, cfg);
        for (std::size_t i = 0; i < 4; ++i) {
            EXPECT_TRUE(rel_close(num.energies[i], ana.energies[i], 1e-12)) << label(i) << " p=" << p;
            EXPECT_NEAR(std::abs(num.spinors[i].dot(ana.spinors[i])), 1.0, 1e-10);
            // same phase convention on both routes
            EXPECT_LE((num.spinors[i] - ana.spinors[i]).norm(), 1e-10) << label(i) << " p=" << p << " d=" << d;
        }
        EXPECT_DOUBLE_EQ(ana.energy(Branch::positive, Spin::up), std::sqrt(p * p + (1 + d) * (1 + d)));
        EXPECT_DOUBLE_EQ(ana.energy(Branch::negative, Spin::down), -std::sqrt(p * p + (1 - d) * (1 - d)));
    }
}

TEST_P(EigenGrid, BlockDiagonalInHelicityBasis)
{
    const double d = GetParam();
    // Sigma_x eigenbasis from a numeric solve, ordered (-1, -1, +1, +1)
    Eigen::SelfAdjointEigenSolver<Matrix4> hel(operators().sigma_x_big);
    const Matrix4 u = hel.eigenvectors();
    for (double p : zb::test::momentum_grid()) {
        const Matrix4 hb = u.adjoint() * build_hamiltonian(p, ParticleConfig::natural(d)) * u;
        EXPECT_LE((hb.block<2, 2>(0, 2).norm() + hb.block<2, 2>(2, 0).norm()), 1e-14);
    }
}

INSTANTIATE_TEST_SUITE_P(DeltaGrid, EigenGrid, ::testing::ValuesIn(zb::test::delta_grid()));

TEST(EigenSystem, RestFrameEnergies)
{
    const auto es = eigensystem_analytic(0.0, ParticleConfig::natural(0.4));
    EXPECT_DOUBLE_EQ(es.energy(Branch::positive, Spin::up), 1.4);
    EXPECT_DOUBLE_EQ(es.energy(Branch::positive, Spin::down), 0.6);
    EXPECT_DOUBLE_EQ(es.rest_energy_up, 1.4);
    EXPECT_DOUBLE_EQ(es.rest_energy_down, 0.6);
    const auto free = eigensystem_numeric(0.0, ParticleConfig::natural(0.0));
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(free.energies[i]), 1.0, 1e-15);
    EXPECT_NEAR(eigensystem_analytic(0.5, ParticleConfig::natural(0.4)).energy(Branch::positive, Spin::up),
                1.4866068747318506, 1e-15);
}

TEST(EigenSystem, NegativeMomentumAndSplitting)
{
    for (double p : {-0.1, -2.0})
        for (double d : {-0.6, 0.3}) {
            const auto cfg = ParticleConfig::natural(d);
            const auto num = eigensystem_numeric(p, cfg);
            const auto ana = eigensystem_analytic(p, cfg);
            for (std::size_t i = 0; i < 4; ++i) {
                EXPECT_TRUE(rel_close(num.energies[i], ana.energies[i], 1e-12));
                EXPECT_LE((num.spinors[i] - ana.spinors[i]).norm(), 1e-10);
            }
        }
}

TEST(EigenSystem, NearDegenerateSplittingKeepsHelicityLabels)
{
    const auto& sx = operators().sigma_x_big;
    for (double d : {1e-9, 1e-13, 1e-16}) {
        const auto cfg = ParticleConfig::natural(d);
        const Matrix4 h = build_hamiltonian(0.7, cfg);
        const auto es = eigensystem_numeric(h, 0.7, d);
        for (std::size_t i = 0; i < 4; ++i) {
            EXPECT_NEAR(matrix_element(sx, es.spinors[i], es.spinors[i]).real(), sign(spin_of(i)), 1e-10);
            EXPECT_LE((h * es.spinors[i] - es.energies[i] * es.spinors[i]).norm(), 1e-12 * h.norm());
        }
    }
}

TEST(EigenSystem, RejectsNonHermitian)
{
    Matrix4 h = build_hamiltonian(0.5, ParticleConfig::natural(0.4));
    h(0, 3) += cplx(0.0, 0.5);
    EXPECT_THROW(eigensystem_numeric(h, 0.5, 0.4), ConfigError);
}

TEST(MatrixElement, HelicityEigenvalueAndConjugateSymmetry)
{
    const auto& ops = operators();
    const auto es = eigensystem_analytic(0.5, ParticleConfig::natural(0.4));
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(matrix_element(ops.sigma_x_big, es.spinors[i], es.spinors[i]).real(), sign(spin_of(i)), 1e-14);
        for (std::size_t j = 0; j < 4; ++j)
            for (const Matrix4* op : {&ops.alpha_y, &ops.alpha_z, &ops.spin_y, &ops.beta}) {
                const cplx ab = matrix_element(*op, es.spinors[i], es.spinors[j]);
                const cplx ba = matrix_element(*op, es.spinors[j], es.spinors[i]);
                EXPECT_LE(std::abs(ab - std::conj(ba)), 1e-15);
            }
    }
}

TEST(MatrixElement, TransverseSameBranchVanishesAtRest)
{
    const auto es = eigensystem_analytic(0.0, ParticleConfig::natural(0.4));
    const cplx m = matrix_element(operators().alpha_y, es.spinor(Branch::negative, Spin::down),
                                  es.spinor(Branch::negative, Spin::up));
    EXPECT_EQ(std::abs(m), 0.0);
}

TEST(MatrixElement, NegativeBranchTransverseElementClosedForm)
{
    // Closed form p (omega_L - 2 delta) / (i zeta), evaluated from the energies.
    const double p = 0.5, d = 0.4;
    const double eu = std::sqrt(p * p + (1 + d) * (1 + d)), ed = std::sqrt(p * p + (1 - d) * (1 - d));
    const double zeta = 2.0 * std::sqrt(eu * ed * (1 + d - eu) * (1 - d - ed));
    const cplx expected = p * ((eu - ed) - 2 * d) / (I * zeta);
    const auto es = eigensystem_numeric(p, ParticleConfig::natural(d));
    const cplx m = matrix_element(operators().alpha_y, es.spinor(Branch::negative, Spin::down),
                                  es.spinor(Branch::negative, Spin::up));
    EXPECT_LE(std::abs(m - expected), 1e-10);
    EXPECT_NEAR(m.imag(), 0.17495214949602111, 1e-12);
}

TEST(MatrixElement, DimensionMismatch)
{
    const Eigen::VectorXcd three = Eigen::VectorXcd::Ones(3);
    const Spinor four = Spinor::Ones();
    EXPECT_THROW(matrix_element(operators().alpha_x, three, four), ConfigError);
}

TEST(MatrixElement, PhaseConventionFirstComponentPositive)
{
    for (double p : {0.0, 0.5, -0.5})
        for (const auto& s : eigensystem_numeric(p, ParticleConfig::natural(0.4)).spinors) {
            Eigen::Index k = 0;
            while (std::abs(s[k]) <= 1e-10) ++k;
            EXPECT_GT(s[k].real(), 0.0);
            EXPECT_NEAR(s[k].imag(), 0.0, 1e-15);
        }
}
