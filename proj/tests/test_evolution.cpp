#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "thermospec/evolution.hpp"

using namespace thermospec;

namespace {

constexpr BoundaryKind D = BoundaryKind::dirichlet;
constexpr BoundaryKind N = BoundaryKind::neumann;

Eigen::Matrix3d coefficient_block(double lambda, double gamma) {
  Eigen::Matrix3d a;
  a << 0.0, 1.0, 0.0,
       -lambda, 0.0, -gamma,
       0.0, gamma, -lambda;
  return a;
}

double relative_gap(const Eigen::MatrixXcd& got, const Eigen::MatrixXcd& want) {
  return (got - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff());
}

EnergyTrace synthetic(std::vector<double> energy) {
  EnergyTrace t;
  for (std::size_t i = 0; i < energy.size(); ++i) t.times.push_back(static_cast<double>(i));
  t.energy = std::move(energy);
  return t;
}

}  // namespace

TEST(ModalPropagator, IdentityAtTimeZero) {
  for (const double gamma : {0.0, 1.0, 2.5}) {
    const Eigen::Matrix3cd p = modal_propagator(9.0, gamma, 0.0);
    EXPECT_LE(relative_gap(p, Eigen::Matrix3cd::Identity()), 1e-14);
  }
}

TEST(ModalPropagator, DecoupledClosedForm) {
  const double t = 0.83;
  const Eigen::Matrix3cd p = modal_propagator(4.0, 0.0, t);
  Eigen::Matrix3d expected;
  expected << std::cos(2 * t), std::sin(2 * t) / 2, 0.0,
              -2 * std::sin(2 * t), std::cos(2 * t), 0.0,
              0.0, 0.0, std::exp(-4 * t);
  EXPECT_LE(relative_gap(p, expected.cast<Complex>()), 1e-13);
}

TEST(ModalPropagator, AgreesWithTaylorOracle) {
  for (const double lambda : {1.0, 4.0, 25.0}) {
    for (const double gamma : {0.5, 1.0, 2.0}) {
      for (const double t : {0.1, 1.0, 5.0}) {
        const Eigen::MatrixXd ref = oracle::expm_taylor(t * coefficient_block(lambda, gamma));
        EXPECT_LE(relative_gap(modal_propagator(lambda, gamma, t), ref.cast<Complex>()), 1e-12)
            << "lambda=" << lambda << " gamma=" << gamma << " t=" << t;
      }
    }
  }
}

TEST(ModalPropagator, RejectsBadArguments) {
  EXPECT_THROW(modal_propagator(0.0, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(modal_propagator(1.0, 1.0, -0.5), InvalidArgument);
}

TEST(BlockExponential, NilpotentBlockFallsBack) {
  Eigen::Matrix3d nil = Eigen::Matrix3d::Zero();
  nil(0, 1) = 1.0;
  const BlockExponential e(nil);
  EXPECT_TRUE(e.defective());
  Eigen::Matrix3d expected = Eigen::Matrix3d::Identity();
  expected(0, 1) = 2.5;
  EXPECT_LE(relative_gap(e.at(2.5), expected.cast<Complex>()), 1e-14);
}

TEST(BlockExponential, CriticalDampingMatchesOracle) {
  // s^2 + 2s + 1: a repeated eigenvalue -1 with a single eigenvector.
  Eigen::Matrix3d block;
  block << 0.0, 1.0, 0.0,
           -1.0, -2.0, 0.0,
           0.0, 0.0, -3.0;
  const BlockExponential e(block);
  for (const double t : {0.5, 2.0}) {
    const Eigen::MatrixXd ref = oracle::expm_taylor(t * block);
    EXPECT_LE(relative_gap(e.at(t), ref.cast<Complex>()), 1e-10);
  }
}

TEST(Propagator, ZeroInitialDataStaysZero) {
  const CoupledGenerator gen(D, N, Coupling::symmetric(1.0), 8);
  const EnergyTrace trace = evolve(gen, StateVector::zero(8), linear_grid(0.0, 5.0, 11));
  for (const double e : trace.energy) EXPECT_EQ(e, 0.0);
  EXPECT_EQ(strong_stability_report(trace).terminal_ratio, 0.0);
}

TEST(Propagator, DecoupledHeatModeDecaysExponentially) {
  const CoupledGenerator gen(N, N, Coupling::symmetric(0.0), 4);
  const StateVector s = single_mode_state(gen, StateBlock::theta, 2);
  const std::vector<double> times = {0.0, 0.1, 0.5, 1.0};
  const EnergyTrace trace = evolve(gen, s, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_NEAR(trace.energy[i], std::exp(-8.0 * times[i]), 1e-14);
  }
}

TEST(Propagator, MatchesRungeKuttaOracle) {
  for (const auto& [bu, bt] : std::vector<std::pair<BoundaryKind, BoundaryKind>>{
           {D, D}, {D, N}, {N, D}}) {
    const CoupledGenerator gen(bu, bt, Coupling::symmetric(1.0), 6);
    const StateVector s = random_state(gen, 3, 1.0, true);
    const Eigen::VectorXcd y0 = gen.to_weighted(s);
    std::vector<double> x(y0.size());
    for (Eigen::Index i = 0; i < y0.size(); ++i) x[i] = y0(i).real();
    const std::vector<double> ref = oracle::integrate_linear(gen.euclidean_matrix(), x, 2.0);
    const Eigen::VectorXcd y = Propagator(gen).weighted(y0, 2.0);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      EXPECT_NEAR(y(i).real(), ref[i], 1e-8);
      EXPECT_NEAR(y(i).imag(), 0.0, 1e-10);
    }
  }
}

TEST(Propagator, SemigroupProperty) {
  for (const auto& [bu, bt] : std::vector<std::pair<BoundaryKind, BoundaryKind>>{
           {D, D}, {N, D}}) {
    const CoupledGenerator gen(bu, bt, Coupling::symmetric(1.0), 16);
    const Propagator p(gen);
    const StateVector s = random_state(gen, 4, 1.0);
    const Eigen::VectorXcd direct = p(s, 2.0).stacked();
    const Eigen::VectorXcd composed = p(p(s, 0.7), 1.3).stacked();
    EXPECT_LE((direct - composed).norm(), 1e-10 * s.stacked().norm());
  }
}

TEST(Propagator, EnergyRateEqualsThermalDissipation) {
  const CoupledGenerator gen(D, N, Coupling::symmetric(1.0), 10);
  const Propagator p(gen);
  const StateVector s = random_state(gen, 8, 1.0);
  const double t = 1.0;
  const double h = 1e-4;
  const Eigen::VectorXcd y0 = gen.to_weighted(s);
  const auto e = p.energies(y0, {t - h, t + h});
  const double rate = (e[1] - e[0]) / (2 * h);
  const double expected = -2.0 * thermal_dissipation(gen, p(s, t));
  EXPECT_NEAR(rate, expected, 1e-6 * std::abs(expected));
}

TEST(Propagator, DenseAgreesWithModal) {
  const CoupledGenerator gen(D, D, Coupling::symmetric(1.0), 24);
  const Propagator modal(gen, EvolveMethod::modal);
  const Propagator dense(gen, EvolveMethod::dense);
  EXPECT_TRUE(modal.modal());
  EXPECT_FALSE(dense.modal());
  const StateVector s = random_state(gen, 12, 1.0);
  for (const double t : {0.0, 0.5, 3.0, 20.0}) {
    const Eigen::VectorXcd a = modal(s, t).stacked();
    const Eigen::VectorXcd b = dense(s, t).stacked();
    EXPECT_LE((a - b).norm(), 1e-10 * s.stacked().norm()) << "t=" << t;
  }
}

TEST(Propagator, ModalMethodNeedsMatchingBases) {
  const CoupledGenerator gen(D, N, Coupling::symmetric(1.0), 4);
  EXPECT_THROW(Propagator(gen, EvolveMethod::modal), InvalidArgument);
  EXPECT_THROW(Propagator(gen).weighted(Eigen::VectorXcd::Zero(12), -1.0), InvalidArgument);
}

TEST(Evolve, EnergyIsNonIncreasingForAllPairs) {
  for (const auto& [bu, bt] : std::vector<std::pair<BoundaryKind, BoundaryKind>>{
           {D, D}, {N, N}, {D, N}, {N, D}}) {
    const CoupledGenerator gen(bu, bt, Coupling::symmetric(1.0), 32);
    const EnergyTrace trace = evolve(gen, random_state(gen, 2024, 1.0), linear_grid(0, 50, 101));
    const StrongStabilityReport r = strong_stability_report(trace);
    EXPECT_TRUE(r.monotone);
    EXPECT_LT(r.terminal_ratio, 0.1);
    EXPECT_NEAR(trace.energy[0], energy_norm_sq(gen, random_state(gen, 2024, 1.0)), 1e-12);
  }
}

TEST(Evolve, RejectsBadTimeGrids) {
  const CoupledGenerator gen(D, D, Coupling::symmetric(1.0), 4);
  const StateVector s = power_law_state(gen, 1.0);
  EXPECT_THROW(evolve(gen, s, {}), InvalidArgument);
  EXPECT_THROW(evolve(gen, s, {-1.0, 1.0}), InvalidArgument);
  EXPECT_THROW(evolve(gen, s, {0.0, 1.0, 1.0}), InvalidArgument);
  EXPECT_THROW(evolve(gen, StateVector::zero(3), {0.0}), InvalidArgument);
}

TEST(StrongStability, ReportExamples) {
  const auto falling = strong_stability_report(synthetic({4.0, 3.0, 2.0}));
  EXPECT_TRUE(falling.monotone);
  EXPECT_DOUBLE_EQ(falling.terminal_ratio, 0.5);
  EXPECT_FALSE(strong_stability_report(synthetic({1.0, 2.0})).monotone);
  EXPECT_TRUE(strong_stability_report(synthetic({1.0, 1.0 + 1e-13})).monotone);
  EXPECT_THROW(strong_stability_report(EnergyTrace{}), InvalidArgument);
}

TEST(Grids, LinearAndLogarithmic) {
  EXPECT_EQ(linear_grid(0.0, 1.0, 3), (std::vector<double>{0.0, 0.5, 1.0}));
  const auto g = log_grid(1.0, 100.0, 3);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 1.0);
  EXPECT_NEAR(g[2], 10.0, 1e-12);
  EXPECT_EQ(g[3], 100.0);
  EXPECT_EQ(log_grid(1.0, 100.0, 3, false).size(), 3u);
  EXPECT_THROW(linear_grid(1.0, 1.0, 5), InvalidArgument);
  EXPECT_THROW(linear_grid(0.0, 1.0, 1), InvalidArgument);
  EXPECT_THROW(log_grid(0.0, 1.0, 5), InvalidArgument);
}

TEST(InitialData, BuildersAndErrors) {
  const CoupledGenerator gen(D, D, Coupling::symmetric(1.0), 4);
  const StateVector p = power_law_state(gen, 2.0);
  EXPECT_NEAR(p.v(2).real(), 1.0 / 9.0, 1e-15);
  EXPECT_EQ(p.u.norm(), 0.0);
  EXPECT_THROW(single_mode_state(gen, StateBlock::v, 0), InvalidArgument);
  EXPECT_THROW(single_mode_state(gen, StateBlock::v, 5), InvalidArgument);
  EXPECT_EQ(single_mode_state(gen, StateBlock::u, 4).u(3), Complex(1.0));
  const StateVector a = random_state(gen, 77);
  const StateVector b = random_state(gen, 77);
  EXPECT_EQ(a.stacked(), b.stacked());
  EXPECT_NE(a.stacked(), random_state(gen, 78).stacked());
  EXPECT_EQ(random_state(gen, 5, 0.0, true).stacked().imag().norm(), 0.0);
}
