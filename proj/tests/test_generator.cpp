#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "thermospec/evolution.hpp"
#include "thermospec/generator.hpp"

using namespace thermospec;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr BoundaryKind D = BoundaryKind::dirichlet;
constexpr BoundaryKind N = BoundaryKind::neumann;

const std::vector<std::pair<BoundaryKind, BoundaryKind>> kAllPairs = {
    {D, D}, {N, N}, {D, N}, {N, D}};

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<Complex> sorted_eigenvalues(const Eigen::MatrixXd& m) {
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  std::vector<Complex> out(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    return std::abs(a.imag() - b.imag()) > 1e-9 ? a.imag() < b.imag() : a.real() < b.real();
  });
  return out;
}

// d/dx of the normalized sine / cosine modes, written out independently.
double sine_mode_dx(int m, double x, double length) {
  const double k = m * kPi / length;
  return std::sqrt(2.0 / length) * k * std::cos(k * x);
}
double cosine_mode_dx(int m, double x, double length) {
  const double k = m * kPi / length;
  return -std::sqrt(2.0 / length) * k * std::sin(k * x);
}

}  // namespace

TEST(Assemble, DirichletSingleModeMatrix) {
  const CoupledGenerator gen = assemble(D, D, Coupling::symmetric(1.0), 1);
  Eigen::Matrix3d expected;
  expected << 0, 1, 0,
              -1, 0, -1,
              0, 1, -1;
  EXPECT_EQ(max_abs(gen.matrix() - expected), 0.0);
  EXPECT_EQ(gen.dimension(), 3);
  EXPECT_EQ(gen.label(), "DD");
}

TEST(Assemble, MixedBlocksUseGramMatrix) {
  const CoupledGenerator gen = assemble(D, N, Coupling::symmetric(1.0), 2);
  const double g12 = oracle::integrate(
      [](double x) { return oracle::sine_mode(1, x, kPi) * oracle::cosine_mode(2, x, kPi); }, 0, kPi);
  const double g21 = oracle::integrate(
      [](double x) { return oracle::sine_mode(2, x, kPi) * oracle::cosine_mode(1, x, kPi); }, 0, kPi);
  const Eigen::MatrixXd a = gen.matrix();
  // (v, theta) block is -G, (theta, v) block is +G^T.
  EXPECT_NEAR(a(2, 5), -g12, 1e-12);
  EXPECT_NEAR(a(3, 4), -g21, 1e-12);
  EXPECT_NEAR(a(5, 2), g12, 1e-12);
  EXPECT_NEAR(a(4, 3), g21, 1e-12);
  EXPECT_EQ(a(2, 4), 0.0);
  EXPECT_EQ(a(4, 2), 0.0);
  EXPECT_NEAR(a(4, 4), -1.0, 1e-14);
  EXPECT_NEAR(a(5, 5), -4.0, 1e-14);
}

TEST(Assemble, ZeroCouplingIsBlockDiagonal) {
  const CoupledGenerator gen = assemble(D, N, Coupling::symmetric(0.0), 6);
  const Eigen::MatrixXd a = gen.matrix();
  EXPECT_EQ(max_abs(a.block(6, 12, 6, 6)), 0.0);
  EXPECT_EQ(max_abs(a.block(12, 6, 6, 6)), 0.0);
  EXPECT_TRUE(gen.coupling().is_decoupled());
}

TEST(Assemble, RejectsNonFiniteCoupling) {
  EXPECT_THROW(assemble(D, D, Coupling::general(NAN, 1.0), 3), InvalidArgument);
  EXPECT_THROW(assemble(D, D, Coupling::symmetric(INFINITY), 3), InvalidArgument);
  EXPECT_THROW(assemble(D, D, Coupling::symmetric(1.0), 0), InvalidArgument);
}

TEST(Assemble, ModalBlockMatchesDenseSubmatrix) {
  const CoupledGenerator gen = assemble(N, N, Coupling::symmetric(0.7), 5, 2.0);
  const Eigen::MatrixXd a = gen.matrix();
  for (int m = 0; m < 5; ++m) {
    const int idx[3] = {m, 5 + m, 10 + m};
    Eigen::Matrix3d sub;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) sub(i, j) = a(idx[i], idx[j]);
    }
    EXPECT_EQ(max_abs(sub - gen.modal_block(m)), 0.0);
  }
  const CoupledGenerator mixed = assemble(D, N, Coupling::symmetric(1.0), 3);
  EXPECT_THROW(mixed.modal_block(0), InvalidArgument);
}

TEST(Energy, SimpleExamples) {
  const CoupledGenerator one = assemble(D, D, Coupling::symmetric(1.0), 1);
  StateVector s = StateVector::zero(1);
  s.u(0) = 1.0;
  EXPECT_NEAR(energy_norm_sq(one, s), 1.0, 1e-15);

  const CoupledGenerator two = assemble(D, D, Coupling::symmetric(1.0), 2);
  StateVector t = StateVector::zero(2);
  t.u(1) = 2.0;  // lambda_2 |u_2|^2 = 16
  t.v(0) = 3.0;  // 9
  EXPECT_NEAR(energy_norm_sq(two, t), 25.0, 1e-13);
}

TEST(Energy, MatchesPhysicalSpaceIntegral) {
  for (const auto& [bu, bt] : kAllPairs) {
    const double length = 1.7;
    const CoupledGenerator gen = assemble(bu, bt, Coupling::symmetric(1.0), 8, length);
    const StateVector s = random_state(gen, 11, 0.5);
    auto field = [&](const Eigen::VectorXcd& c, BoundaryKind kind, bool derivative, double x) {
      Complex sum = 0.0;
      for (int m = 1; m <= 8; ++m) {
        double phi;
        if (kind == D) {
          phi = derivative ? sine_mode_dx(m, x, length) : oracle::sine_mode(m, x, length);
        } else {
          phi = derivative ? cosine_mode_dx(m, x, length) : oracle::cosine_mode(m, x, length);
        }
        sum += c(m - 1) * phi;
      }
      return sum;
    };
    const double physical = oracle::integrate(
        [&](double x) {
          return std::norm(field(s.u, bu, true, x)) + std::norm(field(s.v, bu, false, x)) +
                 std::norm(field(s.theta, bt, false, x));
        },
        0.0, length);
    EXPECT_NEAR(energy_norm_sq(gen, s), physical, 1e-8 * physical);
  }
}

TEST(Energy, InnerProductIsHermitian) {
  const CoupledGenerator gen = assemble(N, D, Coupling::symmetric(2.0), 6);
  const StateVector a = random_state(gen, 1);
  const StateVector b = random_state(gen, 2);
  const Complex ab = energy_inner(gen, a, b);
  const Complex ba = energy_inner(gen, b, a);
  EXPECT_NEAR(std::abs(ab - std::conj(ba)), 0.0, 1e-13);
  EXPECT_NEAR(energy_inner(gen, a, a).real(), energy_norm_sq(gen, a), 1e-12);
}

TEST(Energy, RejectsMismatchedState) {
  const CoupledGenerator gen = assemble(D, D, Coupling::symmetric(1.0), 4);
  EXPECT_THROW(energy_norm_sq(gen, StateVector::zero(3)), InvalidArgument);
  StateVector ragged = StateVector::zero(4);
  ragged.theta.resize(2);
  EXPECT_THROW(apply(gen, ragged), InvalidArgument);
}

TEST(Apply, ColumnsOfSingleModeMatrix) {
  const CoupledGenerator gen = assemble(D, D, Coupling::symmetric(1.0), 1);
  const Eigen::Matrix3d expected = (Eigen::Matrix3d() << 0, 1, 0, -1, 0, -1, 0, 1, -1).finished();
  for (int col = 0; col < 3; ++col) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(3);
    e(col) = 1.0;
    const Eigen::VectorXcd out = apply(gen, StateVector::from_stacked(e)).stacked();
    for (int row = 0; row < 3; ++row) EXPECT_EQ(out(row), Complex(expected(row, col)));
  }
}

TEST(Apply, AgreesWithDenseMatrixProduct) {
  for (const auto& [bu, bt] : kAllPairs) {
    const CoupledGenerator gen = assemble(bu, bt, Coupling::general(0.3, -1.7), 7);
    const StateVector s = random_state(gen, 5);
    const Eigen::VectorXcd dense = gen.matrix().cast<Complex>() * s.stacked();
    EXPECT_LE((apply(gen, s).stacked() - dense).norm(), 1e-12 * dense.norm());
  }
}

TEST(SolveShifted, RealShiftExample) {
  const CoupledGenerator gen = assemble(D, D, Coupling::symmetric(1.0), 1);
  StateVector f = StateVector::zero(1);
  f.v(0) = 1.0;
  const StateVector u = solve_shifted(gen, 1.0, f);
  EXPECT_NEAR(std::abs(u.u(0) - 0.4), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(u.v(0) - 0.4), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(u.theta(0) - 0.2), 0.0, 1e-14);
}

TEST(SolveShifted, ZeroRightHandSide) {
  const CoupledGenerator gen = assemble(D, N, Coupling::symmetric(1.0), 5);
  const StateVector u = solve_shifted(gen, Complex(0.0, 2.5), StateVector::zero(5));
  EXPECT_EQ(u.stacked().norm(), 0.0);
}

TEST(SolveShifted, ResidualIsSmallForAllPairs) {
  for (const auto& [bu, bt] : kAllPairs) {
    const CoupledGenerator gen = assemble(bu, bt, Coupling::symmetric(1.0), 16);
    const StateVector f = random_state(gen, 9);
    for (const Complex shift : {Complex(1.0, 0.0), Complex(0.0, 3.7), Complex(0.1, -12.0)}) {
      const StateVector u = solve_shifted(gen, shift, f);
      const Eigen::VectorXcd r = shift * u.stacked() - apply(gen, u).stacked() - f.stacked();
      StateVector residual = StateVector::from_stacked(r);
      EXPECT_LE(std::sqrt(energy_norm_sq(gen, residual) / energy_norm_sq(gen, f)), 1e-10);
    }
  }
}

TEST(SolveShifted, ResonantForcingReproducesClosedForm) {
  const CoupledGenerator gen = assemble(D, D, Coupling::symmetric(1.0), 8);
  StateVector f = StateVector::zero(8);
  f.v(3) = 1.0;
  const StateVector u = solve_shifted(gen, Complex(0.0, 4.0), f);
  EXPECT_NEAR(std::abs(u.u(3) - Complex(1.0, -4.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(u.theta(3) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(16.0 * std::norm(u.u(3)), 272.0, 1e-9);
  // Other modes are untouched.
  EXPECT_NEAR(u.u.norm() - std::abs(u.u(3)), 0.0, 1e-14);
}

TEST(SolveShifted, SingularShiftIsReported) {
  // gamma = 0: the wave block has eigenvalues +-i exactly.
  const CoupledGenerator gen = assemble(D, D, Coupling::symmetric(0.0), 1);
  StateVector f = StateVector::zero(1);
  f.v(0) = 1.0;
  try {
    solve_shifted(gen, Complex(0.0, 1.0), f);
    FAIL() << "expected SingularShift";
  } catch (const SingularShift& e) {
    EXPECT_LT(e.rcond(), kSingularShiftRcond);
  }
}

TEST(Euclidean, HalfIntervalExample) {
  const CoupledGenerator gen = assemble(D, D, Coupling::symmetric(1.0), 1, kPi / 2);
  Eigen::Matrix3d expected;
  expected << 0, 2, 0,
              -2, 0, -1,
              0, 1, -4;
  EXPECT_LE(max_abs(to_euclidean(gen) - expected), 1e-14);
}

TEST(Euclidean, SimilarToCoefficientForm) {
  for (const auto& [bu, bt] : kAllPairs) {
    const CoupledGenerator gen = assemble(bu, bt, Coupling::symmetric(0.8), 6);
    const auto a = sorted_eigenvalues(gen.matrix());
    const auto b = sorted_eigenvalues(to_euclidean(gen));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(std::abs(a[i] - b[i]), 0.0, 1e-9 * std::max(1.0, std::abs(a[i])));
    }
  }
}

TEST(Euclidean, WeightingIsAnIsometry) {
  const CoupledGenerator gen = assemble(N, D, Coupling::symmetric(1.0), 9);
  const StateVector s = random_state(gen, 21);
  EXPECT_NEAR(gen.to_weighted(s).squaredNorm(), energy_norm_sq(gen, s), 1e-12);
  const StateVector back = gen.from_weighted(gen.to_weighted(s));
  EXPECT_LE((back.stacked() - s.stacked()).norm(), 1e-14);
  EXPECT_THROW(gen.from_weighted(Eigen::VectorXcd::Zero(5)), InvalidArgument);
}

TEST(Dissipativity, SymmetricCouplingIdentity) {
  for (const auto& [bu, bt] : kAllPairs) {
    for (const double gamma : {0.0, 0.5, 1.0, 3.0}) {
      const CoupledGenerator gen = assemble(bu, bt, Coupling::symmetric(gamma), 12);
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const StateVector s = random_state(gen, seed);
        const double re = energy_inner(gen, apply(gen, s), s).real();
        EXPECT_NEAR(re, -thermal_dissipation(gen, s), 1e-10 * energy_norm_sq(gen, s));
      }
    }
  }
}

TEST(Dissipativity, GeneralCouplingCrossTerm) {
  for (const auto& [bu, bt] : kAllPairs) {
    for (const auto& [alpha, beta] :
         std::vector<std::pair<double, double>>{{1.0, 2.0}, {-1.0, -3.0}, {0.5, 0.5}, {2.0, -0.5}}) {
      const CoupledGenerator gen = assemble(bu, bt, Coupling::general(alpha, beta), 10);
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const StateVector s = random_state(gen, 100 + seed);
        const Eigen::VectorXcd g_theta = gen.gram_matrix().cast<Complex>() * s.theta;
        const double cross = s.v.dot(g_theta).real();
        double dissipation = 0.0;
        for (int m = 0; m < 10; ++m) dissipation += gen.lambda_theta()(m) * std::norm(s.theta(m));
        const double expected = -(alpha + beta) * cross - dissipation;
        const double re = energy_inner(gen, apply(gen, s), s).real();
        EXPECT_NEAR(re, expected, 1e-10 * energy_norm_sq(gen, s));

        // Young: |(alpha + beta) Re<G theta, v>| <= C/2 ||U||^2 for C >= (alpha + beta)^2.
        const double c = std::max((alpha + beta) * (alpha + beta), 1.0);
        EXPECT_LE(re, 0.5 * c * energy_norm_sq(gen, s) - dissipation + 1e-10);
      }
    }
  }
}
