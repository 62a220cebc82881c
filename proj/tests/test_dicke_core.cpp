#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"

#include "oracles.hpp"
#include "twistecho/errors.hpp"
#include "twistecho/propagator.hpp"
#include "twistecho/spin_operators.hpp"
#include "twistecho/workspace.hpp"

using namespace twistecho;
using std::numbers::pi;

namespace {

Eigen::VectorXcd random_state(Eigen::Index n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (auto& x : v) x = Complex(g(rng), g(rng));
  return v.normalized();
}

BandedOperator random_hermitian(const SpinSystem& s, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BandedOperator h = u(rng) * build_spin_operator(s, SpinComponent::X) +
                     u(rng) * build_spin_operator(s, SpinComponent::Y) +
                     u(rng) * build_spin_operator(s, SpinComponent::Z) +
                     u(rng) * build_twisting_hamiltonian(s, Twisting::TACT) +
                     u(rng) * build_twisting_hamiltonian(s, Twisting::OAT);
  return h;
}

}  // namespace

TEST(SpinSystem, HalfIntegerBookkeeping) {
  SpinSystem s(7);
  EXPECT_EQ(s.dim(), 8);
  EXPECT_EQ(s.two_j(), 7);
  EXPECT_DOUBLE_EQ(s.j(), 3.5);
  EXPECT_DOUBLE_EQ(s.m(0), 3.5);
  EXPECT_DOUBLE_EQ(s.m(7), -3.5);
  EXPECT_THROW(SpinSystem(0), StructuralError);
}

TEST(DickeState, RejectsWrongLength) {
  EXPECT_THROW(DickeState(SpinSystem(3), Eigen::VectorXcd::Zero(3)), StructuralError);
}

TEST(DickeState, CoherentStateIsNormalized) {
  for (int n : {1, 5, 40, 900}) {
    const DickeState css = DickeState::coherent(SpinSystem(n), 1.1, 0.4);
    EXPECT_NEAR(css.norm(), 1.0, 1e-12) << n;
  }
  EXPECT_NEAR(DickeState::coherent(SpinSystem(10), 0.0, 0.3).fidelity(DickeState::pole(SpinSystem(10))),
              1.0, 1e-15);
}

TEST(SpinOperators, SpinHalfJxIsHalfPauliX) {
  const Eigen::MatrixXcd jx = build_spin_operator(SpinSystem(1), SpinComponent::X).to_dense();
  Eigen::Matrix2cd expected;
  expected << 0.0, 0.5, 0.5, 0.0;
  EXPECT_LT((jx - expected).norm(), 1e-15);
}

TEST(SpinOperators, SpinOneJzDiagonal) {
  const Eigen::MatrixXcd jz = build_spin_operator(SpinSystem(2), SpinComponent::Z).to_dense();
  EXPECT_LT((jz - Eigen::Vector3d(1, 0, -1).cast<Complex>().asDiagonal().toDenseMatrix()).norm(), 1e-15);
}

TEST(SpinOperators, RaisingOnSpinOneMiddleState) {
  const SpinSystem s(2);
  const BandedOperator jp = build_spin_operator(s, SpinComponent::Plus);
  const Eigen::VectorXcd out = jp.apply(DickeState::basis(s, 1).amplitudes());
  EXPECT_NEAR(std::abs(out[0] - std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(out[1].real(), 0.0, 0.0);
  EXPECT_NEAR(out[2].real(), 0.0, 0.0);
  ASSERT_NE(jp.band(-1), nullptr);
  EXPECT_EQ(jp.band(1), nullptr);
}

TEST(SpinOperators, MatchDenseLadderConstruction) {
  for (int n = 1; n <= 8; ++n) {
    const SpinSystem s(n);
    EXPECT_LT((build_spin_operator(s, SpinComponent::X).to_dense() - oracle::jx(n)).norm(), 1e-14);
    EXPECT_LT((build_spin_operator(s, SpinComponent::Y).to_dense() - oracle::jy(n)).norm(), 1e-14);
    EXPECT_LT((build_spin_operator(s, SpinComponent::Z).to_dense() - oracle::jz(n)).norm(), 1e-14);
  }
}

TEST(SpinOperators, Commutator) {
  for (int n = 1; n <= 6; ++n) {
    const SpinSystem s(n);
    const Eigen::MatrixXcd x = build_spin_operator(s, SpinComponent::X).to_dense();
    const Eigen::MatrixXcd y = build_spin_operator(s, SpinComponent::Y).to_dense();
    const Eigen::MatrixXcd z = build_spin_operator(s, SpinComponent::Z).to_dense();
    EXPECT_LT((x * y - y * x - Complex(0, 1) * z).cwiseAbs().maxCoeff(), 1e-13) << n;
  }
}

TEST(TwistingHamiltonian, TactVanishesForSpinHalf) {
  const BandedOperator h = build_twisting_hamiltonian(SpinSystem(1), Twisting::TACT);
  EXPECT_LT(h.to_dense().norm(), 1e-15);
}

TEST(TwistingHamiltonian, OatIsJxSquared) {
  const SpinSystem s(2);
  const Eigen::MatrixXcd jx = build_spin_operator(s, SpinComponent::X).to_dense();
  const Eigen::MatrixXcd oat = build_twisting_hamiltonian(s, Twisting::OAT).to_dense();
  EXPECT_LT((oat - jx * jx).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(TwistingHamiltonian, TactMatchesDenseLadderSquares) {
  const int n = 4;
  const Eigen::MatrixXcd jp = oracle::raising(n);
  const Eigen::MatrixXcd jm = jp.adjoint();
  const Eigen::MatrixXcd expected = (jp * jp - jm * jm) * Complex(0.0, 0.5);
  const BandedOperator h = build_twisting_hamiltonian(SpinSystem(n), Twisting::TACT);
  const Eigen::MatrixXcd dense = h.to_dense();
  EXPECT_LT((dense - expected).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((dense - dense.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(h.band(0), nullptr);
  for (int k : h.offsets()) {
    EXPECT_EQ(std::abs(k), 2);
    EXPECT_LT(h.band(k)->real().cwiseAbs().maxCoeff(), 1e-15);
  }
  // Equivalent anticommutator form.
  const Eigen::MatrixXcd x = oracle::jx(n), y = oracle::jy(n);
  EXPECT_LT((dense + (x * y + y * x)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(BandedOperator, HermiticityRoundTrip) {
  std::mt19937 rng(11);
  for (int n = 1; n <= 12; ++n) {
    const Eigen::MatrixXcd m = random_hermitian(SpinSystem(n), rng).to_dense();
    EXPECT_LT((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  }
  EXPECT_FALSE(build_spin_operator(SpinSystem(3), SpinComponent::Plus).is_hermitian());
}

TEST(BandedOperator, ProductMatchesDense) {
  const SpinSystem s(6);
  const BandedOperator a = build_spin_operator(s, SpinComponent::Plus);
  const BandedOperator b = build_spin_operator(s, SpinComponent::Y) + build_spin_operator(s, SpinComponent::Z);
  EXPECT_LT(((a * b).to_dense() - a.to_dense() * b.to_dense()).norm(), 1e-13);
  EXPECT_LT(((b * a).to_dense() - b.to_dense() * a.to_dense()).norm(), 1e-13);
}

TEST(BandedOperator, DimensionMismatch) {
  const BandedOperator jx = build_spin_operator(SpinSystem(3), SpinComponent::X);
  EXPECT_THROW(jx.apply(Eigen::VectorXcd::Zero(3)), StructuralError);
  EXPECT_THROW(evolve(DickeState::pole(SpinSystem(2)), jx, 0.1), StructuralError);
}

TEST(Evolve, ZeroScaleIsIdentity) {
  const SpinSystem s(5);
  std::mt19937 rng(1);
  const DickeState psi(s, random_state(s.dim(), rng));
  const DickeState out = evolve(psi, build_twisting_hamiltonian(s, Twisting::TACT), 0.0);
  EXPECT_EQ(out.amplitudes(), psi.amplitudes());
}

TEST(Evolve, SpinHalfRotationAboutY) {
  const SpinSystem s(1);
  const double theta = 0.7;
  const Eigen::VectorXcd in = Eigen::Vector2cd(Complex(0.3, 0.1), Complex(-0.2, 0.9)).normalized();
  const Eigen::VectorXcd out = evolve(DickeState(s, in), build_spin_operator(s, SpinComponent::Y), theta).amplitudes();
  Eigen::Matrix2d r;
  r << std::cos(theta / 2), -std::sin(theta / 2), std::sin(theta / 2), std::cos(theta / 2);
  EXPECT_LT((out - r.cast<Complex>() * in).norm(), 1e-14);
}

TEST(Evolve, TactMatchesTaylorSeries) {
  const SpinSystem s(6);
  const BandedOperator h = build_twisting_hamiltonian(s, Twisting::TACT);
  std::mt19937 rng(3);
  const Eigen::VectorXcd v = random_state(s.dim(), rng);
  // Plain Taylor series without scaling: the norm of 0.05 H is well below 1.
  Eigen::MatrixXcd a = h.to_dense() * Complex(0.0, -0.05);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(s.dim(), s.dim());
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k < 40; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  EXPECT_LT((evolve(DickeState(s, v), h, 0.05).amplitudes() - sum * v).norm(), 1e-13);
}

TEST(Evolve, RandomDrawsAgainstDenseOracle) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> pick_n(1, 8);
  std::uniform_real_distribution<double> pick_scale(-3.0, 3.0);
  for (int draw = 0; draw < 50; ++draw) {
    const SpinSystem s(pick_n(rng));
    const BandedOperator h = random_hermitian(s, rng);
    const double scale = pick_scale(rng);
    const Eigen::VectorXcd v = random_state(s.dim(), rng);
    const Eigen::VectorXcd expected = oracle::evolve_dense(h.to_dense(), v, scale);
    const DickeState out = evolve(DickeState(s, v), h, scale);
    EXPECT_LT((out.amplitudes() - expected).norm(), 1e-9) << "draw " << draw;
    EXPECT_LT(std::abs(out.norm() * out.norm() - 1.0), 1e-10);
  }
}

TEST(Evolve, CompositionAndReversibility) {
  std::mt19937 rng(5);
  for (int n : {3, 8, 31}) {
    const SpinSystem s(n);
    for (Twisting kind : {Twisting::TACT, Twisting::OAT}) {
      const Propagator p(build_twisting_hamiltonian(s, kind));
      const Eigen::VectorXcd v = random_state(s.dim(), rng);
      const double a = 0.37 / n, b = -0.91 / n;
      EXPECT_LT((p.apply(p.apply(v, a), b) - p.apply(v, a + b)).norm(), 1e-9);
      EXPECT_LT((p.apply(p.apply(v, a), -a) - v).norm(), 1e-9);
    }
  }
}

TEST(Evolve, RejectsNonHermitian) {
  const SpinSystem s(3);
  EXPECT_THROW(Propagator(build_spin_operator(s, SpinComponent::Plus)), StructuralError);
}

TEST(Propagator, KrylovAgreesWithSpectral) {
  std::mt19937 rng(9);
  for (int n : {20, 201}) {
    const SpinSystem s(n);
    for (Twisting kind : {Twisting::TACT, Twisting::OAT}) {
      const BandedOperator h = build_twisting_hamiltonian(s, kind);
      const Propagator spectral(h, PropagationMethod::Spectral);
      const Propagator krylov(h, PropagationMethod::Krylov);
      ASSERT_EQ(krylov.method(), PropagationMethod::Krylov);
      const Eigen::VectorXcd v = random_state(s.dim(), rng);
      for (double scale : {0.3 / n, -2.0 / n, 5.0 / n}) {
        const Eigen::VectorXcd a = spectral.apply(v, scale);
        const Eigen::VectorXcd b = krylov.apply(v, scale);
        EXPECT_LT((a - b).norm(), 1e-9) << n << " " << to_string(kind) << " " << scale;
        EXPECT_LT(std::abs(b.norm() - 1.0), 1e-10);
      }
    }
    const Propagator spectral_y(build_spin_operator(s, SpinComponent::Y), PropagationMethod::Spectral);
    const Propagator krylov_y(build_spin_operator(s, SpinComponent::Y), PropagationMethod::Krylov);
    const Eigen::VectorXcd v = random_state(s.dim(), rng);
    EXPECT_LT((spectral_y.apply(v, pi / 2) - krylov_y.apply(v, pi / 2)).norm(), 1e-9);
  }
}

TEST(Propagator, DenseFallbackForMixedBands) {
  const SpinSystem s(6);
  const BandedOperator h = build_spin_operator(s, SpinComponent::X) + build_twisting_hamiltonian(s, Twisting::TACT);
  std::mt19937 rng(4);
  const Eigen::VectorXcd v = random_state(s.dim(), rng);
  EXPECT_LT((Propagator(h).apply(v, 0.8) - oracle::evolve_dense(h.to_dense(), v, 0.8)).norm(), 1e-10);
}

TEST(Propagator, AutomaticSwitchesToKrylovAboveLimit) {
  const SpinSystem big(static_cast<int>(kSpectralDimLimit));
  EXPECT_EQ(Propagator(build_spin_operator(big, SpinComponent::Z)).method(), PropagationMethod::Krylov);
  const SpinSystem small(static_cast<int>(kSpectralDimLimit) - 1);
  EXPECT_EQ(Propagator(build_spin_operator(small, SpinComponent::Z)).method(), PropagationMethod::Spectral);
}

TEST(Rotate, ZeroAngleIdentity) {
  const DickeState css = DickeState::coherent(SpinSystem(9), 0.3, 0.2);
  for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
    EXPECT_EQ(rotate(css, a, 0.0).amplitudes(), css.amplitudes());
  }
}

TEST(Rotate, FullFlipAboutY) {
  for (int n : {1, 2, 7, 50}) {
    const SpinSystem s(n);
    const DickeState flipped = rotate(DickeState::pole(s), Axis::Y, pi);
    EXPECT_NEAR(std::abs(flipped.amplitudes()[n]), 1.0, 1e-10) << n;
  }
}

TEST(Rotate, QuarterTurnOnSpinOne) {
  const SpinSystem s(2);
  const Eigen::VectorXcd expected = oracle::evolve_dense(oracle::jy(2), DickeState::pole(s).amplitudes(), pi / 2);
  const Eigen::VectorXcd out = rotate(DickeState::pole(s), Axis::Y, pi / 2).amplitudes();
  EXPECT_LT((out - expected).norm(), 1e-12);
  // Oracle fixes the sign: (1/2, 1/sqrt 2, 1/2).
  EXPECT_NEAR(out[0].real(), 0.5, 1e-12);
  EXPECT_NEAR(out[1].real(), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(out[2].real(), 0.5, 1e-12);
}

TEST(Rotate, WignerSmallDAgreesWithPropagator) {
  std::mt19937 rng(8);
  for (int n : {1, 2, 5, 12, 30}) {
    const SpinSystem s(n);
    for (double beta : {0.1, pi / 2, 2.3}) {
      const Eigen::VectorXcd v = random_state(s.dim(), rng);
      const Eigen::VectorXcd via_d = wigner_small_d(s, beta).cast<Complex>() * v;
      EXPECT_LT((via_d - rotate(DickeState(s, v), Axis::Y, beta).amplitudes()).norm(), 1e-10)
          << n << " " << beta;
    }
  }
}

TEST(Rotate, CoherentStateConvention) {
  // The e^{-ik phi} amplitude convention puts the Bloch vector at physical
  // azimuth -phi: CSS(polar, phi) = R_z(-phi) R_y(polar) |pole>.
  const SpinSystem s(11);
  const DickeState rotated = rotate(rotate(DickeState::pole(s), Axis::Y, 0.9), Axis::Z, -1.3);
  EXPECT_NEAR(rotated.fidelity(DickeState::coherent(s, 0.9, 1.3)), 1.0, 1e-12);
}

TEST(SpinWorkspace, SharedInstanceAndRotations) {
  auto ws = SpinWorkspace::shared(40);
  EXPECT_EQ(ws.get(), SpinWorkspace::shared(40).get());
  const DickeState css = DickeState::coherent(ws->system(), 0.5, 0.0);
  const DickeState a = ws->rotate(css, Axis::X, 0.4);
  const DickeState b = rotate(css, Axis::X, 0.4);
  EXPECT_LT((a.amplitudes() - b.amplitudes()).norm(), 1e-12);
  EXPECT_THROW(ws->propagator(Axis::Z), ContractViolation);
}

TEST(NormConservation, AllOperations) {
  std::mt19937 rng(77);
  for (int n : {2, 17, 120}) {
    const SpinSystem s(n);
    DickeState psi(s, random_state(s.dim(), rng));
    auto ws = SpinWorkspace::shared(n);
    psi = ws->twist(psi, Twisting::TACT, 0.8 / n);
    psi = ws->rotate(psi, Axis::Y, 0.3);
    psi = ws->twist(psi, Twisting::OAT, -1.7 / n);
    psi = ws->rotate(psi, Axis::X, pi / 2);
    psi = ws->rotate(psi, Axis::Z, 0.2);
    EXPECT_LT(std::abs(psi.norm() * psi.norm() - 1.0), 1e-10);
  }
}
