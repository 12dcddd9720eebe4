#include "ladderjr/errors.hpp"
#include "ladderjr/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace ladder;

TEST_CASE("eigendecomposition is accurate and orthogonal") {
  LadderSpec spec;
  spec.L = 3;
  for (double ff : {0.0, 0.5}) {
    const DenseSpectrum s = diagonalize(spec, ff);
    const Eigen::MatrixXd h = dense_hamiltonian(spec, ff);
    const Eigen::MatrixXd& v = s.eigenvectors;
    CHECK((h * v - v * s.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(s.eigenvalues.sum()) < 1e-10);
    for (Eigen::Index i = 1; i < 64; ++i) CHECK(s.eigenvalues[i] >= s.eigenvalues[i - 1]);
  }
}

TEST_CASE("ground state energy matches power iteration") {
  LadderSpec spec;
  spec.L = 3;
  const LadderHamiltonian ham(spec);
  const double shift = spectral_bound(spec, 0.0);
  // Power iteration on shift - H converges to the ground state.
  Amplitudes v = haar_random(6, 3).amplitudes();
  double e = 0.0;
  for (int it = 0; it < 200000; ++it) {
    Amplitudes w = shift * v - ham.apply(0.0, v);
    w /= w.norm();
    const double next = ham.expectation(0.0, w);
    v = w;
    if (it > 100 && std::abs(next - e) < 1e-15) break;
    e = next;
  }
  CHECK(e == doctest::Approx(diagonalize(spec, 0.0).eigenvalues[0]).epsilon(1e-8));
}

TEST_CASE("exact propagation") {
  LadderSpec spec;
  spec.L = 2;
  const DenseSpectrum s = diagonalize(spec, 0.2);
  const StateVector psi = haar_random(4, 6);
  CHECK((exact_propagate(s, 0.0, psi).amplitudes() - psi.amplitudes()).norm() < 1e-14);
  CHECK(exact_propagate(s, 37.5, psi).norm() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("oracle size caps") {
  LadderSpec spec;
  spec.L = 7;
  CHECK_THROWS_AS(diagonalize(spec, 0.0), CapacityError);
  spec.L = 6;
  CHECK_THROWS_AS(exact_work_distribution(spec, {0.5, 1.0}, {0.02}, haar_random(12, 1)), CapacityError);
}

TEST_CASE("eigenspaces group degenerate levels") {
  const DenseSpectrum s = diagonalize(LadderSpec{}, 0.0);
  const auto spaces = eigenspaces(s.eigenvalues);
  REQUIRE(spaces.size() == 3);
  CHECK(spaces[1].second - spaces[1].first == 2);
}

TEST_CASE("exact work distribution") {
  LadderSpec spec;
  spec.L = 2;
  const StateVector psi = haar_random(4, 9);
  // Without field every initial eigenspace maps onto itself; the small step keeps the
  // splitting leakage below the tolerance.
  const WorkDistribution none = exact_work_distribution(spec, {0.0, 2.0}, {0.002}, psi);
  CHECK(none.total_weight() == doctest::Approx(1.0).epsilon(1e-10));
  for (const WorkTransition& t : none.transitions) {
    if (t.e_ini != t.e_fin) CHECK(t.weight <= 1e-10);
  }
  CHECK(none.exp_average(1.2) == doctest::Approx(1.0).epsilon(1e-9));

  const WorkDistribution driven = exact_work_distribution(spec, {0.5, 20.0}, {0.02}, psi);
  CHECK(driven.total_weight() == doctest::Approx(1.0).epsilon(1e-10));
  double off = 0.0;
  for (const WorkTransition& t : driven.transitions) {
    if (t.e_ini != t.e_fin) off += t.weight;
  }
  CHECK(off > 1e-4);
}
