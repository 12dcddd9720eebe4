#include "ladderjr/errors.hpp"
#include "ladderjr/oracle.hpp"
#include "ladderjr/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ladder;

namespace {

LadderSpec ladder_of(int L) {
  LadderSpec spec;
  spec.L = L;
  return spec;
}

// Autocorrelation sum_n w_n e^{-i E_n t} evaluated exactly.
AutocorrSeries exact_series(const Eigen::VectorXd& energies, const Eigen::VectorXd& weights, double dt, int steps) {
  AutocorrSeries s;
  s.dt = dt;
  s.samples = Eigen::VectorXcd::Zero(steps + 1);
  for (int j = 0; j <= steps; ++j) {
    for (Eigen::Index n = 0; n < energies.size(); ++n) s.samples[j] += weights[n] * std::polar(1.0, -energies[n] * j * dt);
  }
  return s;
}

// Truncated-inversion kernel (dt / 2 pi) [1 + 2 sum_{k=1}^{K} cos(k dt x)].
double kernel(double x, double dt, int steps) {
  double s = 1.0;
  for (int k = 1; k <= steps; ++k) s += 2.0 * std::cos(k * dt * x);
  return dt / (2.0 * std::numbers::pi) * s;
}

double value_at(const SpectralDensity& d, double e) {
  const auto i = static_cast<Eigen::Index>(std::lround((e - d.e0) / d.de));
  return d.values[i];
}

}  // namespace

TEST_CASE("autocorrelation of an eigenstate is a pure phase") {
  // On one rung every term commutes, so the product formula is exact.
  const LadderSpec spec = ladder_of(1);
  const DenseSpectrum s = diagonalize(spec, 0.0);
  for (Eigen::Index n = 0; n < 4; ++n) {
    const StateVector eig(2, s.eigenvectors.col(n).cast<Complex>());
    const AutocorrSeries series = autocorrelation(spec, eig, {0.02}, 20480);
    double err = 0.0;
    for (Eigen::Index j = 0; j <= series.steps(); ++j) {
      err = std::max(err, std::abs(series.samples[j] - std::polar(1.0, -s.eigenvalues[n] * 0.02 * j)));
    }
    CHECK(err < 1e-9);
  }
  // At L = 3 the splitting error shifts the phase at O(dt^2).
  const LadderSpec l3 = ladder_of(3);
  const DenseSpectrum s3 = diagonalize(l3, 0.0);
  const StateVector eig(6, s3.eigenvectors.col(5).cast<Complex>());
  const AutocorrSeries series = autocorrelation(l3, eig, {0.001}, 1000);
  CHECK(std::abs(series.samples[1000] - std::polar(1.0, -s3.eigenvalues[5])) < 1e-6);
  CHECK(std::abs(series.samples[0] - 1.0) < 1e-12);
  for (Eigen::Index j = 0; j <= series.steps(); ++j) CHECK(std::abs(series.samples[j]) <= 1.0 + 1e-10);
}

TEST_CASE("reference run length and resolution") {
  // K = 4096 x 5 steps of 0.02 give Theta = 409.6 and resolution pi / Theta ~ 0.0077.
  const AutocorrSeries series = exact_series(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), 0.02, 4096 * 5);
  CHECK(series.theta() == doctest::Approx(409.6));
  const SpectralDensity d = invert_series(series, DensityKind::Ldos);
  CHECK(d.resolution == doctest::Approx(0.0077).epsilon(0.005));
  CHECK(d.de <= d.resolution / 2.0);
  CHECK(d.size() == 131072);
}

TEST_CASE("inversion reproduces the truncated kernel sum") {
  const LadderSpec spec = ladder_of(2);
  const DenseSpectrum s = diagonalize(spec, 0.0);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(16, 1.0 / 16.0);
  const int steps = 2000;
  InversionOptions opts;
  opts.normalize = false;
  const SpectralDensity d = invert_series(exact_series(s.eigenvalues, w, 0.02, steps), DensityKind::Ldos, opts);
  double peak = d.values.maxCoeff();
  double err = 0.0;
  for (Eigen::Index i = 0; i < d.size(); i += 37) {
    double ref = 0.0;
    for (Eigen::Index n = 0; n < 16; ++n) ref += w[n] * kernel(d.energy(i) - s.eigenvalues[n], 0.02, steps);
    err = std::max(err, std::abs(d.values[i] - ref));
  }
  CHECK(err < 1e-12 * peak);
}

TEST_CASE("uniform eigenbasis mixture at L = 2: recovered weights") {
  // psi = sum_n |E_n> / 4. The weights are recovered by least squares against the known
  // kernel at the distinct oracle energies.
  const LadderSpec spec = ladder_of(2);
  const DenseSpectrum s = diagonalize(spec, 0.0);
  const auto spaces = eigenspaces(s.eigenvalues);
  Amplitudes coeff = Amplitudes::Constant(16, 0.25);
  const StateVector psi(4, s.eigenvectors.cast<Complex>() * coeff);
  auto recovered = [&](const AutocorrSeries& series) {
    InversionOptions opts;
    opts.normalize = false;
    const SpectralDensity d = invert_series(series, DensityKind::Ldos, opts);
    const int steps = static_cast<int>(series.steps());
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (std::abs(d.energy(i)) < 2.0) rows.push_back(i);
    }
    Eigen::MatrixXd A(rows.size(), spaces.size());
    Eigen::VectorXd b(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      b[r] = d.values[rows[r]];
      for (std::size_t m = 0; m < spaces.size(); ++m) {
        A(r, m) = kernel(d.energy(rows[r]) - s.eigenvalues[spaces[m].first], series.dt, steps);
      }
    }
    return Eigen::VectorXd(A.colPivHouseholderQr().solve(b));
  };
  Eigen::VectorXd expect(spaces.size());
  for (std::size_t m = 0; m < spaces.size(); ++m) expect[m] = (spaces[m].second - spaces[m].first) / 16.0;

  const Eigen::VectorXd w = Eigen::VectorXd::Constant(16, 1.0 / 16.0);
  const Eigen::VectorXd exact = recovered(exact_series(s.eigenvalues, w, 0.02, 1000));
  CHECK((exact - expect).cwiseAbs().maxCoeff() < 1e-6);

  // The same through PF2 propagation: eigenphases carry the O(dt^2) splitting error.
  const Eigen::VectorXd pf2 = recovered(autocorrelation(spec, psi, {0.02}, 1000));
  CHECK((pf2 - expect).cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("single-rung DOS has peaks at the oracle energies") {
  const LadderSpec spec = ladder_of(1);
  std::vector<AutocorrSeries> series;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) series.push_back(autocorrelation(spec, haar_random(2, seed), {0.02}, 20480));
  InversionOptions opts;
  opts.window = default_window(spec);
  opts.vectors = 8;
  const SpectralDensity dos = dos_estimate(average(series), 2, opts);
  CHECK(integrate(dos, [](double) { return 1.0; }) == doctest::Approx(4.0).epsilon(1e-3));
  const std::vector<double> peaks = find_peaks(dos, 0.3);
  REQUIRE(peaks.size() == 3);
  const double expected[] = {-0.13, 0.03, 0.07};
  for (int i = 0; i < 3; ++i) CHECK(std::abs(peaks[i] - expected[i]) < dos.resolution);
}

TEST_CASE("eigenstate LDOS is one peak carrying the weight") {
  const LadderSpec spec = ladder_of(3);
  const DenseSpectrum s = diagonalize(spec, 0.0);
  const StateVector eig(6, s.eigenvectors.col(20).cast<Complex>());
  const SpectralDensity p = ldos(spec, eig, {0.02}, 20480);
  CHECK(integrate(p, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-6));
  const std::vector<double> peaks = find_peaks(p, 0.5);
  REQUIRE(peaks.size() == 1);
  CHECK(std::abs(peaks[0] - s.eigenvalues[20]) < p.resolution);
  const double e = peaks[0];
  const double core = integrate(p, [&](double x) { return std::abs(x - e) <= p.resolution ? 1.0 : 0.0; });
  CHECK(core >= 0.99);
  CHECK(std::abs(moments(p).mean - s.eigenvalues[20]) < p.resolution);
}

TEST_CASE("LDOS before normalization integrates to about one") {
  const LadderSpec spec = ladder_of(3);
  const StateVector psi = haar_random(6, 77);
  const SpectralDensity p = ldos(spec, psi, {0.02}, 20480);
  CHECK(std::abs(p.raw_integral - 1.0) < 0.01);
}

TEST_CASE("Nyquist violations are refused") {
  const LadderSpec spec = ladder_of(3);
  CHECK_THROWS_AS(autocorrelation(spec, haar_random(6, 1), {1.1}, 10), NumericalError);
  // A level at 0.95 pi / dt puts weight in the edge band.
  const double dt = 0.5;
  Eigen::VectorXd e(2);
  e << 0.0, 0.95 * std::numbers::pi / dt;
  CHECK_THROWS_AS(invert_series(exact_series(e, Eigen::VectorXd::Constant(2, 0.5), dt, 200), DensityKind::Ldos),
                  NumericalError);
}

TEST_CASE("moments of synthetic densities") {
  SpectralDensity g;
  g.kind = DensityKind::Ldos;
  g.de = 0.001;
  g.e0 = -3.0;
  g.values.resize(6001);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double x = g.energy(i) - 0.3;
    g.values[i] = std::exp(-x * x / (2 * 0.04)) / std::sqrt(2 * std::numbers::pi * 0.04);
  }
  g.window = {g.e0, g.energy(g.size() - 1)};
  const Moments m = moments(g);
  CHECK(std::abs(m.mean - 0.3) < 1e-10);
  CHECK(m.std == doctest::Approx(0.2).epsilon(1e-8));
  SpectralDensity bad = g;
  bad.values *= 1.1;
  CHECK_THROWS_AS(moments(bad), InvalidInput);
}

TEST_CASE("window restriction and crop") {
  SpectralDensity d;
  d.kind = DensityKind::Ldos;
  d.de = 0.1;
  d.e0 = -1.0;
  d.values = Eigen::VectorXd::Ones(21);
  d.window = {-1.0, 1.0};
  const SpectralDensity r = restrict_window(d, {-0.5, 0.5});
  CHECK(integrate(r, [](double) { return 1.0; }) == doctest::Approx(1.0));
  const SpectralDensity c = crop(r);
  CHECK(c.size() == 11);
  CHECK(c.e0 == doctest::Approx(-0.5));
}

TEST_CASE("density CSV round trip") {
  const LadderSpec spec = ladder_of(1);
  const SpectralDensity p = ldos(spec, haar_random(2, 5), {0.02}, 512);
  std::stringstream ss;
  write_density_csv(ss, p, {{{"seed", "5"}}});
  const std::string text = ss.str();
  CHECK(text.rfind("# seed: 5\n", 0) == 0);
  CHECK(text.find("\nE,P\n") != std::string::npos);
  const SpectralDensity back = read_density_csv(ss);
  const SpectralDensity cropped = crop(p);
  CHECK(back.kind == DensityKind::Ldos);
  CHECK(back.size() == cropped.size());
  CHECK(back.e0 == cropped.e0);
  CHECK(back.values == cropped.values);
  CHECK(integrate(back, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("DOS fluctuations between seeds shrink with the dimension") {
  auto rel_diff = [](int L) {
    const LadderSpec spec = ladder_of(L);
    InversionOptions opts;
    opts.window = default_window(spec);
    opts.gaussian_taper = true;  // smooth enough to compare pointwise
    const SpectralDensity a = dos_estimate(autocorrelation(spec, haar_random(2 * L, 1), {0.02}, 500), 2 * L, opts);
    const SpectralDensity b = dos_estimate(autocorrelation(spec, haar_random(2 * L, 2), {0.02}, 500), 2 * L, opts);
    return (a.values - b.values).norm() / (a.values + b.values).norm();
  };
  const double small = rel_diff(3);
  const double large = rel_diff(6);
  CAPTURE(small);
  CAPTURE(large);
  CHECK(large < 0.5 * small);
}
