#include "ladderjr/errors.hpp"
#include "ladderjr/work_stats.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <numbers>

using namespace ladder;

namespace {

SpectralDensity gaussian_density(double mean, double sigma, double norm = 1.0, double lo = -4.0, double hi = 4.0,
                                 double de = 0.001, DensityKind kind = DensityKind::Ldos) {
  SpectralDensity d;
  d.kind = kind;
  d.de = de;
  d.e0 = lo;
  const auto n = static_cast<Eigen::Index>(std::lround((hi - lo) / de)) + 1;
  d.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = (d.energy(i) - mean) / sigma;
    d.values[i] = norm * std::exp(-0.5 * x * x) / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  }
  d.window = {lo, d.energy(n - 1)};
  d.raw_integral = norm;
  return d;
}

// delta E of a work distribution itself: -ln(int P e^{-beta W} / int P) / beta.
double shift_of(const SpectralDensity& pw, double beta) {
  return -std::log(exp_moment(pw, beta, 0.0) / integrate(pw, [](double) { return 1.0; })) / beta;
}

}  // namespace

TEST_CASE("beta from an exact Gaussian DOS is -E0 / sigma^2") {
  const double sigma = 1.5;
  const SpectralDensity dos = gaussian_density(0.0, sigma, 4096.0, -6.0, 6.0, 0.002, DensityKind::Dos);
  for (double e0 : {-2.0, -1.0, 0.5}) {
    const BetaFit fit = fit_beta(dos, e0, 0.5);
    CHECK(fit.beta == doctest::Approx(-e0 / (sigma * sigma)).epsilon(1e-3));
    CHECK(fit.points == 501);
    CHECK(std::isfinite(fit.uncertainty));
  }
  const BetaFit sweep = fit_beta_sweep(dos, -2.0, {0.25, 0.375, 0.5});
  CHECK(sweep.sweep.size() == 3);
  CHECK(sweep.epsilon == 0.5);
  CHECK(sweep.uncertainty < 1e-3 * sweep.beta);
}

TEST_CASE("beta fit refuses bad windows") {
  SpectralDensity dos = gaussian_density(0.0, 1.0, 64.0, -3.0, 3.0, 0.01, DensityKind::Dos);
  CHECK_THROWS_AS(fit_beta(dos, -2.8, 0.5), InvalidInput);
  for (Eigen::Index i = 0; i < dos.size(); i += 5) dos.values[i] = -1e-3;  // 20% non-positive
  CHECK_THROWS_AS(fit_beta(dos, 0.0, 0.5), NumericalError);
  const SpectralDensity coarse = gaussian_density(0.0, 1.0, 64.0, -3.0, 3.0, 0.2, DensityKind::Dos);
  CHECK_THROWS_AS(fit_beta(coarse, 0.0, 0.5), NumericalError);
}

TEST_CASE("exponential work average") {
  const SpectralDensity p = gaussian_density(-1.0, 0.2);
  CHECK(exp_work_average(p, p, 1.2) == doctest::Approx(1.0).epsilon(1e-12));

  const double beta = 1.2, mu = 0.3, s2 = 0.04;
  const SpectralDensity narrow = gaussian_density(0.0, 0.005);
  const SpectralDensity fin = gaussian_density(mu, std::sqrt(s2));
  CHECK(exp_work_average(fin, narrow, beta) ==
        doctest::Approx(std::exp(-beta * mu + beta * beta * s2 / 2.0)).epsilon(1e-3));

  // Large beta E would overflow without recentring.
  const SpectralDensity far_ini = gaussian_density(-300.0, 0.2, 1.0, -305.0, -295.0);
  const SpectralDensity far_fin = gaussian_density(-299.9, 0.2, 1.0, -305.0, -295.0);
  CHECK(exp_work_average(far_fin, far_ini, 5.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
  CHECK_THROWS_AS(exp_work_average(far_fin, far_ini, 5.0, -600.0), NumericalError);
}

TEST_CASE("mean work and the shift delta E") {
  const SpectralDensity ini = gaussian_density(-1.0, 0.1);
  CHECK(mean_work(ini, ini) == 0.0);
  CHECK(mean_work(shifted_distribution(ini, -0.5), ini) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(delta_shift(1.0, 1.23) == 0.0);
  // 0.924 at beta = 1.23 corresponds to delta E = 0.064.
  CHECK(delta_shift(0.924, 1.23) == doctest::Approx(0.0643).epsilon(2e-3));
  CHECK_THROWS_AS(delta_shift(0.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(delta_shift(0.5, -1.0), InvalidInput);
}

TEST_CASE("shifting P_fin by delta E restores the identity") {
  const double beta = 1.23;
  const SpectralDensity ini = gaussian_density(-1.0, 0.03);
  SpectralDensity fin = gaussian_density(-0.8, 0.3);
  for (Eigen::Index i = 0; i < fin.size(); ++i) fin.values[i] *= 1.0 + 0.3 * std::tanh(fin.energy(i) + 0.8);
  fin.values /= integrate(fin, [](double) { return 1.0; });
  const double avg = exp_work_average(fin, ini, beta);
  CHECK(avg < 1.0);
  const double de = delta_shift(avg, beta);
  const SpectralDensity shifted = shifted_distribution(fin, de);
  CHECK(exp_work_average(shifted, ini, beta) == doctest::Approx(1.0).epsilon(1e-10));
  // Shape is unchanged.
  CHECK(std::abs(moments(shifted).std - moments(fin).std) < 1e-8);
  CHECK(moments(shifted).mean == doctest::Approx(moments(fin).mean - de).epsilon(1e-10));
  CHECK(shifted_distribution(fin, 0.0).values == fin.values);
  CHECK_THROWS_AS(shifted_distribution(fin, 5.0), InvalidInput);
}

TEST_CASE("band-limited resampling of a smooth density") {
  const SpectralDensity p = gaussian_density(0.2, 0.1, 1.0, -2.0, 2.0, 0.01);
  SpectralDensity target = p;
  target.e0 += 0.0643;
  const SpectralDensity r = resample_like(p, target);
  const SpectralDensity exact = gaussian_density(0.2 - 0.0643, 0.1, 1.0, -2.0, 2.0, 0.01);
  CHECK((r.values - exact.values).cwiseAbs().maxCoeff() < 1e-10);
  // The L-infinity change stays within delta E max|dP/dE|.
  const double slope = 1.0 / (0.1 * 0.1 * std::sqrt(2 * std::numbers::pi * std::exp(1.0)));
  CHECK((r.values - p.values).cwiseAbs().maxCoeff() <= 0.0643 * slope);
}

TEST_CASE("Jensen inequality and tails") {
  const SpectralDensity ini = gaussian_density(-1.0, 0.03);
  const SpectralDensity fin = gaussian_density(-0.7, 0.4);
  const double beta = 1.2;
  const double avg = exp_work_average(fin, ini, beta);
  CHECK(avg >= std::exp(-beta * mean_work(fin, ini)));
  const TailDiagnostics t = tail_diagnostics(fin, beta);
  CHECK(t.lower_tail_mass == doctest::Approx(0.00135).epsilon(0.02));
  CHECK(std::abs(t.skewness) < 1e-6);
  CHECK(t.lower_tail_weight_share > t.lower_tail_mass);
}

TEST_CASE("work report fields and serializations") {
  const SpectralDensity ini = gaussian_density(-1.0, 0.03);
  const SpectralDensity fin = gaussian_density(-0.7, 0.4);
  BetaFit beta;
  beta.beta = 1.2;
  beta.uncertainty = 0.06;
  const WorkReport r = work_report(fin, ini, beta, 7, 40 * 2.6e-4, 2.6e-4);
  CHECK(r.gamma_over_gamma0 == doctest::Approx(40.0));
  CHECK(r.delta_E == delta_shift(r.exp_avg, 1.2));
  CHECK(r.Delta_E == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(r.delta_E_err > 0.0);
  CHECK(r.exp_avg > 0.0);
  CHECK(work_report_csv_header() == "L,gamma_over_gamma0,beta,beta_err,exp_avg,exp_mean,mean_W,delta_E,delta_E_err,Delta_E");
  CHECK(work_report_csv_row(r).rfind("7,40,1.2", 0) == 0);
  const auto j = nlohmann::json::parse(work_report_json(r));
  CHECK(j.at("beta").at("value").get<double>() == 1.2);
  CHECK(j.at("delta_E").get<double>() == r.delta_E);
}

TEST_CASE("trivial protocol: identical distributions") {
  const SpectralDensity p = gaussian_density(-2.0, 0.03);
  BetaFit beta;
  beta.beta = 1.23;
  const WorkReport r = work_report(p, p, beta, 3, 1.0, 1.0);
  CHECK(std::abs(r.exp_avg - 1.0) <= 1e-10);
  CHECK(std::abs(r.mean_W) <= p.de);
}

TEST_CASE("M-fold self-convolution scales mean by M and width by sqrt M") {
  // Skewed work distribution on a coarse grid.
  SpectralDensity pw = gaussian_density(0.1, 0.15, 1.0, -1.0, 1.5, 0.005);
  for (Eigen::Index i = 0; i < pw.size(); ++i) pw.values[i] *= 1.0 + 0.5 * std::tanh(3.0 * pw.energy(i));
  pw.values /= integrate(pw, [](double) { return 1.0; });
  const Moments one = moments(pw);
  const double beta = 1.2;
  const double d1 = shift_of(pw, beta);
  for (int m : {2, 4, 8, 16}) {
    const SpectralDensity pm = self_convolve(pw, m);
    CHECK(integrate(pm, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-3));
    const Moments mm = moments(restrict_window(pm, pm.window));
    CHECK(mm.mean == doctest::Approx(m * one.mean).epsilon(0.01));
    CHECK(mm.std == doctest::Approx(std::sqrt(m) * one.std).epsilon(0.01));
    CHECK(shift_of(pm, beta) == doctest::Approx(m * d1).epsilon(0.01));
  }
}

TEST_CASE("finite-size scan fits") {
  std::map<int, WorkReport> reports;
  for (int L : {5, 6, 7}) {
    WorkReport r;
    r.L = L;
    r.Delta_E = 0.2 * std::sqrt(L);
    r.delta_E = 0.01 * L;
    r.delta_E_err = 0.002;
    reports[L] = r;
  }
  const ScalingReport s = finite_size_scan(reports);
  CHECK(s.Delta_E_sqrt.coefficient == doctest::Approx(0.2));
  CHECK(s.Delta_E_sqrt.rms_residual < 1e-12);
  CHECK(s.Delta_E_linear.rms_residual > 1e-3);
  CHECK(s.delta_E_linear.coefficient == doctest::Approx(0.01));
  REQUIRE(s.rows.size() == 3);
  CHECK(s.rows[2].copies_delta_E == doctest::Approx(0.05 * 7.0 / 5.0));
  CHECK(s.rows[2].copies_Delta_E == doctest::Approx(0.2 * std::sqrt(5.0) * std::sqrt(7.0 / 5.0)));
  const auto j = nlohmann::json::parse(scaling_report_json(s));
  CHECK(j.at("rows").size() == 3);
  reports.erase(7);
  CHECK_THROWS_AS(finite_size_scan(reports), InvalidInput);
}
