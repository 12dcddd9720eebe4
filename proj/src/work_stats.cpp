#include "ladderjr/work_stats.hpp"

#include "ladderjr/errors.hpp"

#include <json.hpp>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace ladder {

namespace {

double total_weight(const SpectralDensity& p) {
  return integrate(p, [](double) { return 1.0; });
}

nlohmann::json fit_json(const PowerFit& f) {
  return {{"coefficient", f.coefficient}, {"rms_residual", f.rms_residual}, {"chi2", f.chi2}};
}

PowerFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y,
                            const std::vector<double>& sigma) {
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = sigma[i] > 0.0 ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
    sxy += w * x[i] * y[i];
    sxx += w * x[i] * x[i];
  }
  PowerFit fit;
  fit.coefficient = sxx > 0.0 ? sxy / sxx : 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.coefficient * x[i];
    const double w = sigma[i] > 0.0 ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
    ss += r * r;
    fit.chi2 += w * r * r;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(x.size()));
  return fit;
}

}  // namespace

BetaFit fit_beta(const SpectralDensity& dos, double e_ini, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidInput("fit half-window epsilon must be > 0");
  const double lo = e_ini - epsilon;
  const double hi = e_ini + epsilon;
  if (lo < dos.e0 || hi > dos.energy(dos.size() - 1)) throw InvalidInput("beta fit window lies outside the DOS grid");
  const double floor = 1e-12 * dos.values.maxCoeff();

  std::vector<double> xs;
  std::vector<double> ys;
  int candidates = 0;
  const auto first = static_cast<Eigen::Index>(std::ceil((lo - dos.e0) / dos.de));
  const auto last = static_cast<Eigen::Index>(std::floor((hi - dos.e0) / dos.de));
  for (Eigen::Index i = std::max<Eigen::Index>(0, first); i <= std::min(last, dos.size() - 1); ++i) {
    ++candidates;
    if (dos.values[i] > floor) {
      xs.push_back(dos.energy(i) - e_ini);
      ys.push_back(std::log(dos.values[i]));
    }
  }
  const int clamped = candidates - static_cast<int>(xs.size());
  if (clamped > 0.1 * candidates) {
    throw NumericalError("beta fit unreliable: " + std::to_string(clamped) + " of " + std::to_string(candidates) +
                         " points in the window have non-positive density");
  }
  if (xs.size() < 10) throw NumericalError("beta fit needs at least 10 usable grid points");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - my - slope * (xs[i] - mx);
    ssr += r * r;
  }
  BetaFit fit;
  fit.beta = slope;
  fit.epsilon = epsilon;
  fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
  fit.uncertainty = fit.slope_stderr;
  fit.window = {lo, hi};
  fit.points = static_cast<int>(xs.size());
  return fit;
}

BetaFit fit_beta_sweep(const SpectralDensity& dos, double e_ini, const std::vector<double>& epsilons,
                       double report_epsilon) {
  BetaFit reported = fit_beta(dos, e_ini, report_epsilon);
  double spread = 0.0;
  for (double eps : epsilons) {
    const double b = eps == report_epsilon ? reported.beta : fit_beta(dos, e_ini, eps).beta;
    reported.sweep.emplace_back(eps, b);
    spread = std::max(spread, std::abs(b - reported.beta));
  }
  reported.uncertainty = spread;
  return reported;
}

double exp_moment(const SpectralDensity& p, double beta, double e_ref) {
  return integrate(p, [beta, e_ref](double e) { return std::exp(-beta * (e - e_ref)); });
}

double exp_work_average(const SpectralDensity& p_fin, const SpectralDensity& p_ini, double beta,
                        std::optional<double> e_ref) {
  const double ref =
      e_ref.value_or(integrate(p_ini, [](double e) { return e; }) / total_weight(p_ini));
  const double den = exp_moment(p_ini, beta, ref);
  if (!(std::abs(den) >= 1e-300)) {
    throw NumericalError("exponential work average denominator underflows; recenter the energies");
  }
  return exp_moment(p_fin, beta, ref) / den;
}

double mean_work(const SpectralDensity& p_fin, const SpectralDensity& p_ini) {
  return moments(p_fin).mean - moments(p_ini).mean;
}

double delta_shift(double exp_avg, double beta) {
  if (!(exp_avg > 0.0)) throw InvalidInput("delta_shift needs a positive exponential average");
  if (!(beta > 0.0)) throw InvalidInput("delta_shift needs beta > 0");
  return -std::log(exp_avg) / beta;
}

SpectralDensity shifted_distribution(const SpectralDensity& p, double dE) {
  if (!std::isfinite(dE) || std::abs(dE) > 0.5 * (p.window.hi - p.window.lo)) {
    throw InvalidInput("shift exceeds half the density window");
  }
  SpectralDensity out = p;
  out.e0 -= dE;
  out.window = {p.window.lo - dE, p.window.hi - dE};
  return out;
}

SpectralDensity resample_like(const SpectralDensity& p, const SpectralDensity& target) {
  const Eigen::Index n = p.size();
  if (target.size() != n || std::abs(target.de - p.de) > 1e-12 * p.de) {
    throw InvalidInput("band-limited resampling needs grids of equal spacing and length");
  }
  const double frac = (target.e0 - p.e0) / p.de;
  std::vector<std::complex<double>> v(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = p.values[i];
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, v);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index m = k <= n / 2 ? k : k - n;
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(m) * frac / static_cast<double>(n);
    if (2 * k == n) {
      spec[static_cast<std::size_t>(k)] *= std::cos(phase);  // Nyquist bin stays real
    } else {
      spec[static_cast<std::size_t>(k)] *= std::polar(1.0, phase);
    }
  }
  std::vector<std::complex<double>> back;
  fft.inv(back, spec);
  SpectralDensity out = p;
  out.e0 = target.e0;
  out.window = target.window;
  for (Eigen::Index i = 0; i < n; ++i) out.values[i] = back[static_cast<std::size_t>(i)].real();
  return out;
}

TailDiagnostics tail_diagnostics(const SpectralDensity& p, double beta) {
  const double w = total_weight(p);
  const double mean = integrate(p, [](double e) { return e; }) / w;
  const double var = integrate(p, [mean](double e) { return (e - mean) * (e - mean); }) / w;
  const double sd = std::sqrt(std::max(var, 0.0));
  const double cut = mean - 3.0 * sd;
  TailDiagnostics t;
  t.lower_tail_mass = integrate(p, [cut](double e) { return e < cut ? 1.0 : 0.0; }) / w;
  const double all = exp_moment(p, beta, mean);
  t.lower_tail_weight_share =
      integrate(p, [cut, beta, mean](double e) { return e < cut ? std::exp(-beta * (e - mean)) : 0.0; }) / all;
  if (sd > 0.0) {
    t.skewness = integrate(p, [mean](double e) { return std::pow(e - mean, 3); }) / w / (sd * sd * sd);
  }
  return t;
}

WorkReport work_report(const SpectralDensity& p_fin, const SpectralDensity& p_ini, const BetaFit& beta, int L,
                       double gamma, double gamma0) {
  WorkReport r;
  r.L = L;
  r.gamma = gamma;
  r.gamma_over_gamma0 = gamma / gamma0;
  r.beta_used = beta;
  r.exp_avg = exp_work_average(p_fin, p_ini, beta.beta);
  r.mean_W = mean_work(p_fin, p_ini);
  r.exp_mean = std::exp(-beta.beta * r.mean_W);
  r.delta_E = delta_shift(r.exp_avg, beta.beta);
  r.Delta_E = moments(p_fin).std;
  for (double b : {beta.beta - beta.uncertainty, beta.beta + beta.uncertainty}) {
    if (b > 0.0 && beta.uncertainty > 0.0) {
      const double d = delta_shift(exp_work_average(p_fin, p_ini, b), b);
      r.delta_E_err = std::max(r.delta_E_err, std::abs(d - r.delta_E));
    }
  }
  r.tails = tail_diagnostics(p_fin, beta.beta);
  return r;
}

std::string work_report_csv_header() {
  return "L,gamma_over_gamma0,beta,beta_err,exp_avg,exp_mean,mean_W,delta_E,delta_E_err,Delta_E";
}

std::string work_report_csv_row(const WorkReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.L,
                r.gamma_over_gamma0, r.beta_used.beta, r.beta_used.uncertainty, r.exp_avg, r.exp_mean, r.mean_W,
                r.delta_E, r.delta_E_err, r.Delta_E);
  return buf;
}

std::string work_report_json(const WorkReport& r) {
  nlohmann::json sweep = nlohmann::json::array();
  for (const auto& [eps, b] : r.beta_used.sweep) sweep.push_back({{"epsilon", eps}, {"beta", b}});
  nlohmann::json j = {
      {"L", r.L},
      {"gamma", r.gamma},
      {"gamma_over_gamma0", r.gamma_over_gamma0},
      {"beta", {{"value", r.beta_used.beta},
                {"epsilon", r.beta_used.epsilon},
                {"uncertainty", r.beta_used.uncertainty},
                {"slope_stderr", r.beta_used.slope_stderr},
                {"window", {r.beta_used.window.lo, r.beta_used.window.hi}},
                {"sweep", sweep}}},
      {"exp_avg", r.exp_avg},
      {"exp_mean", r.exp_mean},
      {"mean_W", r.mean_W},
      {"delta_E", r.delta_E},
      {"delta_E_err", r.delta_E_err},
      {"Delta_E", r.Delta_E},
      {"tails", {{"lower_tail_mass", r.tails.lower_tail_mass},
                 {"lower_tail_weight_share", r.tails.lower_tail_weight_share},
                 {"skewness", r.tails.skewness}}},
  };
  return j.dump(2);
}

SpectralDensity self_convolve(const SpectralDensity& p, int copies) {
  if (copies < 1) throw InvalidInput("self_convolve needs at least one copy");
  const SpectralDensity base = crop(p);
  SpectralDensity out = base;
  for (int m = 1; m < copies; ++m) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(out.size() + base.size() - 1);
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      for (Eigen::Index j = 0; j < base.size(); ++j) next[i + j] += out.values[i] * base.values[j];
    }
    out.values = next * base.de;
    out.e0 += base.e0;
  }
  out.window = {out.e0, out.energy(out.size() - 1)};
  out.raw_integral = total_weight(out);
  return out;
}

ScalingReport finite_size_scan(const std::map<int, WorkReport>& reports) {
  if (reports.size() < 3) throw InvalidInput("finite-size scan needs at least three system sizes");
  ScalingReport out;
  const WorkReport& smallest = reports.begin()->second;
  const double l_min = reports.begin()->first;
  std::vector<double> sqrt_l;
  std::vector<double> lin_l;
  std::vector<double> big;
  std::vector<double> small;
  std::vector<double> big_err;
  std::vector<double> small_err;
  for (const auto& [L, r] : reports) {
    ScalingRow row;
    row.L = L;
    row.Delta_E = r.Delta_E;
    row.delta_E = r.delta_E;
    row.delta_E_err = r.delta_E_err;
    row.ratio = r.Delta_E > 0.0 ? r.delta_E / r.Delta_E : 0.0;
    const double copies = L / l_min;
    row.copies_delta_E = copies * smallest.delta_E;
    row.copies_Delta_E = std::sqrt(copies) * smallest.Delta_E;
    out.rows.push_back(row);
    sqrt_l.push_back(std::sqrt(static_cast<double>(L)));
    lin_l.push_back(static_cast<double>(L));
    big.push_back(r.Delta_E);
    small.push_back(r.delta_E);
    big_err.push_back(0.0);
    small_err.push_back(r.delta_E_err);
  }
  out.Delta_E_sqrt = fit_through_origin(sqrt_l, big, big_err);
  out.Delta_E_linear = fit_through_origin(lin_l, big, big_err);
  out.delta_E_sqrt = fit_through_origin(sqrt_l, small, small_err);
  out.delta_E_linear = fit_through_origin(lin_l, small, small_err);
  return out;
}

std::string scaling_report_json(const ScalingReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ScalingRow& row : r.rows) {
    rows.push_back({{"L", row.L},
                    {"Delta_E", row.Delta_E},
                    {"delta_E", row.delta_E},
                    {"delta_E_err", row.delta_E_err},
                    {"delta_E_over_Delta_E", row.ratio},
                    {"copies_delta_E", row.copies_delta_E},
                    {"copies_Delta_E", row.copies_Delta_E}});
  }
  nlohmann::json j = {{"rows", rows},
                      {"fits",
                       {{"Delta_E_sqrtL", fit_json(r.Delta_E_sqrt)},
                        {"Delta_E_L", fit_json(r.Delta_E_linear)},
                        {"delta_E_sqrtL", fit_json(r.delta_E_sqrt)},
                        {"delta_E_L", fit_json(r.delta_E_linear)}}}};
  return j.dump(2);
}

}  // namespace ladder
