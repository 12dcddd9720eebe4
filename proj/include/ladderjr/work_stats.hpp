#pragma once

#include "ladderjr/spectral.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ladder {

/// Least-squares slope of ln n(E) over [E_ini - epsilon, E_ini + epsilon].
struct BetaFit {
  double beta = 0.0;
  double epsilon = 0.0;
  /// Uncertainty: spread of the epsilon sweep when produced by fit_beta_sweep,
  /// otherwise the regression standard error of the slope.
  double uncertainty = 0.0;
  double slope_stderr = 0.0;
  EnergyWindow window;
  int points = 0;
  /// (epsilon, beta) pairs of the sensitivity sweep.
  std::vector<std::pair<double, double>> sweep;
};

/// Densities at or below 1e-12 * max are clamped for the logarithm; more than 10% clamped
/// points, or fewer than 10 usable points, raise NumericalError.
BetaFit fit_beta(const SpectralDensity& dos, double e_ini, double epsilon);

/// Fits at every epsilon; reports the fit at `report_epsilon` with the sweep spread
/// max |beta_eps - beta_report| as its uncertainty.
BetaFit fit_beta_sweep(const SpectralDensity& dos, double e_ini, const std::vector<double>& epsilons,
                       double report_epsilon = 0.5);

/// int P(E) e^{-beta (E - e_ref)} dE over the density's window.
double exp_moment(const SpectralDensity& p, double beta, double e_ref);

/// <e^{-beta W}> = int P_fin e^{-beta E} / int P_ini e^{-beta E}, both integrals recentered
/// at e_ref (default: mean of P_ini). Throws NumericalError if the denominator underflows.
double exp_work_average(const SpectralDensity& p_fin, const SpectralDensity& p_ini, double beta,
                        std::optional<double> e_ref = std::nullopt);

/// <W> = <E>_fin - <E>_ini.
double mean_work(const SpectralDensity& p_fin, const SpectralDensity& p_ini);

/// delta E = -ln(exp_avg) / beta.
double delta_shift(double exp_avg, double beta);

/// P(E + dE) represented exactly by translating the grid (and window) by -dE.
SpectralDensity shifted_distribution(const SpectralDensity& p, double dE);

/// Band-limited (periodic FFT) resampling onto the grid e0 + i de of `target`, which must
/// share spacing and length with `p`. The window is taken from `target`.
SpectralDensity resample_like(const SpectralDensity& p, const SpectralDensity& target);

/// Mass of P below mean - 3 std, and its share of the exponential-weight integral.
struct TailDiagnostics {
  double lower_tail_mass = 0.0;
  double lower_tail_weight_share = 0.0;
  double skewness = 0.0;
};

TailDiagnostics tail_diagnostics(const SpectralDensity& p, double beta);

struct WorkReport {
  int L = 0;
  double gamma = 0.0;
  double gamma_over_gamma0 = 0.0;
  BetaFit beta_used;
  double exp_avg = 0.0;
  double exp_mean = 0.0;
  double mean_W = 0.0;
  double delta_E = 0.0;
  double delta_E_err = 0.0;
  double Delta_E = 0.0;
  TailDiagnostics tails;
};

/// Assembles the full report; delta_E_err propagates beta_used.uncertainty through
/// exp_work_average and delta_shift.
WorkReport work_report(const SpectralDensity& p_fin, const SpectralDensity& p_ini, const BetaFit& beta, int L,
                       double gamma, double gamma0);

std::string work_report_csv_header();
std::string work_report_csv_row(const WorkReport& r);
std::string work_report_json(const WorkReport& r);

/// Grid self-convolution P^{*M} (linear, spacing preserved).
SpectralDensity self_convolve(const SpectralDensity& p, int copies);

struct PowerFit {
  double coefficient = 0.0;
  double rms_residual = 0.0;
  double chi2 = 0.0;
};

struct ScalingRow {
  int L = 0;
  double Delta_E = 0.0;
  double delta_E = 0.0;
  double delta_E_err = 0.0;
  double ratio = 0.0;
  /// Disconnected-copies reference from the smallest size: M = L / L_min.
  double copies_delta_E = 0.0;
  double copies_Delta_E = 0.0;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  PowerFit Delta_E_sqrt;
  PowerFit Delta_E_linear;
  PowerFit delta_E_sqrt;
  PowerFit delta_E_linear;
};

/// Fits Delta_E(L) and delta_E(L) to c sqrt(L) and c L; needs at least three sizes.
ScalingReport finite_size_scan(const std::map<int, WorkReport>& reports);

std::string scaling_report_json(const ScalingReport& r);

}  // namespace ladder
