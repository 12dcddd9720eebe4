#pragma once

#include "ladderjr/pf2.hpp"
#include "ladderjr/statevec.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ladder {

/// samples[j] = <psi(0)|psi(j dt)> for j = 0..K under the field-free Hamiltonian.
struct AutocorrSeries {
  Eigen::VectorXcd samples;
  double dt = 0.02;

  Eigen::Index steps() const { return samples.size() - 1; }
  double theta() const { return static_cast<double>(steps()) * dt; }
};

enum class DensityKind { Dos, Ldos };

const char* to_string(DensityKind kind);

/// Closed energy interval used for normalization, moments and weighted integrals.
struct EnergyWindow {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double e) const { return e >= lo && e <= hi; }
};

/// Density sampled on the uniform grid e0 + i * de.
///
/// The inversion yields a trigonometric polynomial on a periodic grid spanning
/// [-pi/dt, pi/dt); only the part inside `window` takes part in integrals.
struct SpectralDensity {
  DensityKind kind = DensityKind::Ldos;
  double e0 = 0.0;
  double de = 0.0;
  Eigen::VectorXd values;
  double resolution = 0.0;  ///< pi / Theta
  EnergyWindow window;
  /// Window integral before normalization (1 for an LDOS up to truncation ringing).
  double raw_integral = 0.0;

  Eigen::Index size() const { return values.size(); }
  double energy(Eigen::Index i) const { return e0 + static_cast<double>(i) * de; }
};

struct InversionOptions {
  /// Window for normalization and integrals; empty selects the whole grid.
  std::optional<EnergyWindow> window;
  /// Diagnostic Gaussian taper exp(-(3 t / Theta)^2 / 2) on the time series. Off for reproduction runs.
  bool gaussian_taper = false;
  bool normalize = true;
  /// Number of state vectors averaged into a DOS series.
  int vectors = 1;
};

/// Trapezoid integral of values * g(E) over the grid points inside the density's window.
double integrate(const SpectralDensity& density, const std::function<double(double)>& g);

/// Records the autocorrelation of psi over K PF2 steps.
AutocorrSeries autocorrelation(const LadderSpec& spec, const StateVector& psi, const IntegratorConfig& cfg,
                               std::size_t steps, const MemoryBudget& budget = {});

/// Element-wise mean of series sharing dt and length.
AutocorrSeries average(const std::vector<AutocorrSeries>& series);

/// Fourier inversion of <psi|e^{-iHt}|psi> over [-Theta, Theta] with rectangular truncation
/// onto the next power of two >= 4K grid points. Throws NumericalError on aliasing.
SpectralDensity invert_series(const AutocorrSeries& series, DensityKind kind, const InversionOptions& options = {});

/// DOS estimate from a Haar-random series, normalized to the sum rule 2^N.
SpectralDensity dos_estimate(const AutocorrSeries& series, int spins, const InversionOptions& options = {});

/// LDOS of psi, normalized to unit integral.
SpectralDensity ldos(const LadderSpec& spec, const StateVector& psi, const IntegratorConfig& cfg, std::size_t steps,
                     const InversionOptions& options = {}, const MemoryBudget& budget = {});

/// [-bound - pad, bound + pad] with the field-free spectral bound.
EnergyWindow default_window(const LadderSpec& spec, double pad = 0.5);

/// Spectrum edges from a DOS: the first and last energies where the cumulative state
/// count passes 1/2 from either end, widened by pad.
EnergyWindow spectral_edges(const SpectralDensity& dos, double pad = 0.5);

/// Copy with a new window, renormalized (LDOS to 1, DOS to its previous window integral).
SpectralDensity restrict_window(const SpectralDensity& density, const EnergyWindow& window);

/// Copy holding only grid points inside the window.
SpectralDensity crop(const SpectralDensity& density);

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and standard deviation over the window. Rejects an LDOS whose integral is not 1.
Moments moments(const SpectralDensity& density);

/// Grid energies of local maxima above rel_threshold * max, refined by parabolic interpolation.
std::vector<double> find_peaks(const SpectralDensity& density, double rel_threshold);

struct CsvMetadata {
  std::vector<std::pair<std::string, std::string>> entries;
};

/// "# key: value" header lines, then "E,n" (DOS) or "E,P" (LDOS) rows for the window.
void write_density_csv(std::ostream& os, const SpectralDensity& density, const CsvMetadata& meta = {});
SpectralDensity read_density_csv(std::istream& is);

}  // namespace ladder
