#include "ladderjr/chebyshev.hpp"

#include "ladderjr/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ladder {

double ChebCoefficients::evaluate(double x) const {
  double b1 = 0.0;
  double b2 = 0.0;
  for (Eigen::Index k = c.size() - 1; k >= 1; --k) {
    const double b0 = 2.0 * x * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  const double c0 = c.size() > 0 ? c[0] : 0.0;
  return x * b1 - b2 + 0.5 * c0;
}

ChebCoefficients chebyshev_coefficients(const std::function<double(double)>& f, int fft_size, double cutoff) {
  if (fft_size < 4 || (fft_size & (fft_size - 1)) != 0) {
    throw InvalidInput("Chebyshev FFT length must be a power of two >= 4, got " + std::to_string(fft_size));
  }
  std::vector<std::complex<double>> samples(fft_size);
  for (int n = 0; n < fft_size; ++n) {
    samples[n] = f(std::cos(2.0 * std::numbers::pi * n / fft_size));
  }
  // Eigen's inverse transform is (1/N) sum_n x_n e^{+2 pi i n k / N}.
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.inv(spectrum, samples);

  // K is the start of the sub-cutoff tail; the last two coefficients up to N/2 must
  // already be in that tail.
  // Coefficients at the transform's round-off level (8 eps max|c|) count as zero too.
  const int half = fft_size / 2;
  double cmax = 0.0;
  for (int k = 0; k <= half; ++k) cmax = std::max(cmax, std::abs(2.0 * spectrum[k].real()));
  const double floor = std::max(cutoff, 8.0 * std::numeric_limits<double>::epsilon() * cmax);
  auto small = [&](int k) { return std::abs(2.0 * spectrum[k].real()) < floor; };
  if (!small(half) || !small(half - 1)) {
    throw NumericalError("Chebyshev coefficients not below " + std::to_string(cutoff) + " by k = N/2 = " +
                         std::to_string(half) + "; increase the FFT length");
  }
  int terms = half - 1;
  while (terms > 0 && small(terms - 1)) --terms;
  ChebCoefficients out;
  out.fft_size = fft_size;
  out.c.resize(terms);
  for (int k = 0; k < terms; ++k) out.c[k] = 2.0 * spectrum[k].real();
  return out;
}

ChebCoefficients gaussian_coefficients(double scaled_a, double scaled_e) {
  auto gauss = [scaled_a, scaled_e](double x) { return std::exp(-scaled_a * (x - scaled_e) * (x - scaled_e) / 4.0); };
  // Bandwidth of the Gaussian in theta is ~sqrt(a_s); start a few widths beyond it.
  int n = 256;
  while (n < 16.0 * std::sqrt(scaled_a) + 64.0) n *= 2;
  for (; n <= (1 << 26); n *= 2) {
    try {
      return chebyshev_coefficients(gauss, n);
    } catch (const NumericalError&) {
    }
  }
  throw NumericalError("Gaussian filter expansion unresolved up to FFT length 2^26");
}

StateVector gaussian_filter(const LadderSpec& spec, const FilterParams& params, const StateVector& phi,
                            const MemoryBudget& budget, FilterReport* report) {
  if (!(params.a > 0.0)) throw ConfigError("filter sharpness a must be > 0");
  if (phi.spins() != spec.spins()) throw InvalidInput("state spin count does not match the ladder");
  budget.require(spec.spins(), 3, "gaussian_filter");

  const double bound = params.bound > 0.0 ? params.bound : spectral_bound(spec, 0.0);
  if (!(bound > 0.0)) {
    // Null Hamiltonian: the filter is the scalar exp(-a E^2 / 4).
    StateVector out = phi;
    out.mark_derived();
    out.normalize();
    return out;
  }
  const ChebCoefficients coeffs = gaussian_coefficients(params.a * bound * bound, params.e_ini / bound);

  const LadderHamiltonian ham(spec);
  const Amplitudes& v0 = phi.amplitudes();
  Amplitudes prev = v0;
  Amplitudes cur(v0.size());
  Amplitudes acc = (0.5 * coeffs.c[0]) * v0;
  const double inv_bound = 1.0 / bound;
  if (coeffs.size() > 1) {
    ham.apply(0.0, prev, cur, inv_bound);
    acc += coeffs.c[1] * cur;
  }
  // T_{k+1} = 2 H~ T_k - T_{k-1}, written over the T_{k-1} buffer.
  for (Eigen::Index k = 2; k < coeffs.size(); ++k) {
    ham.apply(0.0, cur, prev, 2.0 * inv_bound, -1.0);
    prev.swap(cur);
    acc += coeffs.c[k] * cur;
  }

  StateVector out(spec.spins(), std::move(acc));
  const double weight = norm_squared(out.amplitudes());
  if (!(weight > 0.0) || !std::isfinite(weight)) throw NumericalError("filtered state has zero weight");
  out.normalize();
  if (report) *report = {static_cast<int>(coeffs.size()), coeffs.fft_size, bound, weight};
  return out;
}

}  // namespace ladder
