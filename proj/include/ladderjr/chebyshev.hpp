#pragma once

#include "ladderjr/lattice.hpp"
#include "ladderjr/statevec.hpp"

#include <functional>

namespace ladder {

/// Coefficients of f(x) = c_0/2 + sum_{k>=1} c_k T_k(x) on [-1, 1], truncated where the
/// tail falls below `cutoff` (or the transform's round-off floor) for good.
struct ChebCoefficients {
  Eigen::VectorXd c;
  int fft_size = 0;

  Eigen::Index size() const { return c.size(); }
  /// Evaluates the truncated series at x in [-1, 1] (Clenshaw).
  double evaluate(double x) const;
};

inline constexpr double kChebCutoff = 1e-16;

/// c_k = Re[(2/N) sum_n f(cos 2 pi n / N) e^{2 pi i n k / N}] via an FFT of length N.
/// Throws NumericalError when the coefficients have not decayed below `cutoff` by N/2.
ChebCoefficients chebyshev_coefficients(const std::function<double(double)>& f, int fft_size,
                                        double cutoff = kChebCutoff);

/// Parameters of the energy filter exp(-a (H - E)^2 / 4).
struct FilterParams {
  double a = 1000.0;
  double e_ini = 0.0;
  /// Rescaling bound; 0 selects spectral_bound(spec, 0).
  double bound = 0.0;
};

struct FilterReport {
  int terms = 0;
  int fft_size = 0;
  double bound = 0.0;
  /// <phi| exp(-a (H - E)^2 / 2) |phi>, the squared norm before normalization.
  double weight = 0.0;
};

/// Normalized exp(-a (H - E_ini)^2 / 4) |phi> for the field-free Hamiltonian, computed with
/// the Chebyshev recursion on H / bound. Holds three state-sized workspaces.
StateVector gaussian_filter(const LadderSpec& spec, const FilterParams& params, const StateVector& phi,
                            const MemoryBudget& budget = {}, FilterReport* report = nullptr);

/// Expansion of exp(-a_s (x - e_s)^2 / 4) on [-1, 1]; doubles the FFT length until resolved.
ChebCoefficients gaussian_coefficients(double scaled_a, double scaled_e);

}  // namespace ladder
