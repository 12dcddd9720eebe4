#pragma once

#include "ladderjr/pf2.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ladder {

/// Full eigendecomposition H V = V diag(E) of the materialized Hamiltonian.
/// H is real symmetric in the S^z basis, so V is real orthogonal.
struct DenseSpectrum {
  Eigen::VectorXd eigenvalues;  ///< ascending
  Eigen::MatrixXd eigenvectors;
};

inline constexpr int kOracleMaxSpins = 12;
inline constexpr int kWorkOracleMaxSpins = 10;

/// Dense matrix of H_tot, built column by column from the matrix-free operator.
Eigen::MatrixXd dense_hamiltonian(const LadderSpec& spec, double field_factor);

/// Throws CapacityError above 12 spins.
DenseSpectrum diagonalize(const LadderSpec& spec, double field_factor);

/// Normalized exp(-a (H - e_ini)^2 / 4) phi evaluated in the eigenbasis.
StateVector exact_filter(const DenseSpectrum& spectrum, double a, double e_ini, const StateVector& phi);

/// e^{-iHt} psi for the constant Hamiltonian of `spectrum`.
StateVector exact_propagate(const DenseSpectrum& spectrum, double t, const StateVector& psi);

/// Groups eigenvalues closer than `tol` into eigenspaces; returns [begin, end) index ranges.
std::vector<std::pair<Eigen::Index, Eigen::Index>> eigenspaces(const Eigen::VectorXd& eigenvalues,
                                                               double tol = 1e-9);

/// One (E_ini -> E_fin) transition of the two-measurement scheme.
struct WorkTransition {
  double e_ini = 0.0;
  double e_fin = 0.0;
  double weight = 0.0;

  double work() const { return e_fin - e_ini; }
};

struct WorkDistribution {
  std::vector<WorkTransition> transitions;

  double total_weight() const;
  double mean() const;
  /// sum_nm w_nm exp(-beta (E_m - E_n)).
  double exp_average(double beta) const;
};

/// Exact two-measurement work distribution of psi0 under the protocol: each initial
/// eigenspace projection is propagated with PF2 at cfg.dt and projected onto the final
/// eigenspaces. The protocol starts and ends at the field-free Hamiltonian.
/// Throws CapacityError above 10 spins.
WorkDistribution exact_work_distribution(const LadderSpec& spec, const FieldProtocol& protocol,
                                         const IntegratorConfig& cfg, const StateVector& psi0);

}  // namespace ladder
