#include "ladderjr/oracle.hpp"

#include "ladderjr/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace ladder {

namespace {

void require_spins(int spins, int cap, const char* what) {
  if (spins > cap) {
    throw CapacityError(std::string(what) + " is limited to " + std::to_string(cap) + " spins, got " +
                            std::to_string(spins),
                        static_cast<unsigned long long>(std::ldexp(8.0, 2 * spins)));
  }
}

// V^T psi for real V and complex psi.
Amplitudes to_eigenbasis(const DenseSpectrum& s, const Amplitudes& psi) {
  return s.eigenvectors.transpose().cast<Complex>() * psi;
}

Amplitudes from_eigenbasis(const DenseSpectrum& s, const Amplitudes& coeff) {
  return s.eigenvectors.cast<Complex>() * coeff;
}

}  // namespace

Eigen::MatrixXd dense_hamiltonian(const LadderSpec& spec, double field_factor) {
  spec.validate();
  require_spins(spec.spins(), kOracleMaxSpins, "dense diagonalization");
  const LadderHamiltonian ham(spec);
  const auto d = static_cast<Eigen::Index>(spec.dim());
  Eigen::MatrixXd h(d, d);
  Amplitudes e = Amplitudes::Zero(d);
  Amplitudes col(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    e[j] = 1.0;
    ham.apply(field_factor, e, col);
    h.col(j) = col.real();
    e[j] = 0.0;
  }
  return h;
}

DenseSpectrum diagonalize(const LadderSpec& spec, double field_factor) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_hamiltonian(spec, field_factor));
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

StateVector exact_filter(const DenseSpectrum& spectrum, double a, double e_ini, const StateVector& phi) {
  Amplitudes c = to_eigenbasis(spectrum, phi.amplitudes());
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    const double x = spectrum.eigenvalues[n] - e_ini;
    c[n] *= std::exp(-a * x * x / 4.0);
  }
  StateVector out(phi.spins(), from_eigenbasis(spectrum, c));
  out.normalize();
  return out;
}

StateVector exact_propagate(const DenseSpectrum& spectrum, double t, const StateVector& psi) {
  Amplitudes c = to_eigenbasis(spectrum, psi.amplitudes());
  for (Eigen::Index n = 0; n < c.size(); ++n) c[n] *= std::polar(1.0, -spectrum.eigenvalues[n] * t);
  return StateVector(psi.spins(), from_eigenbasis(spectrum, c));
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> eigenspaces(const Eigen::VectorXd& eigenvalues, double tol) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  Eigen::Index begin = 0;
  for (Eigen::Index i = 1; i <= eigenvalues.size(); ++i) {
    if (i == eigenvalues.size() || eigenvalues[i] - eigenvalues[i - 1] > tol) {
      out.emplace_back(begin, i);
      begin = i;
    }
  }
  return out;
}

double WorkDistribution::total_weight() const {
  double s = 0.0;
  for (const auto& t : transitions) s += t.weight;
  return s;
}

double WorkDistribution::mean() const {
  double s = 0.0;
  for (const auto& t : transitions) s += t.weight * t.work();
  return s / total_weight();
}

double WorkDistribution::exp_average(double beta) const {
  double s = 0.0;
  for (const auto& t : transitions) s += t.weight * std::exp(-beta * t.work());
  return s;
}

WorkDistribution exact_work_distribution(const LadderSpec& spec, const FieldProtocol& protocol,
                                         const IntegratorConfig& cfg, const StateVector& psi0) {
  require_spins(spec.spins(), kWorkOracleMaxSpins, "exact work distribution");
  const DenseSpectrum s = diagonalize(spec, 0.0);
  const auto spaces = eigenspaces(s.eigenvalues);
  const Amplitudes c0 = to_eigenbasis(s, psi0.amplitudes());

  WorkDistribution dist;
  for (const auto& [nb, ne] : spaces) {
    Amplitudes c = Amplitudes::Zero(c0.size());
    c.segment(nb, ne - nb) = c0.segment(nb, ne - nb);
    if (c.squaredNorm() < 1e-300) continue;
    const StateVector projected(psi0.spins(), from_eigenbasis(s, c));
    const ProtocolResult r = run_protocol(spec, protocol, cfg, projected);
    const Amplitudes cf = to_eigenbasis(s, r.psi_final.amplitudes());
    const double e_ini = s.eigenvalues.segment(nb, ne - nb).mean();
    for (const auto& [mb, me] : spaces) {
      const double w = cf.segment(mb, me - mb).squaredNorm();
      dist.transitions.push_back({e_ini, s.eigenvalues.segment(mb, me - mb).mean(), w});
    }
  }
  return dist;
}

}  // namespace ladder
