#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <vector>

namespace ladder {

using Complex = std::complex<double>;
using Amplitudes = Eigen::VectorXcd;

/// Geometry and couplings of the two-leg spin-1/2 XXZ ladder.
///
/// Spin (i, k) sits on rung i in [0, L) and leg k in {0, 1}; it is stored in bit
/// 2*i + k of the basis-state index, with bit value 1 meaning spin up (S^z = +1/2).
/// Legs have open ends. Rungs couple (i, 0) to (i, 1).
struct LadderSpec {
  int L = 1;
  double j_par = 1.0;
  double j_perp = 0.2;
  double delta = 0.6;

  int spins() const { return 2 * L; }
  std::uint64_t dim() const { return std::uint64_t{1} << spins(); }

  /// Throws ConfigError on L < 1, L > 31, j_par <= 0 or j_perp < 0.
  void validate() const;

  bool operator==(const LadderSpec&) const = default;
};

struct SiteIndex {
  int rung = 0;
  int leg = 0;

  int bit() const { return 2 * rung + leg; }
  static SiteIndex from_bit(int bit) { return {bit / 2, bit % 2}; }
};

/// Triangular field ramp h(t) = -h f(t) (S^z_1 - S^z_2) with f rising linearly on
/// (0, tau] and falling back to zero on (tau, 2 tau].
struct FieldProtocol {
  double h = 0.5;
  double tau = 1.0;

  double gamma() const { return 1.0 / (2.0 * tau); }
  double duration() const { return 2.0 * tau; }
  double shape(double t) const;
  double field_factor(double t) const { return h * shape(t); }

  static FieldProtocol from_rate(double h, double gamma) { return {h, 1.0 / (2.0 * gamma)}; }
};

/// Two-site term coupling * S^a_i S^a_j for one spin axis a; i and j are bit positions.
struct Bond {
  int a = 0;
  int b = 0;
  double coupling = 0.0;
};

/// Axis-resolved split of the exchange terms. Bonds inside a group commute.
/// The staggered field is diagonal and travels with the z group.
struct TermGroups {
  std::vector<Bond> x;
  std::vector<Bond> y;
  std::vector<Bond> z;
};

/// Exchange bonds in fixed order: leg bonds rung by rung (leg 0 then leg 1), then rungs.
std::vector<Bond> exchange_bonds(const LadderSpec& spec);

TermGroups term_groups(const LadderSpec& spec);

/// Staggered magnetization S^z_1 - S^z_2 of a basis state (integer valued).
inline int staggered_magnetization(std::uint64_t state) {
  constexpr std::uint64_t leg0 = 0x5555555555555555ull;
  constexpr std::uint64_t leg1 = 0xAAAAAAAAAAAAAAAAull;
  return __builtin_popcountll(state & leg0) - __builtin_popcountll(state & leg1);
}

/// Matrix-free ladder Hamiltonian with the staggered field term.
///
/// The total operator is H - field_factor * (S^z_1 - S^z_2); callers fold h f(t)
/// into field_factor. The diagonal exchange energies are tabulated once.
class LadderHamiltonian {
 public:
  explicit LadderHamiltonian(const LadderSpec& spec);

  const LadderSpec& spec() const { return spec_; }
  std::uint64_t dim() const { return spec_.dim(); }
  const std::vector<Bond>& bonds() const { return bonds_; }

  /// Diagonal exchange energy sum_b J_b Delta S^z_a S^z_b of a basis state.
  double exchange_diagonal(std::uint64_t state) const { return zz_[state]; }
  const std::vector<double>& exchange_diagonal() const { return zz_; }

  /// out <- alpha * H_tot * in + beta * out. `in` and `out` must not alias.
  /// Each output amplitude is a fixed-order sum, so threading does not change results.
  void apply(double field_factor, Eigen::Ref<const Amplitudes> in, Eigen::Ref<Amplitudes> out,
             double alpha = 1.0, double beta = 0.0) const;

  Amplitudes apply(double field_factor, const Amplitudes& psi) const;

  /// <psi| H_tot |psi> (real part; the imaginary part vanishes up to round-off).
  double expectation(double field_factor, const Amplitudes& psi) const;

 private:
  LadderSpec spec_;
  std::vector<Bond> bonds_;
  std::vector<double> zz_;
};

/// Convenience wrapper: returns H_tot psi for a freshly built operator.
Amplitudes apply_hamiltonian(const LadderSpec& spec, double field_factor, const Amplitudes& psi);

/// Triangle-inequality bound on ||H_tot|| valid for every field factor in [0, h_max].
double spectral_bound(const LadderSpec& spec, double h_max);

}  // namespace ladder
