#include "ladderjr/lattice.hpp"

#include "ladderjr/errors.hpp"

#include <cmath>
#include <string>

namespace ladder {

void LadderSpec::validate() const {
  if (L < 1) throw ConfigError("ladder length L must be >= 1, got " + std::to_string(L));
  if (L > 31) throw ConfigError("ladder length L=" + std::to_string(L) + " exceeds the 62-spin index range");
  if (!(j_par > 0.0)) throw ConfigError("leg coupling j_par must be > 0");
  if (!(j_perp >= 0.0)) throw ConfigError("rung coupling j_perp must be >= 0");
  if (!std::isfinite(delta)) throw ConfigError("anisotropy delta must be finite");
}

double FieldProtocol::shape(double t) const {
  if (t <= 0.0 || t > 2.0 * tau) return 0.0;
  if (t <= tau) return t / tau;
  return 2.0 - t / tau;
}

std::vector<Bond> exchange_bonds(const LadderSpec& spec) {
  std::vector<Bond> bonds;
  for (int i = 0; i + 1 < spec.L; ++i) {
    for (int k = 0; k < 2; ++k) {
      bonds.push_back({SiteIndex{i, k}.bit(), SiteIndex{i + 1, k}.bit(), spec.j_par});
    }
  }
  for (int i = 0; i < spec.L; ++i) {
    bonds.push_back({SiteIndex{i, 0}.bit(), SiteIndex{i, 1}.bit(), spec.j_perp});
  }
  return bonds;
}

TermGroups term_groups(const LadderSpec& spec) {
  TermGroups groups;
  for (const Bond& b : exchange_bonds(spec)) {
    groups.x.push_back(b);
    groups.y.push_back(b);
    groups.z.push_back({b.a, b.b, b.coupling * spec.delta});
  }
  return groups;
}

LadderHamiltonian::LadderHamiltonian(const LadderSpec& spec) : spec_(spec), bonds_(exchange_bonds(spec)) {
  spec_.validate();
  const std::uint64_t dim = spec_.dim();
  zz_.assign(dim, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(dim); ++s) {
    double e = 0.0;
    for (const Bond& b : bonds_) {
      const bool aligned = (((s >> b.a) ^ (s >> b.b)) & 1) == 0;
      e += (aligned ? 0.25 : -0.25) * b.coupling * spec_.delta;
    }
    zz_[s] = e;
  }
}

void LadderHamiltonian::apply(double field_factor, Eigen::Ref<const Amplitudes> in, Eigen::Ref<Amplitudes> out,
                              double alpha, double beta) const {
  const auto dim = static_cast<std::int64_t>(this->dim());
  if (in.size() != dim || out.size() != dim) {
    throw InvalidInput("state dimension " + std::to_string(in.size()) + " does not match Hilbert dimension " +
                       std::to_string(dim));
  }
  if (!std::isfinite(field_factor)) throw InvalidInput("field factor must be finite");

  const Complex* src = in.data();
  Complex* dst = out.data();
  const Bond* bonds = bonds_.data();
  const auto nbonds = bonds_.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < dim; ++s) {
    const double diag = zz_[s] - field_factor * staggered_magnetization(static_cast<std::uint64_t>(s));
    Complex acc = diag * src[s];
    for (std::size_t n = 0; n < nbonds; ++n) {
      const Bond& b = bonds[n];
      // Flip-flop (S+S- + S-S+)/2 connects antiparallel pairs only.
      if ((((s >> b.a) ^ (s >> b.b)) & 1) != 0) {
        acc += (0.5 * b.coupling) * src[s ^ ((std::int64_t{1} << b.a) | (std::int64_t{1} << b.b))];
      }
    }
    dst[s] = beta == 0.0 ? alpha * acc : alpha * acc + beta * dst[s];
  }
}

Amplitudes LadderHamiltonian::apply(double field_factor, const Amplitudes& psi) const {
  Amplitudes out(psi.size());
  apply(field_factor, psi, out);
  return out;
}

double LadderHamiltonian::expectation(double field_factor, const Amplitudes& psi) const {
  const Amplitudes hpsi = apply(field_factor, psi);
  return psi.dot(hpsi).real();
}

Amplitudes apply_hamiltonian(const LadderSpec& spec, double field_factor, const Amplitudes& psi) {
  return LadderHamiltonian(spec).apply(field_factor, psi);
}

double spectral_bound(const LadderSpec& spec, double h_max) {
  double bound = 0.0;
  for (const Bond& b : exchange_bonds(spec)) bound += std::abs(b.coupling) * (2.0 + std::abs(spec.delta)) / 4.0;
  return bound + std::abs(h_max) * spec.L;
}

}  // namespace ladder
