#include "ladderjr/pf2.hpp"

#include "ladderjr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

namespace ladder {

namespace {

// Index of the i-th basis state whose bit `bit` is zero.
inline std::int64_t insert_zero(std::int64_t i, int bit) {
  const std::int64_t low = i & ((std::int64_t{1} << bit) - 1);
  return ((i >> bit) << (bit + 1)) | low;
}

// psi <- G^{(x) N} psi for a 2x2 matrix G = [[g00, g01], [g10, g11]] acting on bit value (0, 1).
void rotate_all(Eigen::Ref<Amplitudes> psi, int spins, Complex g00, Complex g01, Complex g10, Complex g11) {
  Complex* a = psi.data();
  const std::int64_t pairs = psi.size() / 2;
  for (int q = 0; q < spins; ++q) {
    const std::int64_t flip = std::int64_t{1} << q;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < pairs; ++i) {
      const std::int64_t p = insert_zero(i, q);
      const Complex v0 = a[p];
      const Complex v1 = a[p | flip];
      a[p] = g00 * v0 + g01 * v1;
      a[p | flip] = g10 * v0 + g11 * v1;
    }
  }
}

// (u, v) <- (c u + i k v, c v + i k u) on interleaved (re, im) storage.
inline void rotate_pair(double* u, double* v, double c, double k) {
  const double ur = u[0], ui = u[1], vr = v[0], vi = v[1];
  u[0] = c * ur - k * vi;
  u[1] = c * ui + k * vr;
  v[0] = c * vr - k * ui;
  v[1] = c * vi + k * ur;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step dt must be > 0");
}

Pf2Propagator::Pf2Propagator(const LadderSpec& spec, double dt, Kernel kernel)
    : spec_(spec), dt_(dt), kernel_(kernel), bonds_(exchange_bonds(spec)) {
  spec_.validate();
  IntegratorConfig{dt}.validate();
  for (const Bond& b : bonds_) {
    // e^{-i tau J S^a S^a} = cos(tau J / 4) - i sin(tau J / 4) sigma^a sigma^a
    const double theta = 0.5 * dt * b.coupling / 4.0;
    half_forward_.push_back({std::cos(theta), std::sin(theta)});
    half_backward_.push_back({std::cos(theta), -std::sin(theta)});
    full_forward_.push_back({std::cos(2.0 * theta), std::sin(2.0 * theta)});
  }
  const LadderHamiltonian ham(spec_);
  zz_ = ham.exchange_diagonal();
  const auto dim = static_cast<Eigen::Index>(spec_.dim());
  zz_forward_.resize(dim);
  zz_backward_.resize(dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    zz_forward_[s] = std::polar(1.0, -dt * zz_[s]);
    zz_backward_[s] = std::conj(zz_forward_[s]);
  }
}

void Pf2Propagator::apply_group(Eigen::Ref<Amplitudes> psi, Axis axis, const std::vector<GatePhase>& phases) const {
  double* a = reinterpret_cast<double*>(psi.data());
  for (std::size_t n = 0; n < bonds_.size(); ++n) {
    const Bond& b = bonds_[n];
    const double c = phases[n].cos;
    const double s = phases[n].sin;
    if (s == 0.0) continue;
    const int lo = std::min(b.a, b.b);
    const int hi = std::max(b.a, b.b);
    const std::int64_t mlo = std::int64_t{1} << lo;
    const std::int64_t mhi = std::int64_t{1} << hi;
    // Pair (00, 11) couples with -i s * (+1 for xx, -1 for yy); pair (01, 10) with -i s.
    const double k_par = axis == Axis::Y ? s : -s;
    const double k_anti = -s;
    // Blocks of 2 mhi hold runs of mlo consecutive indices with both bits clear; the
    // innermost loop is contiguous so it vectorizes once lo > 0.
    const std::int64_t blocks = psi.size() / (2 * mhi);
    const std::int64_t runs = mhi / (2 * mlo);
#pragma omp parallel for collapse(2) schedule(static)
    for (std::int64_t blk = 0; blk < blocks; ++blk) {
      for (std::int64_t run = 0; run < runs; ++run) {
        const std::int64_t start = blk * 2 * mhi + run * 2 * mlo;
        double* __restrict p00 = a + 2 * start;
        double* __restrict p01 = a + 2 * (start + mlo);
        double* __restrict p10 = a + 2 * (start + mhi);
        double* __restrict p11 = a + 2 * (start + mlo + mhi);
        for (std::int64_t j = 0; j < 2 * mlo; j += 2) {
          rotate_pair(p00 + j, p11 + j, c, k_par);
          rotate_pair(p01 + j, p10 + j, c, k_anti);
        }
      }
    }
  }
}

void Pf2Propagator::apply_group_rotated(Eigen::Ref<Amplitudes> psi, Axis axis, double time) const {
  const double r = 1.0 / std::numbers::sqrt2;
  const Complex i1(0.0, 1.0);
  if (axis == Axis::X) {
    rotate_all(psi, spec_.spins(), r, r, r, -r);
  } else {
    // W^dagger with W = [[1, 1], [-i, i]] / sqrt 2, the eigenvectors of sigma^y.
    rotate_all(psi, spec_.spins(), r, r * i1, r, -r * i1);
  }
  Complex* a = psi.data();
  const std::int64_t dim = psi.size();
  const Bond* bonds = bonds_.data();
  const std::size_t nbonds = bonds_.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < dim; ++s) {
    double e = 0.0;
    for (std::size_t n = 0; n < nbonds; ++n) {
      const bool aligned = (((s >> bonds[n].a) ^ (s >> bonds[n].b)) & 1) == 0;
      e += (aligned ? 0.25 : -0.25) * bonds[n].coupling;
    }
    a[s] *= std::polar(1.0, -time * e);
  }
  if (axis == Axis::X) {
    rotate_all(psi, spec_.spins(), r, r, r, -r);
  } else {
    rotate_all(psi, spec_.spins(), r, r, -r * i1, r * i1);
  }
}

void Pf2Propagator::apply_diagonal(Eigen::Ref<Amplitudes> psi, double time, const Amplitudes& exchange_phase,
                                   double field_factor) const {
  // Field term -ff (S^z_1 - S^z_2) takes 2L+1 distinct values.
  const int L = spec_.L;
  std::vector<Complex> field_phase(2 * L + 1);
  for (int m = -L; m <= L; ++m) field_phase[m + L] = std::polar(1.0, time * field_factor * m);
  Complex* a = psi.data();
  const Complex* ex = exchange_phase.data();
  const std::int64_t dim = psi.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < dim; ++s) {
    a[s] *= ex[s] * field_phase[staggered_magnetization(static_cast<std::uint64_t>(s)) + L];
  }
}

void Pf2Propagator::half_x(Eigen::Ref<Amplitudes> psi, bool adjoint) const {
  if (kernel_ == Kernel::Gate) {
    apply_group(psi, Axis::X, adjoint ? half_backward_ : half_forward_);
  } else {
    apply_group_rotated(psi, Axis::X, adjoint ? -0.5 * dt_ : 0.5 * dt_);
  }
}

void Pf2Propagator::full_x(Eigen::Ref<Amplitudes> psi) const {
  if (kernel_ == Kernel::Gate) {
    apply_group(psi, Axis::X, full_forward_);
  } else {
    apply_group_rotated(psi, Axis::X, dt_);
  }
}

void Pf2Propagator::core(Eigen::Ref<Amplitudes> psi, double field_factor) const {
  if (kernel_ == Kernel::Gate) {
    apply_group(psi, Axis::Y, half_forward_);
    apply_diagonal(psi, dt_, zz_forward_, field_factor);
    apply_group(psi, Axis::Y, half_forward_);
  } else {
    apply_group_rotated(psi, Axis::Y, 0.5 * dt_);
    apply_diagonal(psi, dt_, zz_forward_, field_factor);
    apply_group_rotated(psi, Axis::Y, 0.5 * dt_);
  }
}

void Pf2Propagator::step(Eigen::Ref<Amplitudes> psi, double field_factor) const {
  if (static_cast<std::uint64_t>(psi.size()) != spec_.dim()) throw InvalidInput("state dimension mismatch in step");
  half_x(psi);
  core(psi, field_factor);
  half_x(psi);
}

void Pf2Propagator::steps(Eigen::Ref<Amplitudes> psi, const std::vector<double>& field_factors) const {
  if (static_cast<std::uint64_t>(psi.size()) != spec_.dim()) throw InvalidInput("state dimension mismatch in step");
  if (field_factors.empty()) return;
  half_x(psi);
  for (std::size_t j = 0; j < field_factors.size(); ++j) {
    if (j > 0) full_x(psi);
    core(psi, field_factors[j]);
  }
  half_x(psi);
}

void Pf2Propagator::step_adjoint(Eigen::Ref<Amplitudes> psi, double field_factor) const {
  if (static_cast<std::uint64_t>(psi.size()) != spec_.dim()) throw InvalidInput("state dimension mismatch in step");
  if (kernel_ == Kernel::Gate) {
    apply_group(psi, Axis::X, half_backward_);
    apply_group(psi, Axis::Y, half_backward_);
    apply_diagonal(psi, -dt_, zz_backward_, field_factor);
    apply_group(psi, Axis::Y, half_backward_);
    apply_group(psi, Axis::X, half_backward_);
  } else {
    apply_group_rotated(psi, Axis::X, -0.5 * dt_);
    apply_group_rotated(psi, Axis::Y, -0.5 * dt_);
    apply_diagonal(psi, -dt_, zz_backward_, field_factor);
    apply_group_rotated(psi, Axis::Y, -0.5 * dt_);
    apply_group_rotated(psi, Axis::X, -0.5 * dt_);
  }
}

StateVector step_pf2(const LadderSpec& spec, double field_factor, double dt, const StateVector& psi) {
  if (psi.spins() != spec.spins()) throw InvalidInput("state spin count does not match the ladder");
  StateVector out = psi;
  out.mark_derived();
  Pf2Propagator(spec, dt).step(out.amplitudes(), field_factor);
  return out;
}

TraceRecorder::TraceRecorder(const LadderSpec& spec, std::size_t stride) : ham_(spec), stride_(stride) {
  if (stride_ == 0) throw ConfigError("trace stride must be >= 1");
}

void TraceRecorder::record(double t, const Amplitudes& psi, double field_factor) {
  const LegMagnetization sz = expectation_sz_total(psi);
  rows_.push_back({t, std::sqrt(norm_squared(psi)), ham_.expectation(field_factor, psi), sz.leg1, sz.leg2});
}

Observer TraceRecorder::observer() {
  return [this](const ObserverEvent& ev) {
    if (ev.step % stride_ == 0 || ev.last) record(ev.t, ev.psi, ev.field_factor);
  };
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "t,norm,energy,sz_leg1,sz_leg2\n";
  char buf[160];
  for (const TraceRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.norm, r.energy, r.sz_leg1, r.sz_leg2);
    os << buf;
  }
}

std::size_t half_ramp_steps(const FieldProtocol& protocol, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!(protocol.tau >= 0.0) || !std::isfinite(protocol.tau)) throw ConfigError("ramp half-duration tau must be >= 0");
  const double ratio = protocol.tau / cfg.dt;
  const double m = std::round(ratio);
  if (std::abs(ratio - m) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError("tau = " + std::to_string(protocol.tau) + " is not an integer multiple of dt = " +
                      std::to_string(cfg.dt));
  }
  return static_cast<std::size_t>(m);
}

FieldProtocol commensurate_protocol(const FieldProtocol& protocol, const IntegratorConfig& cfg) {
  cfg.validate();
  const double m = std::max(1.0, std::round(protocol.tau / cfg.dt));
  return {protocol.h, m * cfg.dt};
}

ProtocolResult run_protocol(const LadderSpec& spec, const FieldProtocol& protocol, const IntegratorConfig& cfg,
                            const StateVector& psi0, const std::vector<Observer>& observers,
                            std::size_t observer_stride) {
  if (observer_stride == 0) throw ConfigError("observer stride must be >= 1");
  if (psi0.spins() != spec.spins()) throw InvalidInput("state spin count does not match the ladder");
  const std::size_t m = half_ramp_steps(protocol, cfg);
  const std::size_t total = 2 * m;
  const Pf2Propagator prop(spec, cfg.dt);
  StateVector psi = psi0;
  psi.mark_derived();
  auto notify = [&](std::size_t step, double t, double ff) {
    const ObserverEvent ev{step, t, psi.amplitudes(), ff, step == total};
    for (const Observer& obs : observers) obs(ev);
  };
  notify(0, 0.0, protocol.field_factor(0.0));
  const std::size_t stride = observers.empty() ? std::max<std::size_t>(total, 1) : observer_stride;
  std::vector<double> fields;
  for (std::size_t j = 0; j < total;) {
    const std::size_t end = std::min(total, (j / stride + 1) * stride);
    fields.clear();
    for (; j < end; ++j) fields.push_back(protocol.field_factor((static_cast<double>(j) + 0.5) * cfg.dt));
    prop.steps(psi.amplitudes(), fields);
    if (!observers.empty()) {
      const double t = static_cast<double>(j) * cfg.dt;
      notify(j, t, protocol.field_factor(t));
    }
  }
  return {std::move(psi), total};
}

double reverse_check(const LadderSpec& spec, const FieldProtocol& protocol, const IntegratorConfig& cfg,
                     const StateVector& psi0) {
  const std::size_t total = 2 * half_ramp_steps(protocol, cfg);
  if (total == 0) return 1.0;
  const Pf2Propagator prop(spec, cfg.dt);
  Amplitudes psi = psi0.amplitudes();
  auto field = [&](std::size_t j) { return protocol.field_factor((static_cast<double>(j) + 0.5) * cfg.dt); };
  for (std::size_t j = 0; j < total; ++j) prop.step(psi, field(j));
  for (std::size_t j = total; j-- > 0;) prop.step_adjoint(psi, field(j));
  return std::abs(inner(psi0.amplitudes(), psi));
}

}  // namespace ladder
