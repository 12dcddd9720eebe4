#pragma once

#include "ladderjr/lattice.hpp"
#include "ladderjr/statevec.hpp"

#include <functional>
#include <iosfwd>
#include <vector>

namespace ladder {

struct IntegratorConfig {
  double dt = 0.02;

  void validate() const;
};

/// Symmetric second-order product formula
///   U2(dt) = e^{-i dt Hx/2} e^{-i dt Hy/2} e^{-i dt Hz(t + dt/2)} e^{-i dt Hy/2} e^{-i dt Hx/2}.
///
/// Each x and y factor is a product of exact two-site rotations applied in bond order;
/// the z factor (exchange + staggered field) is a diagonal phase.
class Pf2Propagator {
 public:
  /// Gate: per-bond 4x4 rotations on amplitude pairs. BasisRotation: rotate every
  /// spin into the x (or y) eigenbasis, apply the group as a diagonal phase, rotate back.
  enum class Kernel { Gate, BasisRotation };

  Pf2Propagator(const LadderSpec& spec, double dt, Kernel kernel = Kernel::Gate);

  const LadderSpec& spec() const { return spec_; }
  double dt() const { return dt_; }

  /// One forward step with the given midpoint field factor h f(t + dt/2).
  void step(Eigen::Ref<Amplitudes> psi, double field_factor) const;
  /// Exact inverse of `step` for the same field factor.
  void step_adjoint(Eigen::Ref<Amplitudes> psi, double field_factor) const;

  /// Consecutive forward steps with midpoint field factors ff[0], ff[1], ...
  /// The trailing X half-step of one step and the leading one of the next are applied
  /// as a single full X factor, so the result equals repeated `step` up to round-off.
  void steps(Eigen::Ref<Amplitudes> psi, const std::vector<double>& field_factors) const;

  // Factors of a step: step = half_x * core * half_x, and half_x * half_x = full_x.
  void half_x(Eigen::Ref<Amplitudes> psi, bool adjoint = false) const;
  void full_x(Eigen::Ref<Amplitudes> psi) const;
  /// e^{-i dt Hy/2} e^{-i dt Hz} e^{-i dt Hy/2}.
  void core(Eigen::Ref<Amplitudes> psi, double field_factor) const;

 private:
  enum class Axis { X, Y };
  struct GatePhase {
    double cos = 1.0;
    double sin = 0.0;
  };

  void apply_group(Eigen::Ref<Amplitudes> psi, Axis axis, const std::vector<GatePhase>& phases) const;
  void apply_group_rotated(Eigen::Ref<Amplitudes> psi, Axis axis, double time) const;
  void apply_diagonal(Eigen::Ref<Amplitudes> psi, double time, const Amplitudes& exchange_phase,
                      double field_factor) const;

  LadderSpec spec_;
  double dt_;
  Kernel kernel_;
  std::vector<Bond> bonds_;
  std::vector<GatePhase> half_forward_;
  std::vector<GatePhase> half_backward_;
  std::vector<GatePhase> full_forward_;
  Amplitudes zz_forward_;
  Amplitudes zz_backward_;
  std::vector<double> zz_;
};

/// One PF2 step on a copy of psi.
StateVector step_pf2(const LadderSpec& spec, double field_factor, double dt, const StateVector& psi);

struct ObserverEvent {
  std::size_t step = 0;  ///< steps completed so far
  double t = 0.0;
  const Amplitudes& psi;
  double field_factor = 0.0;  ///< h f(t) at time t
  bool last = false;
};

using Observer = std::function<void(const ObserverEvent&)>;

struct TraceRow {
  double t = 0.0;
  double norm = 0.0;
  double energy = 0.0;
  double sz_leg1 = 0.0;
  double sz_leg2 = 0.0;
};

/// Records (t, norm, <H_tot(t)>, <S^z_1>, <S^z_2>) every `stride` steps, at t = 0 and at the end.
class TraceRecorder {
 public:
  TraceRecorder(const LadderSpec& spec, std::size_t stride);

  void record(double t, const Amplitudes& psi, double field_factor);
  Observer observer();
  const std::vector<TraceRow>& rows() const { return rows_; }

 private:
  LadderHamiltonian ham_;
  std::size_t stride_;
  std::vector<TraceRow> rows_;
};

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);

/// Number of steps m with tau = m dt; throws ConfigError unless commensurate to 1e-9.
std::size_t half_ramp_steps(const FieldProtocol& protocol, const IntegratorConfig& cfg);

/// tau rounded to the nearest positive multiple of dt.
FieldProtocol commensurate_protocol(const FieldProtocol& protocol, const IntegratorConfig& cfg);

struct ProtocolResult {
  StateVector psi_final;
  std::size_t steps = 0;
};

/// Integrates the full ramp: 2m steps, step j using the field at t_j + dt/2.
/// Observers see t = 0, every `observer_stride`-th step and the final step.
ProtocolResult run_protocol(const LadderSpec& spec, const FieldProtocol& protocol, const IntegratorConfig& cfg,
                            const StateVector& psi0, const std::vector<Observer>& observers = {},
                            std::size_t observer_stride = 1);

/// Runs the protocol forward, then the adjoint steps in reverse; returns |<psi0|psi_back>|.
double reverse_check(const LadderSpec& spec, const FieldProtocol& protocol, const IntegratorConfig& cfg,
                     const StateVector& psi0);

}  // namespace ladder
