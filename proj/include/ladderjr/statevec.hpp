#pragma once

#include "ladderjr/lattice.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>

namespace ladder {

/// Upper limit on the bytes a single operation may hold in state vectors.
struct MemoryBudget {
  std::uint64_t bytes = std::uint64_t{16} << 30;

  /// Bytes needed for `vectors` state vectors over `spins` spins.
  static std::uint64_t required(int spins, int vectors);

  /// Throws CapacityError naming the amplitude count and byte requirement.
  void require(int spins, int vectors, const char* what) const;
};

/// 2^N complex amplitudes in the S^z product basis, stored as one contiguous
/// array of interleaved (re, im) doubles.
///
/// `seed()` is the generator seed for Haar samples and empty for states derived
/// from other states (filtered, propagated, loaded projections).
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(int spins);
  StateVector(int spins, Amplitudes amplitudes, std::optional<std::uint64_t> seed = std::nullopt);

  static StateVector basis(int spins, std::uint64_t index);

  int spins() const { return spins_; }
  std::uint64_t dim() const { return static_cast<std::uint64_t>(amplitudes_.size()); }
  const Amplitudes& amplitudes() const { return amplitudes_; }
  Amplitudes& amplitudes() { return amplitudes_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  void mark_derived() { seed_.reset(); }

  double norm() const;
  void normalize();

 private:
  int spins_ = 0;
  Amplitudes amplitudes_;
  std::optional<std::uint64_t> seed_;
};

/// Haar-random state: independent standard complex Gaussians from a seeded
/// std::mt19937_64 via Box-Muller on open-interval uniforms, then normalized.
StateVector haar_random(int spins, std::uint64_t seed, const MemoryBudget& budget = {});

/// sum_j conj(phi_j) psi_j with a fixed pairwise reduction tree (thread-count independent).
Complex inner(Eigen::Ref<const Amplitudes> phi, Eigen::Ref<const Amplitudes> psi);
Complex inner(const StateVector& phi, const StateVector& psi);

/// Squared norm through the same fixed reduction tree.
double norm_squared(Eigen::Ref<const Amplitudes> psi);

struct LegMagnetization {
  double leg1 = 0.0;
  double leg2 = 0.0;
};

/// <S^z_1> and <S^z_2>, leg sums of S^z_{i,k}.
LegMagnetization expectation_sz_total(const StateVector& psi);
LegMagnetization expectation_sz_total(Eigen::Ref<const Amplitudes> psi);

/// Checkpoint: "QWRK", u32 version, u32 N, u64 seed, then D (f64 re, f64 im) pairs,
/// all little-endian. Derived states store seed = 2^64 - 1.
inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::uint64_t kDerivedSeedTag = ~std::uint64_t{0};

void write_checkpoint(const std::filesystem::path& path, const StateVector& psi);
StateVector read_checkpoint(const std::filesystem::path& path);

}  // namespace ladder
