#include "ladderjr/statevec.hpp"

#include "ladderjr/errors.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

namespace ladder {

namespace {

constexpr std::int64_t kLeafBlock = 4096;
constexpr std::int64_t kSerialCutoff = 32;

template <typename Term>
auto pairwise(std::int64_t begin, std::int64_t end, const Term& term) -> decltype(term(begin)) {
  const std::int64_t n = end - begin;
  if (n <= kSerialCutoff) {
    decltype(term(begin)) acc{};
    for (std::int64_t j = begin; j < end; ++j) acc += term(j);
    return acc;
  }
  const std::int64_t mid = begin + n / 2;
  return pairwise(begin, mid, term) + pairwise(mid, end, term);
}

// Leaf blocks are summed independently, then combined through a tree that
// depends only on the vector length.
template <typename Term>
auto fixed_tree_sum(std::int64_t n, const Term& term) -> decltype(term(0)) {
  using T = decltype(term(0));
  const std::int64_t blocks = (n + kLeafBlock - 1) / kLeafBlock;
  std::vector<T> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    partial[b] = pairwise(b * kLeafBlock, std::min(n, (b + 1) * kLeafBlock), term);
  }
  return pairwise(0, blocks, [&](std::int64_t b) { return partial[b]; });
}

std::uint64_t checked_dim(int spins) {
  if (spins < 0 || spins > 62) throw InvalidInput("spin count " + std::to_string(spins) + " out of range");
  return std::uint64_t{1} << spins;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b.data(), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b.data(), 8);
}

std::uint64_t get_le(std::istream& is, int bytes) {
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), bytes);
  if (!is) throw InvalidInput("truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

}  // namespace

std::uint64_t MemoryBudget::required(int spins, int vectors) {
  if (spins > 62) return ~std::uint64_t{0};
  const long double bytes = static_cast<long double>(std::uint64_t{1} << spins) * sizeof(Complex) * vectors;
  return bytes >= 1.8e19L ? ~std::uint64_t{0} : static_cast<std::uint64_t>(bytes);
}

void MemoryBudget::require(int spins, int vectors, const char* what) const {
  const std::uint64_t need = required(spins, vectors);
  if (need > bytes) {
    std::ostringstream msg;
    msg << what << ": " << vectors << " state vector(s) of 2^" << spins << " amplitudes need " << need
        << " bytes, budget is " << bytes << " bytes";
    throw CapacityError(msg.str(), need);
  }
}

StateVector::StateVector(int spins) : spins_(spins), amplitudes_(Amplitudes::Zero(checked_dim(spins))) {}

StateVector::StateVector(int spins, Amplitudes amplitudes, std::optional<std::uint64_t> seed)
    : spins_(spins), amplitudes_(std::move(amplitudes)), seed_(seed) {
  if (static_cast<std::uint64_t>(amplitudes_.size()) != checked_dim(spins)) {
    throw InvalidInput("amplitude count " + std::to_string(amplitudes_.size()) + " is not 2^" +
                       std::to_string(spins));
  }
}

StateVector StateVector::basis(int spins, std::uint64_t index) {
  StateVector psi(spins);
  if (index >= psi.dim()) throw InvalidInput("basis index out of range");
  psi.amplitudes_[static_cast<Eigen::Index>(index)] = 1.0;
  return psi;
}

double StateVector::norm() const { return std::sqrt(norm_squared(amplitudes_)); }

void StateVector::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw NumericalError("cannot normalize a zero state");
  amplitudes_ /= n;
}

StateVector haar_random(int spins, std::uint64_t seed, const MemoryBudget& budget) {
  if (spins < 2 || spins % 2 != 0) throw InvalidInput("Haar sampling expects an even spin count >= 2");
  budget.require(spins, 1, "haar_random");
  const auto dim = static_cast<Eigen::Index>(checked_dim(spins));
  Amplitudes amps(dim);
  std::mt19937_64 engine(seed);
  auto open_uniform = [&engine] {
    // 53 random bits mapped to the midpoints of [0,1) cells: never 0, never 1.
    return (static_cast<double>(engine() >> 11) + 0.5) * 0x1p-53;
  };
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double u1 = open_uniform();
    const double u2 = open_uniform();
    const double r = std::sqrt(-std::log(u1));
    const double phase = 2.0 * std::numbers::pi * u2;
    amps[j] = Complex(r * std::cos(phase), r * std::sin(phase));
  }
  StateVector psi(spins, std::move(amps), seed);
  psi.normalize();
  return psi;
}

Complex inner(Eigen::Ref<const Amplitudes> phi, Eigen::Ref<const Amplitudes> psi) {
  if (phi.size() != psi.size()) {
    throw InvalidInput("inner product of states with dimensions " + std::to_string(phi.size()) + " and " +
                       std::to_string(psi.size()));
  }
  const Complex* a = phi.data();
  const Complex* b = psi.data();
  return fixed_tree_sum(phi.size(), [a, b](std::int64_t j) { return std::conj(a[j]) * b[j]; });
}

Complex inner(const StateVector& phi, const StateVector& psi) { return inner(phi.amplitudes(), psi.amplitudes()); }

double norm_squared(Eigen::Ref<const Amplitudes> psi) {
  const Complex* a = psi.data();
  return fixed_tree_sum(psi.size(), [a](std::int64_t j) { return std::norm(a[j]); });
}

LegMagnetization expectation_sz_total(Eigen::Ref<const Amplitudes> psi) {
  const Complex* a = psi.data();
  const auto dim = psi.size();
  // Population-weighted up-spin counts per leg; S^z_k = n_up,k - L/2.
  constexpr std::uint64_t leg0 = 0x5555555555555555ull;
  constexpr std::uint64_t leg1 = 0xAAAAAAAAAAAAAAAAull;
  const double up0 = fixed_tree_sum(dim, [a](std::int64_t s) {
    return std::norm(a[s]) * __builtin_popcountll(static_cast<std::uint64_t>(s) & leg0);
  });
  const double up1 = fixed_tree_sum(dim, [a](std::int64_t s) {
    return std::norm(a[s]) * __builtin_popcountll(static_cast<std::uint64_t>(s) & leg1);
  });
  const double weight = norm_squared(psi);
  const int spins = std::countr_zero(static_cast<std::uint64_t>(dim));
  const double half_leg = 0.25 * spins;
  return {up0 - half_leg * weight, up1 - half_leg * weight};
}

LegMagnetization expectation_sz_total(const StateVector& psi) { return expectation_sz_total(psi.amplitudes()); }

void write_checkpoint(const std::filesystem::path& path, const StateVector& psi) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InvalidInput("cannot open checkpoint for writing: " + path.string());
  os.write("QWRK", 4);
  put_u32(os, kCheckpointVersion);
  put_u32(os, static_cast<std::uint32_t>(psi.spins()));
  put_u64(os, psi.seed().value_or(kDerivedSeedTag));
  for (const Complex& z : psi.amplitudes()) {
    put_u64(os, std::bit_cast<std::uint64_t>(z.real()));
    put_u64(os, std::bit_cast<std::uint64_t>(z.imag()));
  }
  if (!os) throw InvalidInput("failed writing checkpoint: " + path.string());
}

StateVector read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw MissingInputError("checkpoint not found: " + path.string());
  std::array<char, 4> magic{};
  is.read(magic.data(), 4);
  if (!is || std::string(magic.data(), 4) != "QWRK") throw InvalidInput("not a QWRK checkpoint: " + path.string());
  const auto version = static_cast<std::uint32_t>(get_le(is, 4));
  if (version != kCheckpointVersion) throw InvalidInput("unsupported checkpoint version " + std::to_string(version));
  const auto spins = static_cast<int>(get_le(is, 4));
  const std::uint64_t seed = get_le(is, 8);
  const auto dim = static_cast<Eigen::Index>(checked_dim(spins));
  Amplitudes amps(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double re = std::bit_cast<double>(get_le(is, 8));
    const double im = std::bit_cast<double>(get_le(is, 8));
    amps[j] = Complex(re, im);
  }
  return StateVector(spins, std::move(amps),
                     seed == kDerivedSeedTag ? std::nullopt : std::optional<std::uint64_t>(seed));
}

}  // namespace ladder
