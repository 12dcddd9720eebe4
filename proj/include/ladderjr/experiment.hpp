#pragma once

#include "ladderjr/chebyshev.hpp"
#include "ladderjr/spectral.hpp"
#include "ladderjr/work_stats.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ladder {

inline constexpr const char* kCodeVersion = "0.4.0";

/// Run configuration. File schema (INI sections; JSON objects with the same keys):
///
///   [model]    L (required), j_par, j_perp, delta, h
///   [filter]   a, e_ini ("auto" = -0.42 (L - 1))
///   [run]      seed (required), dt, k_dos, k_ldos, dos_vectors, gamma0, rates,
///              worst_rate, trace_stride, memory_gib, output
///   [analysis] epsilons, report_epsilon, beta (overrides the DOS fit)
///   [scan]     sizes
///
/// Lists are comma separated. rates and worst_rate are multiples of gamma0.
struct ExperimentConfig {
  LadderSpec spec;
  double h = 0.5;
  double a = 1000.0;
  std::optional<double> e_ini;
  std::uint64_t seed = 0;
  double dt = 0.02;
  std::size_t k_dos = 20480;
  std::size_t k_ldos = 20480;
  int dos_vectors = 1;
  double gamma0 = 2.6e-4;
  std::vector<double> rates{1, 5, 10, 20, 40, 80, 150};
  double worst_rate = 40;
  std::size_t trace_stride = 100;
  double memory_gib = 16;
  std::string output = "out";
  std::vector<double> epsilons{0.25, 0.375, 0.5};
  double report_epsilon = 0.5;
  std::optional<double> beta;
  std::vector<int> scan_sizes{5, 6, 7};

  double resolved_e_ini() const { return e_ini.value_or(-0.42 * (spec.L - 1)); }
  MemoryBudget budget() const;
  IntegratorConfig integrator() const { return {dt}; }
  /// Throws ConfigError naming the offending field.
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

enum class ConfigFormat { Ini, Json };

ExperimentConfig parse_config(std::istream& is, ConfigFormat format);
/// Format chosen by extension (.json) or a leading '{'. Missing file: MissingInputError.
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical INI text; parse_config(write_config_ini(c)) == c.
std::string write_config_ini(const ExperimentConfig& cfg);
std::string write_config_json(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical INI text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Comment-header entries common to every emitted CSV.
CsvMetadata run_metadata(const ExperimentConfig& cfg);

// In-memory pipeline stages.

/// Haar-random DOS estimate averaged over dos_vectors states drawn with seeds
/// seed + 1, seed + 2, ... (the filtered state uses `seed` itself).
SpectralDensity compute_dos(const ExperimentConfig& cfg);

struct PreparedState {
  StateVector psi;
  FilterReport filter;
  SpectralDensity p_ini;
};

PreparedState prepare_state(const ExperimentConfig& cfg);

struct RateRun {
  double rate = 0.0;  ///< multiple of gamma0 as requested
  FieldProtocol protocol;  ///< commensurate ramp actually run
  StateVector psi_fin;
  SpectralDensity p_fin;
  std::vector<TraceRow> trace;
};

RateRun run_rate(const ExperimentConfig& cfg, const StateVector& psi_ini, double rate);

/// Window used for every exponential integral: spectrum edges from the DOS, padded by
/// four resolution widths and clipped to the stored grid.
EnergyWindow analysis_window(const SpectralDensity& dos, const SpectralDensity& ldos);

BetaFit beta_for(const ExperimentConfig& cfg, const SpectralDensity& dos);

/// Work report for one final LDOS; both densities are restricted to analysis_window first.
WorkReport analyze_rate(const ExperimentConfig& cfg, const SpectralDensity& dos, const SpectralDensity& p_ini,
                        const SpectralDensity& p_fin, double gamma);

// File-producing commands. Each writes below cfg.output.

struct RunPaths {
  std::filesystem::path root;
  std::filesystem::path dos_csv() const { return root / "dos.csv"; }
  std::filesystem::path beta_json() const { return root / "beta_fit.json"; }
  std::filesystem::path psi_ini() const { return root / "psi_ini.bin"; }
  std::filesystem::path p_ini_csv() const { return root / "p_ini.csv"; }
  std::filesystem::path prepare_json() const { return root / "prepare.json"; }
  std::filesystem::path rate_dir(double rate) const;
  std::filesystem::path work_csv() const { return root / "work_report.csv"; }
  std::filesystem::path work_json() const { return root / "work_report.json"; }
  std::filesystem::path shifted_csv() const { return root / "shifted_worst.csv"; }
  std::filesystem::path scaling_json() const { return root / "scaling.json"; }
};

void cmd_dos(const ExperimentConfig& cfg);
void cmd_prepare(const ExperimentConfig& cfg);
/// Runs one configured rate; prepares the initial state first when psi_ini.bin is absent.
void cmd_run(const ExperimentConfig& cfg, double rate);
/// Needs dos.csv, p_ini.csv and at least one rate directory (MissingInputError otherwise).
std::vector<WorkReport> cmd_analyze(const ExperimentConfig& cfg);
/// Full pipeline per size at worst_rate with E_ini = -0.42 (L - 1); capacity is checked
/// for every size before any work starts.
ScalingReport cmd_scan(const ExperimentConfig& cfg, const std::vector<int>& sizes);

}  // namespace ladder
