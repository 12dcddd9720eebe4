#include "ladderjr/spectral.hpp"

#include "ladderjr/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace ladder {

namespace {

struct IndexRange {
  Eigen::Index first = 0;
  Eigen::Index last = -1;  // inclusive; last < first means empty
};

IndexRange window_indices(const SpectralDensity& d) {
  const double lo = (d.window.lo - d.e0) / d.de;
  const double hi = (d.window.hi - d.e0) / d.de;
  IndexRange r;
  // Nodes within 1e-9 of a spacing of an edge count as inside.
  r.first = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil(lo - 1e-9)));
  r.last = std::min<Eigen::Index>(d.size() - 1, static_cast<Eigen::Index>(std::floor(hi + 1e-9)));
  return r;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const char* to_string(DensityKind kind) { return kind == DensityKind::Dos ? "DOS" : "LDOS"; }

double integrate(const SpectralDensity& density, const std::function<double(double)>& g) {
  const IndexRange r = window_indices(density);
  if (r.last <= r.first) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = r.first; i <= r.last; ++i) {
    const double w = (i == r.first || i == r.last) ? 0.5 : 1.0;
    sum += w * density.values[i] * g(density.energy(i));
  }
  return sum * density.de;
}

AutocorrSeries autocorrelation(const LadderSpec& spec, const StateVector& psi, const IntegratorConfig& cfg,
                               std::size_t steps, const MemoryBudget& budget) {
  if (steps < 1) throw ConfigError("autocorrelation needs at least one step");
  if (psi.spins() != spec.spins()) throw InvalidInput("state spin count does not match the ladder");
  cfg.validate();
  budget.require(spec.spins(), 3, "autocorrelation");
  if (spectral_bound(spec, 0.0) >= std::numbers::pi / cfg.dt) {
    throw NumericalError("spectrum may exceed the Nyquist range pi/dt; reduce dt");
  }
  const Pf2Propagator prop(spec, cfg.dt);
  AutocorrSeries series;
  series.dt = cfg.dt;
  series.samples.resize(static_cast<Eigen::Index>(steps) + 1);
  // With U = A B A (A the X half-step), U^j psi0 = A r_j where r_1 = B A psi0 and
  // r_j = B A^2 r_{j-1}, so <psi0|U^j psi0> = <A^dagger psi0|r_j> needs one X pass per step.
  const Amplitudes& psi0 = psi.amplitudes();
  series.samples[0] = inner(psi0, psi0);
  Amplitudes bra = psi0;
  prop.half_x(bra, true);
  Amplitudes cur = psi0;
  prop.half_x(cur);
  for (std::size_t j = 1; j <= steps; ++j) {
    if (j > 1) prop.full_x(cur);
    prop.core(cur, 0.0);
    series.samples[static_cast<Eigen::Index>(j)] = inner(bra, cur);
  }
  return series;
}

AutocorrSeries average(const std::vector<AutocorrSeries>& series) {
  if (series.empty()) throw InvalidInput("no series to average");
  AutocorrSeries out = series.front();
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].samples.size() != out.samples.size() || series[i].dt != out.dt) {
      throw InvalidInput("averaged series must share dt and length");
    }
    out.samples += series[i].samples;
  }
  out.samples /= static_cast<double>(series.size());
  return out;
}

SpectralDensity invert_series(const AutocorrSeries& series, DensityKind kind, const InversionOptions& options) {
  const Eigen::Index steps = series.steps();
  if (steps < 1) throw InvalidInput("series needs at least two samples");
  std::size_t n = 1;
  while (n < 4 * static_cast<std::size_t>(steps)) n *= 2;
  const double dt = series.dt;
  const double theta = series.theta();

  // S_j = sum_k c_k e^{i E_j t_k} with E_j = (j - n/2) dE; the (-1)^k recenters the grid.
  std::vector<std::complex<double>> coeffs(n, 0.0);
  for (Eigen::Index k = 0; k <= steps; ++k) {
    double taper = 1.0;
    if (options.gaussian_taper) {
      const double x = 3.0 * static_cast<double>(k) * dt / theta;
      taper = std::exp(-0.5 * x * x);
    }
    coeffs[static_cast<std::size_t>(k)] = (k % 2 == 0 ? 1.0 : -1.0) * taper * series.samples[k];
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> sums;
  fft.inv(sums, coeffs);

  SpectralDensity d;
  d.kind = kind;
  d.de = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
  d.e0 = -static_cast<double>(n / 2) * d.de;
  d.resolution = std::numbers::pi / theta;
  d.values.resize(static_cast<Eigen::Index>(n));
  const double scale = dt / (2.0 * std::numbers::pi);
  const double c0 = coeffs[0].real();
  for (std::size_t j = 0; j < n; ++j) {
    // Conjugate symmetry c(-t) = conj c(t) folds the negative times into 2 Re.
    d.values[static_cast<Eigen::Index>(j)] = scale * (2.0 * static_cast<double>(n) * sums[j].real() - c0);
  }

  // Weight near the Nyquist edges signals a spectrum that does not fit in (-pi/dt, pi/dt).
  const double edge = 0.9 * std::numbers::pi / dt;
  double total = 0.0;
  double outer = 0.0;
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    total += d.values[j];
    if (std::abs(d.energy(j)) > edge) outer += d.values[j];
  }
  if (std::abs(outer) > 1e-3 * std::abs(total)) {
    throw NumericalError("spectral weight at the Nyquist window edges exceeds 0.1%; reduce dt");
  }

  d.window = options.window.value_or(EnergyWindow{d.e0, d.energy(d.size() - 1)});
  d.raw_integral = integrate(d, [](double) { return 1.0; });
  return d;
}

SpectralDensity dos_estimate(const AutocorrSeries& series, int spins, const InversionOptions& options) {
  SpectralDensity d = invert_series(series, DensityKind::Dos, options);
  if (options.normalize) {
    if (!(d.raw_integral > 0.0)) throw NumericalError("DOS window integral is not positive");
    d.values *= std::ldexp(1.0, spins) / d.raw_integral;
  }
  return d;
}

SpectralDensity ldos(const LadderSpec& spec, const StateVector& psi, const IntegratorConfig& cfg, std::size_t steps,
                     const InversionOptions& options, const MemoryBudget& budget) {
  InversionOptions opts = options;
  if (!opts.window) opts.window = default_window(spec);
  SpectralDensity d = invert_series(autocorrelation(spec, psi, cfg, steps, budget), DensityKind::Ldos, opts);
  if (opts.normalize) {
    if (!(d.raw_integral > 0.0)) throw NumericalError("LDOS window integral is not positive");
    d.values /= d.raw_integral;
  }
  return d;
}

EnergyWindow default_window(const LadderSpec& spec, double pad) {
  const double b = spectral_bound(spec, 0.0);
  return {-b - pad, b + pad};
}

EnergyWindow spectral_edges(const SpectralDensity& dos, double pad) {
  const IndexRange r = window_indices(dos);
  if (r.last <= r.first) throw InvalidInput("empty DOS window");
  std::vector<double> cumulative(static_cast<std::size_t>(r.last - r.first + 1), 0.0);
  for (Eigen::Index i = r.first + 1; i <= r.last; ++i) {
    const auto k = static_cast<std::size_t>(i - r.first);
    cumulative[k] = cumulative[k - 1] + 0.5 * dos.de * (dos.values[i - 1] + dos.values[i]);
  }
  const double total = cumulative.back();
  std::size_t first = 0;
  while (first + 1 < cumulative.size() && cumulative[first] < 0.5) ++first;
  std::size_t last = cumulative.size() - 1;
  while (last > 0 && total - cumulative[last] < 0.5) --last;
  return {dos.energy(r.first + static_cast<Eigen::Index>(first)) - pad,
          dos.energy(r.first + static_cast<Eigen::Index>(last)) + pad};
}

SpectralDensity restrict_window(const SpectralDensity& density, const EnergyWindow& window) {
  SpectralDensity d = density;
  d.window = window;
  const double integral = integrate(d, [](double) { return 1.0; });
  if (!(integral > 0.0)) throw NumericalError("window integral is not positive");
  const double target = density.kind == DensityKind::Ldos ? 1.0 : integrate(density, [](double) { return 1.0; });
  d.raw_integral = integral * density.raw_integral / integrate(density, [](double) { return 1.0; });
  d.values *= target / integral;
  return d;
}

SpectralDensity crop(const SpectralDensity& density) {
  const IndexRange r = window_indices(density);
  SpectralDensity d = density;
  const Eigen::Index count = std::max<Eigen::Index>(0, r.last - r.first + 1);
  d.values = density.values.segment(r.first, count);
  d.e0 = density.energy(r.first);
  return d;
}

Moments moments(const SpectralDensity& density) {
  const double norm = integrate(density, [](double) { return 1.0; });
  if (density.kind == DensityKind::Ldos && std::abs(norm - 1.0) > 1e-6) {
    throw InvalidInput("moments need a normalized LDOS, integral is " + format_double(norm));
  }
  if (!(norm > 0.0)) throw InvalidInput("density has no weight in its window");
  const double mean = integrate(density, [](double e) { return e; }) / norm;
  const double var = integrate(density, [mean](double e) { return (e - mean) * (e - mean); }) / norm;
  return {mean, std::sqrt(std::max(0.0, var))};
}

std::vector<double> find_peaks(const SpectralDensity& density, double rel_threshold) {
  const IndexRange r = window_indices(density);
  std::vector<double> peaks;
  if (r.last - r.first < 2) return peaks;
  const double vmax = density.values.segment(r.first, r.last - r.first + 1).maxCoeff();
  for (Eigen::Index i = r.first + 1; i < r.last; ++i) {
    const double a = density.values[i - 1];
    const double b = density.values[i];
    const double c = density.values[i + 1];
    if (b > a && b >= c && b > rel_threshold * vmax) {
      const double denom = a - 2.0 * b + c;
      const double offset = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
      peaks.push_back(density.energy(i) + offset * density.de);
    }
  }
  return peaks;
}

void write_density_csv(std::ostream& os, const SpectralDensity& density, const CsvMetadata& meta) {
  for (const auto& [key, value] : meta.entries) os << "# " << key << ": " << value << "\n";
  const SpectralDensity d = crop(density);
  os << "# kind: " << to_string(d.kind) << "\n";
  os << "# e0: " << format_double(d.e0) << "\n";
  os << "# de: " << format_double(d.de) << "\n";
  os << "# resolution: " << format_double(d.resolution) << "\n";
  os << "# window_lo: " << format_double(d.window.lo) << "\n";
  os << "# window_hi: " << format_double(d.window.hi) << "\n";
  os << "# raw_integral: " << format_double(d.raw_integral) << "\n";
  os << (d.kind == DensityKind::Dos ? "E,n\n" : "E,P\n");
  char buf[80];
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", d.energy(i), d.values[i]);
    os << buf;
  }
}

SpectralDensity read_density_csv(std::istream& is) {
  std::map<std::string, std::string> meta;
  std::vector<double> values;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        meta[line.substr(2, colon - 2)] = line.substr(colon + 2);
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidInput("malformed density row: " + line);
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  for (const char* key : {"kind", "e0", "de", "resolution", "window_lo", "window_hi", "raw_integral"}) {
    if (!meta.count(key)) throw InvalidInput(std::string("density CSV lacks '# ") + key + "' metadata");
  }
  SpectralDensity d;
  d.kind = meta["kind"] == "DOS" ? DensityKind::Dos : DensityKind::Ldos;
  d.e0 = std::stod(meta["e0"]);
  d.de = std::stod(meta["de"]);
  d.resolution = std::stod(meta["resolution"]);
  d.window = {std::stod(meta["window_lo"]), std::stod(meta["window_hi"])};
  d.raw_integral = std::stod(meta["raw_integral"]);
  d.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return d;
}

}  // namespace ladder
