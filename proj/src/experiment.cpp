#include "ladderjr/experiment.hpp"

#include "ladderjr/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

namespace ladder {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Flat = std::map<std::string, std::string>;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

Flat flatten_ini(std::istream& is) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(is, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  Flat flat;
  for (const auto& [section, body] : pt) {
    if (body.empty()) throw ConfigError("config key '" + section + "' must sit inside a section");
    for (const auto& [key, value] : body) flat[section + "." + key] = value.data();
  }
  return flat;
}

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return fmt(v.get<double>());
  return v.dump();
}

Flat flatten_json(std::istream& is) {
  json root;
  try {
    root = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  Flat flat;
  for (const auto& [section, body] : root.items()) {
    if (!body.is_object()) throw ConfigError("config section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      std::string text;
      if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) text += (i ? "," : "") + json_scalar(value[i]);
      } else if (!value.is_null()) {
        text = json_scalar(value);
      }
      flat[section + "." + key] = text;
    }
  }
  return flat;
}

// Pulls typed fields out of the flat map; anything left over is an unknown key.
class FieldReader {
 public:
  explicit FieldReader(Flat flat) : flat_(std::move(flat)) {}

  std::optional<std::string> take(const std::string& key) {
    const auto it = flat_.find(key);
    if (it == flat_.end()) return std::nullopt;
    std::string v = trim(it->second);
    flat_.erase(it);
    return v;
  }

  std::string require(const std::string& key) {
    auto v = take(key);
    if (!v || v->empty()) throw ConfigError("missing required config field " + key);
    return *v;
  }

  static double to_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) throw ConfigError("config field " + key + ": '" + text + "' is not a number");
    return v;
  }

  static long long to_int(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) throw ConfigError("config field " + key + ": '" + text + "' is not an integer");
    return v;
  }

  void number(const std::string& key, double& out) {
    if (auto v = take(key)) out = to_double(key, *v);
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (auto v = take(key)) {
      const long long x = to_int(key, *v);
      if (x < 0 && std::is_unsigned_v<Int>) throw ConfigError("config field " + key + " must be non-negative");
      out = static_cast<Int>(x);
    }
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (auto v = take(key)) {
      out.clear();
      for (const auto& item : split_list(*v)) out.push_back(to_double(key, item));
    }
  }

  void integers(const std::string& key, std::vector<int>& out) {
    if (auto v = take(key)) {
      out.clear();
      for (const auto& item : split_list(*v)) out.push_back(static_cast<int>(to_int(key, item)));
    }
  }

  void finish() const {
    if (!flat_.empty()) throw ConfigError("unknown config field " + flat_.begin()->first);
  }

 private:
  Flat flat_;
};

ExperimentConfig from_flat(Flat flat) {
  FieldReader r(std::move(flat));
  ExperimentConfig c;
  c.spec.L = static_cast<int>(FieldReader::to_int("model.L", r.require("model.L")));
  r.number("model.j_par", c.spec.j_par);
  r.number("model.j_perp", c.spec.j_perp);
  r.number("model.delta", c.spec.delta);
  r.number("model.h", c.h);
  r.number("filter.a", c.a);
  if (auto e = r.take("filter.e_ini"); e && *e != "auto") c.e_ini = FieldReader::to_double("filter.e_ini", *e);
  const std::string seed = r.require("run.seed");
  std::size_t used = 0;
  try {
    if (seed[0] != '-') c.seed = std::stoull(seed, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != seed.size()) throw ConfigError("config field run.seed: '" + seed + "' is not a seed");
  r.number("run.dt", c.dt);
  r.integer("run.k_dos", c.k_dos);
  r.integer("run.k_ldos", c.k_ldos);
  r.integer("run.dos_vectors", c.dos_vectors);
  r.number("run.gamma0", c.gamma0);
  r.numbers("run.rates", c.rates);
  r.number("run.worst_rate", c.worst_rate);
  r.integer("run.trace_stride", c.trace_stride);
  r.number("run.memory_gib", c.memory_gib);
  if (auto o = r.take("run.output")) c.output = *o;
  r.numbers("analysis.epsilons", c.epsilons);
  r.number("analysis.report_epsilon", c.report_epsilon);
  if (auto b = r.take("analysis.beta"); b && !b->empty()) c.beta = FieldReader::to_double("analysis.beta", *b);
  r.integers("scan.sizes", c.scan_sizes);
  r.finish();
  c.validate();
  return c;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw MissingInputError("missing input " + path.string());
  return is;
}

void write_meta(std::ostream& os, const CsvMetadata& meta) {
  for (const auto& [k, v] : meta.entries) os << "# " << k << ": " << v << "\n";
}

void write_density(const fs::path& path, const SpectralDensity& d, const ExperimentConfig& cfg) {
  auto os = open_out(path);
  write_density_csv(os, d, run_metadata(cfg));
}

SpectralDensity read_density(const fs::path& path) {
  auto is = open_in(path);
  return read_density_csv(is);
}

json beta_json(const BetaFit& b) {
  json sweep = json::array();
  for (const auto& [eps, beta] : b.sweep) sweep.push_back({{"epsilon", eps}, {"beta", beta}});
  return {{"beta", b.beta},
          {"epsilon", b.epsilon},
          {"uncertainty", b.uncertainty},
          {"slope_stderr", b.slope_stderr},
          {"window", {b.window.lo, b.window.hi}},
          {"points", b.points},
          {"sweep", sweep}};
}

bool rate_configured(const ExperimentConfig& cfg, double rate) {
  return std::any_of(cfg.rates.begin(), cfg.rates.end(),
                     [rate](double r) { return std::abs(r - rate) <= 1e-12 * std::abs(r); });
}

}  // namespace

MemoryBudget ExperimentConfig::budget() const {
  return {static_cast<std::uint64_t>(memory_gib * static_cast<double>(std::uint64_t{1} << 30))};
}

void ExperimentConfig::validate() const {
  spec.validate();
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  need(std::isfinite(h) && h >= 0.0, "model.h must be finite and >= 0");
  need(a > 0.0, "filter.a must be > 0");
  need(!e_ini || std::isfinite(*e_ini), "filter.e_ini must be finite or auto");
  need(dt > 0.0 && std::isfinite(dt), "run.dt must be > 0");
  need(k_dos >= 1, "run.k_dos must be >= 1");
  need(k_ldos >= 1, "run.k_ldos must be >= 1");
  need(dos_vectors >= 1, "run.dos_vectors must be >= 1");
  need(gamma0 > 0.0, "run.gamma0 must be > 0");
  need(!rates.empty(), "run.rates must not be empty");
  for (double r : rates) need(r > 0.0 && std::isfinite(r), "run.rates entries must be > 0");
  need(worst_rate > 0.0, "run.worst_rate must be > 0");
  need(trace_stride >= 1, "run.trace_stride must be >= 1");
  need(memory_gib > 0.0, "run.memory_gib must be > 0");
  need(!epsilons.empty(), "analysis.epsilons must not be empty");
  for (double e : epsilons) need(e > 0.0, "analysis.epsilons entries must be > 0");
  need(report_epsilon > 0.0, "analysis.report_epsilon must be > 0");
  need(!beta || *beta > 0.0, "analysis.beta must be > 0");
  for (int L : scan_sizes) need(L >= 1 && L <= 31, "scan.sizes entries must lie in [1, 31]");
}

ExperimentConfig parse_config(std::istream& is, ConfigFormat format) {
  return from_flat(format == ConfigFormat::Json ? flatten_json(is) : flatten_ini(is));
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw MissingInputError("config file not found: " + path.string());
  ConfigFormat format = path.extension() == ".json" ? ConfigFormat::Json : ConfigFormat::Ini;
  const int first = (is >> std::ws).peek();
  if (first == '{') format = ConfigFormat::Json;
  return parse_config(is, format);
}

std::string write_config_ini(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[model]\n"
     << "L = " << c.spec.L << "\n"
     << "j_par = " << fmt(c.spec.j_par) << "\n"
     << "j_perp = " << fmt(c.spec.j_perp) << "\n"
     << "delta = " << fmt(c.spec.delta) << "\n"
     << "h = " << fmt(c.h) << "\n\n";
  os << "[filter]\n"
     << "a = " << fmt(c.a) << "\n"
     << "e_ini = " << (c.e_ini ? fmt(*c.e_ini) : std::string("auto")) << "\n\n";
  os << "[run]\n"
     << "seed = " << c.seed << "\n"
     << "dt = " << fmt(c.dt) << "\n"
     << "k_dos = " << c.k_dos << "\n"
     << "k_ldos = " << c.k_ldos << "\n"
     << "dos_vectors = " << c.dos_vectors << "\n"
     << "gamma0 = " << fmt(c.gamma0) << "\n"
     << "rates = " << join(c.rates) << "\n"
     << "worst_rate = " << fmt(c.worst_rate) << "\n"
     << "trace_stride = " << c.trace_stride << "\n"
     << "memory_gib = " << fmt(c.memory_gib) << "\n"
     << "output = " << c.output << "\n\n";
  os << "[analysis]\n"
     << "epsilons = " << join(c.epsilons) << "\n"
     << "report_epsilon = " << fmt(c.report_epsilon) << "\n";
  if (c.beta) os << "beta = " << fmt(*c.beta) << "\n";
  os << "\n[scan]\n"
     << "sizes = " << join(c.scan_sizes) << "\n";
  return os.str();
}

std::string write_config_json(const ExperimentConfig& c) {
  json j;
  j["model"] = {{"L", c.spec.L}, {"j_par", c.spec.j_par}, {"j_perp", c.spec.j_perp}, {"delta", c.spec.delta},
                {"h", c.h}};
  j["filter"] = {{"a", c.a}};
  j["filter"]["e_ini"] = c.e_ini ? json(*c.e_ini) : json("auto");
  j["run"] = {{"seed", c.seed},
              {"dt", c.dt},
              {"k_dos", c.k_dos},
              {"k_ldos", c.k_ldos},
              {"dos_vectors", c.dos_vectors},
              {"gamma0", c.gamma0},
              {"rates", c.rates},
              {"worst_rate", c.worst_rate},
              {"trace_stride", c.trace_stride},
              {"memory_gib", c.memory_gib},
              {"output", c.output}};
  j["analysis"] = {{"epsilons", c.epsilons}, {"report_epsilon", c.report_epsilon}};
  if (c.beta) j["analysis"]["beta"] = *c.beta;
  j["scan"] = {{"sizes", c.scan_sizes}};
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char ch : write_config_ini(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CsvMetadata run_metadata(const ExperimentConfig& cfg) {
  return {{{"config_hash", config_hash(cfg)},
           {"code_version", kCodeVersion},
           {"created", timestamp()},
           {"L", std::to_string(cfg.spec.L)},
           {"seed", std::to_string(cfg.seed)}}};
}

SpectralDensity compute_dos(const ExperimentConfig& cfg) {
  const MemoryBudget budget = cfg.budget();
  budget.require(cfg.spec.spins(), 3, "DOS estimate");
  std::vector<AutocorrSeries> series;
  for (int v = 0; v < cfg.dos_vectors; ++v) {
    const StateVector phi = haar_random(cfg.spec.spins(), cfg.seed + 1 + static_cast<std::uint64_t>(v), budget);
    series.push_back(autocorrelation(cfg.spec, phi, cfg.integrator(), cfg.k_dos, budget));
  }
  InversionOptions opts;
  opts.window = default_window(cfg.spec);
  opts.vectors = cfg.dos_vectors;
  return dos_estimate(average(series), cfg.spec.spins(), opts);
}

PreparedState prepare_state(const ExperimentConfig& cfg) {
  const MemoryBudget budget = cfg.budget();
  budget.require(cfg.spec.spins(), 4, "state preparation");
  PreparedState out;
  const StateVector phi = haar_random(cfg.spec.spins(), cfg.seed, budget);
  out.psi = gaussian_filter(cfg.spec, {cfg.a, cfg.resolved_e_ini(), 0.0}, phi, budget, &out.filter);
  out.p_ini = ldos(cfg.spec, out.psi, cfg.integrator(), cfg.k_ldos, {}, budget);
  return out;
}

RateRun run_rate(const ExperimentConfig& cfg, const StateVector& psi_ini, double rate) {
  cfg.budget().require(cfg.spec.spins(), 3, "protocol run");
  RateRun out;
  out.rate = rate;
  out.protocol = commensurate_protocol(FieldProtocol::from_rate(cfg.h, rate * cfg.gamma0), cfg.integrator());
  TraceRecorder recorder(cfg.spec, cfg.trace_stride);
  out.psi_fin = run_protocol(cfg.spec, out.protocol, cfg.integrator(), psi_ini, {recorder.observer()}, cfg.trace_stride)
                    .psi_final;
  out.trace = recorder.rows();
  out.p_fin = ldos(cfg.spec, out.psi_fin, cfg.integrator(), cfg.k_ldos, {}, cfg.budget());
  return out;
}

EnergyWindow analysis_window(const SpectralDensity& dos, const SpectralDensity& ldos) {
  const EnergyWindow edges = spectral_edges(dos, 4.0 * dos.resolution);
  return {std::max(edges.lo, ldos.window.lo), std::min(edges.hi, ldos.window.hi)};
}

BetaFit beta_for(const ExperimentConfig& cfg, const SpectralDensity& dos) {
  if (cfg.beta) {
    BetaFit fixed;
    fixed.beta = *cfg.beta;
    return fixed;
  }
  return fit_beta_sweep(dos, cfg.resolved_e_ini(), cfg.epsilons, cfg.report_epsilon);
}

WorkReport analyze_rate(const ExperimentConfig& cfg, const SpectralDensity& dos, const SpectralDensity& p_ini,
                        const SpectralDensity& p_fin, double gamma) {
  const EnergyWindow w = analysis_window(dos, p_ini);
  return work_report(restrict_window(p_fin, w), restrict_window(p_ini, w), beta_for(cfg, dos), cfg.spec.L, gamma,
                     cfg.gamma0);
}

fs::path RunPaths::rate_dir(double rate) const {
  char buf[48];
  std::snprintf(buf, sizeof buf, "rate_%g", rate);
  return root / buf;
}

void cmd_dos(const ExperimentConfig& cfg) {
  const RunPaths paths{cfg.output};
  const SpectralDensity dos = compute_dos(cfg);
  write_density(paths.dos_csv(), dos, cfg);
  json sidecar = {{"e_ini", cfg.resolved_e_ini()}, {"config_hash", config_hash(cfg)}};
  try {
    sidecar["fit"] = beta_json(fit_beta_sweep(dos, cfg.resolved_e_ini(), cfg.epsilons, cfg.report_epsilon));
  } catch (const NumericalError& e) {
    // Small ladders have too few states for a smooth ln n(E); record the failure instead.
    sidecar["fit_error"] = e.what();
  }
  auto os = open_out(paths.beta_json());
  os << sidecar.dump(2) << "\n";
}

void cmd_prepare(const ExperimentConfig& cfg) {
  const RunPaths paths{cfg.output};
  const PreparedState prep = prepare_state(cfg);
  fs::create_directories(paths.root);
  write_checkpoint(paths.psi_ini(), prep.psi);
  write_density(paths.p_ini_csv(), prep.p_ini, cfg);
  const Moments m = moments(prep.p_ini);
  json report = {{"config_hash", config_hash(cfg)},
                 {"a", cfg.a},
                 {"e_ini", cfg.resolved_e_ini()},
                 {"chebyshev_terms", prep.filter.terms},
                 {"fft_size", prep.filter.fft_size},
                 {"bound", prep.filter.bound},
                 {"filter_weight", prep.filter.weight},
                 {"ldos_mean", m.mean},
                 {"ldos_std", m.std}};
  auto os = open_out(paths.prepare_json());
  os << report.dump(2) << "\n";
}

void cmd_run(const ExperimentConfig& cfg, double rate) {
  if (!rate_configured(cfg, rate)) throw ConfigError("rate " + fmt(rate) + " is not in run.rates");
  const RunPaths paths{cfg.output};
  if (!fs::exists(paths.psi_ini())) cmd_prepare(cfg);
  const StateVector psi = read_checkpoint(paths.psi_ini());
  if (psi.spins() != cfg.spec.spins()) throw ConfigError("psi_ini.bin does not match model.L");
  const RateRun run = run_rate(cfg, psi, rate);

  const fs::path dir = paths.rate_dir(rate);
  fs::create_directories(dir);
  write_checkpoint(dir / "psi_fin.bin", run.psi_fin);
  write_density(dir / "p_fin.csv", run.p_fin, cfg);
  {
    auto os = open_out(dir / "trace.csv");
    write_meta(os, run_metadata(cfg));
    write_trace_csv(os, run.trace);
  }
  json info = {{"rate", rate},
               {"gamma", run.protocol.gamma()},
               {"tau", run.protocol.tau},
               {"h", run.protocol.h},
               {"steps", 2 * half_ramp_steps(run.protocol, cfg.integrator())},
               {"config_hash", config_hash(cfg)}};
  auto os = open_out(dir / "run.json");
  os << info.dump(2) << "\n";
}

std::vector<WorkReport> cmd_analyze(const ExperimentConfig& cfg) {
  const RunPaths paths{cfg.output};
  const SpectralDensity dos = read_density(paths.dos_csv());
  const SpectralDensity p_ini = read_density(paths.p_ini_csv());

  std::vector<WorkReport> reports;
  std::vector<SpectralDensity> finals;
  for (double rate : cfg.rates) {
    const fs::path dir = paths.rate_dir(rate);
    if (!fs::exists(dir / "p_fin.csv")) continue;
    auto info_in = open_in(dir / "run.json");
    const double gamma = json::parse(info_in).at("gamma").get<double>();
    finals.push_back(read_density(dir / "p_fin.csv"));
    reports.push_back(analyze_rate(cfg, dos, p_ini, finals.back(), gamma));
  }
  if (reports.empty()) throw MissingInputError("no rate outputs under " + paths.root.string() + "; run first");

  std::size_t worst = 0;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (std::abs(1.0 - reports[i].exp_avg) > std::abs(1.0 - reports[worst].exp_avg)) worst = i;
  }
  {
    auto os = open_out(paths.work_csv());
    write_meta(os, run_metadata(cfg));
    os << work_report_csv_header() << "\n";
    for (const WorkReport& r : reports) os << work_report_csv_row(r) << "\n";
  }
  {
    json all = json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
      json j = json::parse(work_report_json(reports[i]));
      j["worst"] = i == worst;
      all.push_back(j);
    }
    auto os = open_out(paths.work_json());
    os << all.dump(2) << "\n";
  }

  // Fictitious distribution P_fin(E + delta_E) for the worst rate, on the P_fin grid.
  const WorkReport& wr = reports[worst];
  const SpectralDensity p_fin = crop(restrict_window(finals[worst], analysis_window(dos, p_ini)));
  SpectralDensity target = p_fin;
  target.e0 += wr.delta_E;
  const SpectralDensity shifted = resample_like(p_fin, target);
  double linf = 0.0;
  double slope = 0.0;
  for (Eigen::Index i = 0; i < p_fin.size(); ++i) {
    linf = std::max(linf, std::abs(shifted.values[i] - p_fin.values[i]));
    if (i > 0) slope = std::max(slope, std::abs(p_fin.values[i] - p_fin.values[i - 1]) / p_fin.de);
  }
  auto os = open_out(paths.shifted_csv());
  CsvMetadata meta = run_metadata(cfg);
  meta.entries.push_back({"gamma_over_gamma0", fmt(wr.gamma_over_gamma0)});
  meta.entries.push_back({"delta_E", fmt(wr.delta_E)});
  meta.entries.push_back({"linf_distance", fmt(linf)});
  meta.entries.push_back({"linf_bound", fmt(std::abs(wr.delta_E) * slope)});
  write_meta(os, meta);
  os << "E,P_fin,P_fin_shifted\n";
  char buf[96];
  for (Eigen::Index i = 0; i < p_fin.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p_fin.energy(i), p_fin.values[i], shifted.values[i]);
    os << buf;
  }
  return reports;
}

ScalingReport cmd_scan(const ExperimentConfig& cfg, const std::vector<int>& sizes) {
  if (std::set<int>(sizes.begin(), sizes.end()).size() < 3) {
    throw ConfigError("scan needs at least three distinct sizes");
  }
  std::vector<ExperimentConfig> runs;
  for (int L : sizes) {
    ExperimentConfig c = cfg;
    c.spec.L = L;
    c.e_ini.reset();
    c.rates = {cfg.worst_rate};
    c.output = (fs::path(cfg.output) / ("L" + std::to_string(L))).string();
    c.validate();
    c.budget().require(c.spec.spins(), 4, ("scan size L=" + std::to_string(L)).c_str());
    runs.push_back(c);
  }
  std::map<int, WorkReport> reports;
  for (const ExperimentConfig& c : runs) {
    cmd_dos(c);
    cmd_prepare(c);
    cmd_run(c, c.worst_rate);
    reports[c.spec.L] = cmd_analyze(c).front();
  }
  const ScalingReport scan = finite_size_scan(reports);
  auto os = open_out(RunPaths{cfg.output}.scaling_json());
  os << scaling_report_json(scan) << "\n";
  return scan;
}

}  // namespace ladder
