#include "ans/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "ans/asymptotics.hpp"
#include "ans/io.hpp"
#include "ans/operators.hpp"

#ifndef ANS_VERSION
#define ANS_VERSION "unknown"
#endif

namespace ans {

namespace {

const std::set<std::string> kGroups{"decay", "linear", "mixed", "profiles", "plateau", "energy"};
const std::set<std::string> kDataPresets{"corollary-phi", "random-solenoidal", "gaussian-shear"};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = boost::algorithm::trim_copy(text);
  if (t == "inf" || t == "infinity") return kInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": not a number: '" + text + "'");
  }
  if (used != t.size())
    throw std::invalid_argument("config key " + key + ": not a number: '" + text + "'");
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (!std::isfinite(v) || v != std::floor(v))
    throw std::invalid_argument("config key " + key + ": not an integer: '" + text + "'");
  return static_cast<long long>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(text));
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument("config key " + key + ": not a boolean: '" + text + "'");
}

std::vector<std::string> parse_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

using Setter = void (*)(ExperimentConfig&, const std::string&, const std::string&);

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"grid.n_h", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.n_h = static_cast<int>(parse_integer(k, v));
       }},
      {"grid.n_v", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.n_v = static_cast<int>(parse_integer(k, v));
       }},
      {"grid.L_h", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.L_h = parse_double(k, v);
       }},
      {"grid.L_v", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.L_v = parse_double(k, v);
       }},
      {"solver.dt", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.dt = parse_double(k, v);
       }},
      {"solver.dt_head", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.dt_head = parse_double(k, v);
       }},
      {"solver.t_end", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.t_end = parse_double(k, v);
       }},
      {"solver.cfl_safety", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.cfl_safety = parse_double(k, v);
       }},
      {"solver.linear_only", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.linear_only = parse_bool(k, v);
       }},
      {"solver.tail_threshold",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.tail_threshold = parse_double(k, v);
       }},
      {"solver.head_spacing", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.head_spacing = parse_double(k, v);
       }},
      {"solver.head_end", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.head_end = parse_double(k, v);
       }},
      {"solver.per_octave", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.per_octave = static_cast<int>(parse_integer(k, v));
       }},
      {"data.preset", [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.preset = boost::algorithm::trim_copy(v);
       }},
      {"data.eta", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.eta = parse_double(k, v);
       }},
      {"data.seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const long long s = parse_integer(k, v);
         if (s < 0) throw std::invalid_argument("config key " + k + ": seed must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"data.bumps", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.bumps = static_cast<int>(parse_integer(k, v));
       }},
      {"diagnostics.checks", [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.checks = parse_list(v);
       }},
      {"diagnostics.remainder_p",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.remainder_p.clear();
         for (const auto& item : parse_list(v)) c.remainder_p.push_back(parse_double(k, item));
       }},
      {"diagnostics.fit_t_min", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.fit_t_min = parse_double(k, v);
       }},
      {"diagnostics.fit_t_max", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.fit_t_max = parse_double(k, v);
       }},
      {"diagnostics.plateau_t_min",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.plateau_t_min = parse_double(k, v);
       }},
      {"diagnostics.plateau_t_max",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.plateau_t_max = parse_double(k, v);
       }},
      {"output.name", [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.name = boost::algorithm::trim_copy(v);
       }},
      {"output.dir", [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.out_dir = boost::algorithm::trim_copy(v);
       }},
  };
  return table;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

bool ExperimentConfig::has_check(const std::string& group) const {
  return std::find(checks.begin(), checks.end(), group) != checks.end();
}

Grid ExperimentConfig::grid() const { return make_grid(n_h, n_v, L_h, L_v); }

SolverConfig ExperimentConfig::solver() const {
  SolverConfig s;
  s.dt = dt;
  s.dt_head = dt_head;
  s.head_end = head_end;
  s.t_end = t_end;
  s.cfl_safety = cfl_safety;
  s.linear_only = linear_only;
  s.tail_threshold = tail_threshold;
  return s;
}

SnapshotSchedule ExperimentConfig::schedule() const {
  SnapshotSchedule s;
  s.head_spacing = head_spacing;
  s.head_end = head_end;
  s.per_octave = per_octave;
  s.t_end = t_end;
  return s;
}

void ExperimentConfig::validate() const {
  (void)grid();
  solver().validate();
  schedule().validate();
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive");
  if (!kDataPresets.count(preset)) throw std::invalid_argument("unknown data preset: " + preset);
  if (bumps < 1) throw std::invalid_argument("bumps must be at least 1");
  const double window = validity_window();
  if (t_end > window) {
    std::ostringstream os;
    os << "t_end = " << t_end << " exceeds the validity window (L_h/12)^2 = " << window
       << " for L_h = " << L_h;
    throw std::invalid_argument(os.str());
  }
  for (const auto& g : checks)
    if (!kGroups.count(g)) throw std::invalid_argument("unknown diagnostic group: " + g);
  for (double p : remainder_p)
    if (!(p >= 1.0)) throw std::invalid_argument("remainder exponents must be >= 1");
  if (!(fit_t_min > 0.0 && fit_t_max > fit_t_min))
    throw std::invalid_argument("fit window must satisfy 0 < fit_t_min < fit_t_max");
  if (!(plateau_t_min > 0.0 && plateau_t_max > plateau_t_min))
    throw std::invalid_argument("plateau window must satisfy 0 < t_min < t_max");
  if (out_dir.empty()) throw std::invalid_argument("output dir must not be empty");
}

ExperimentConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.message() +
                                " at line " + std::to_string(e.line()));
  }
  ExperimentConfig c;
  const auto& table = setters();
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw std::invalid_argument("config key outside a section: " + section);
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = table.find(full);
      if (it == table.end()) throw std::invalid_argument("unknown config key: " + full);
      it->second(c, full, value.data());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[grid]\n"
     << "n_h = " << c.n_h << "\n"
     << "n_v = " << c.n_v << "\n"
     << "L_h = " << format_double(c.L_h) << "\n"
     << "L_v = " << format_double(c.L_v) << "\n\n"
     << "[solver]\n"
     << "dt = " << format_double(c.dt) << "\n"
     << "dt_head = " << format_double(c.dt_head) << "\n"
     << "t_end = " << format_double(c.t_end) << "\n"
     << "cfl_safety = " << format_double(c.cfl_safety) << "\n"
     << "linear_only = " << (c.linear_only ? "true" : "false") << "\n"
     << "tail_threshold = " << format_double(c.tail_threshold) << "\n"
     << "head_spacing = " << format_double(c.head_spacing) << "\n"
     << "head_end = " << format_double(c.head_end) << "\n"
     << "per_octave = " << c.per_octave << "\n\n"
     << "[data]\n"
     << "preset = " << c.preset << "\n"
     << "eta = " << format_double(c.eta) << "\n"
     << "seed = " << c.seed << "\n"
     << "bumps = " << c.bumps << "\n\n"
     << "[diagnostics]\n"
     << "checks = " << boost::algorithm::join(c.checks, ", ") << "\n";
  std::vector<std::string> ps;
  for (double p : c.remainder_p) ps.push_back(format_double(p));
  os << "remainder_p = " << boost::algorithm::join(ps, ", ") << "\n"
     << "fit_t_min = " << format_double(c.fit_t_min) << "\n"
     << "fit_t_max = " << format_double(c.fit_t_max) << "\n"
     << "plateau_t_min = " << format_double(c.plateau_t_min) << "\n"
     << "plateau_t_max = " << format_double(c.plateau_t_max) << "\n\n"
     << "[output]\n"
     << "name = " << c.name << "\n"
     << "dir = " << c.out_dir << "\n";
  return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) { return fnv1a(to_ini(config)); }

ExperimentConfig experiment_preset(const std::string& name) {
  ExperimentConfig c;
  if (name == "thm1-decay") {
    c.name = name;
    c.checks = {"decay", "linear", "mixed", "profiles", "energy"};
  } else if (name == "corollary") {
    c.name = name;
    c.checks = {"plateau", "energy"};
  } else {
    throw std::invalid_argument("unknown experiment preset: " + name);
  }
  c.out_dir = "ans-out/" + name;
  return c;
}

std::vector<std::string> experiment_preset_names() { return {"thm1-decay", "corollary"}; }

// ---------------------------------------------------------------------------
// Initial data

VelocityField preset_raw_data(const std::string& name, const Grid& grid, std::uint64_t seed,
                              int bumps) {
  auto gauss = [](double x1, double x2, double x3) {
    return std::exp(-(x1 * x1 + x2 * x2 + x3 * x3));
  };
  if (name == "corollary-phi") {
    return VelocityField(
        ScalarField::zeros(grid, Representation::physical),
        ScalarField::sample(grid, [&](double x1, double x2, double x3) {
          return -x3 * gauss(x1, x2, x3);
        }),
        ScalarField::sample(grid, [&](double x1, double x2, double x3) {
          return x2 * gauss(x1, x2, x3);
        }));
  }
  if (name == "gaussian-shear") {
    // Horizontally localized vertical shear of u1; not solenoidal before projection.
    return VelocityField(ScalarField::sample(grid,
                                             [&](double x1, double x2, double x3) {
                                               return x3 * gauss(x1, x2, x3);
                                             }),
                         ScalarField::zeros(grid, Representation::physical),
                         ScalarField::zeros(grid, Representation::physical));
  }
  if (name == "random-solenoidal") {
    if (bumps < 1) throw std::invalid_argument("bumps must be at least 1");
    // curl of sum_b a_b exp(-|x - c_b|^2), evaluated in closed form.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> center(-1.5, 1.5);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    struct Bump {
      std::array<double, 3> c;
      std::array<double, 3> a;
    };
    std::vector<Bump> list(static_cast<std::size_t>(bumps));
    for (auto& b : list) {
      for (double& v : b.c) v = center(rng);
      for (double& v : b.a) v = amp(rng);
    }
    auto component = [&](int k) {
      return ScalarField::sample(grid, [&, k](double x1, double x2, double x3) {
        double sum = 0.0;
        for (const auto& b : list) {
          const std::array<double, 3> d{x1 - b.c[0], x2 - b.c[1], x3 - b.c[2]};
          const double g = std::exp(-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]));
          const std::array<double, 3> grad{-2.0 * d[0] * g, -2.0 * d[1] * g, -2.0 * d[2] * g};
          const int i = (k + 1) % 3;
          const int j = (k + 2) % 3;
          sum += grad[static_cast<std::size_t>(i)] * b.a[static_cast<std::size_t>(j)] -
                 grad[static_cast<std::size_t>(j)] * b.a[static_cast<std::size_t>(i)];
        }
        return sum;
      });
    };
    return VelocityField(component(0), component(1), component(2));
  }
  throw std::invalid_argument("unknown data preset: " + name);
}

VelocityField preset_initial_data(const std::string& name, double eta, const Grid& grid,
                                  std::uint64_t seed, int bumps) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  VelocityField u = helmholtz_project(preset_raw_data(name, grid, seed, bumps));
  u *= eta;
  u.set_divergence_free(true);
  return u;
}

// ---------------------------------------------------------------------------
// Expected exponents

namespace {

double inverse(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

}  // namespace

double uh_decay_exponent(double p, int derivative_order) {
  return -(1.0 - inverse(p)) - 0.5 * derivative_order;
}

double u3_decay_exponent(double p, int derivative_order) {
  return -1.5 * (1.0 - inverse(p)) - 0.5 * derivative_order;
}

double enhanced_dissipation_exponent(double p, double q) {
  return -(1.0 - inverse(p)) - 0.5 * (1.0 - inverse(q));
}

double u3_second_order_exponent(double p) { return -1.5 * (1.0 - inverse(p)) - 0.5 * inverse(p); }

bool ExpectedExponent::accepts(double slope) const {
  switch (bound) {
    case Bound::equal: return std::abs(slope - exponent) <= tolerance;
    case Bound::at_least: return slope >= exponent - tolerance;
    case Bound::at_most: return slope <= exponent + tolerance;
  }
  return false;
}

const std::vector<ExpectedExponent>& expected_exponent_table() {
  static const std::vector<ExpectedExponent> table{
      {"uh_L2", "uh-Lp-decay", "decay", uh_decay_exponent(2.0, 0), 0.1, Bound::equal},
      {"u3_L2", "u3-Lp-decay", "decay", u3_decay_exponent(2.0, 0), 0.1, Bound::equal},
      {"uh_Linf", "uh-Lp-decay", "decay", uh_decay_exponent(kInf, 0), 0.15, Bound::equal},
      {"grad_h_uh_L2", "uh-Lp-decay", "decay", uh_decay_exponent(2.0, 1), 0.15, Bound::equal},
      {"heat_u_L2", "heat-Lp-decay", "linear", uh_decay_exponent(2.0, 0), 0.05, Bound::equal},
      {"heat_u3_L2_h_L2_v", "enhanced-dissipation", "linear",
       enhanced_dissipation_exponent(2.0, 2.0), 0.07, Bound::equal},
      {"heat_u3_Linf_h_Linf_v", "enhanced-dissipation", "linear",
       enhanced_dissipation_exponent(kInf, kInf), 0.15, Bound::equal},
      {"u_Linf_h_L1_v", "mixed-norm-decay", "mixed", uh_decay_exponent(kInf, 0), 0.15,
       Bound::equal},
      {"xh_u3_L1_h_Linf_v", "weighted-bound", "mixed", 0.0, 0.15, Bound::at_least},
      {"xh_uh_L1_h_Linf_v", "weighted-bound", "mixed", 0.5, 0.15, Bound::at_most},
      {"remainder_u3_second_order_L2", "u3-second-order-expansion", "profiles",
       u3_second_order_exponent(2.0), 0.15, Bound::equal},
      {"integrand_d3_u3uh_L1", "correction-integrand-decay", "profiles", -1.5, 0.2,
       Bound::equal},
  };
  return table;
}

const ExpectedExponent* find_expected(const std::string& series) {
  for (const auto& e : expected_exponent_table())
    if (e.series == series) return &e;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Report

std::string code_version() { return ANS_VERSION; }

bool Report::all_pass() const {
  for (const auto& f : fits)
    if (!f.pass) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace {

std::string bound_text(const ExpectedExponent& e) {
  std::ostringstream os;
  switch (e.bound) {
    case Bound::equal: os << e.exponent << " +- " << e.tolerance; break;
    case Bound::at_least: os << ">= " << e.exponent - e.tolerance; break;
    case Bound::at_most: os << "<= " << e.exponent + e.tolerance; break;
  }
  return os.str();
}

const char* bound_name(Bound b) {
  switch (b) {
    case Bound::equal: return "equal";
    case Bound::at_least: return "at_least";
    case Bound::at_most: return "at_most";
  }
  return "equal";
}

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

std::string Report::text() const {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "experiment  " << experiment << "\n"
     << "version     " << version << "\n"
     << "config hash " << std::hex << std::setw(16) << std::setfill('0') << config_hash
     << std::dec << std::setfill(' ') << "\n"
     << "schedule    " << schedule << "\n"
     << "snapshots   " << snapshots << "\n\nfits\n";
  for (const auto& f : fits) {
    os << "  " << (f.pass ? "PASS " : "FAIL ") << std::left << std::setw(30) << f.series
       << std::right;
    if (f.detail.empty() || f.fit.samples > 0)
      os << " slope " << std::setw(10) << f.fit.slope << "  rms " << std::setw(10)
         << f.fit.residual_rms << "  n " << f.fit.samples << "  window [" << f.window.t_min
         << ", " << f.window.t_max << "]";
    if (f.expected) os << "  expect " << bound_text(*f.expected) << " (" << f.expected->source << ")";
    if (!f.detail.empty()) os << "  " << f.detail;
    os << "\n";
  }
  os << "\nchecks\n";
  for (const auto& c : checks) {
    os << "  " << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(30) << c.name
       << std::right << " measured " << c.measured << "  threshold " << c.threshold;
    if (!c.source.empty()) os << "  (" << c.source << ")";
    if (!c.detail.empty()) os << "  " << c.detail;
    os << "\n";
  }
  if (!warnings.empty()) {
    os << "\nwarnings\n";
    for (const auto& w : warnings) os << "  " << w << "\n";
  }
  os << "\nresult " << (all_pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string Report::json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["provenance"] = {{"version", version},
                     {"config_hash", config_hash},
                     {"config", config_text},
                     {"schedule", schedule},
                     {"snapshots", snapshots}};
  j["fits"] = nlohmann::json::array();
  for (const auto& f : fits) {
    nlohmann::json row{{"series", f.series},
                       {"t_min", number(f.window.t_min)},
                       {"t_max", number(f.window.t_max)},
                       {"slope", number(f.fit.slope)},
                       {"intercept", number(f.fit.intercept)},
                       {"residual_rms", number(f.fit.residual_rms)},
                       {"samples", f.fit.samples},
                       {"pass", f.pass}};
    if (f.expected)
      row["expected"] = {{"exponent", f.expected->exponent},
                         {"tolerance", f.expected->tolerance},
                         {"bound", bound_name(f.expected->bound)},
                         {"source", f.expected->source}};
    if (!f.detail.empty()) row["detail"] = f.detail;
    j["fits"].push_back(row);
  }
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name},
                           {"source", c.source},
                           {"measured", number(c.measured)},
                           {"threshold", number(c.threshold)},
                           {"pass", c.pass},
                           {"detail", c.detail}});
  j["warnings"] = warnings;
  j["pass"] = all_pass();
  return j.dump(2) + "\n";
}

void write_report(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "series");
  {
    std::ofstream out(dir / "report.txt");
    out << report.text();
    if (!out) throw std::runtime_error("cannot write " + (dir / "report.txt").string());
  }
  {
    std::ofstream out(dir / "report.json");
    out << report.json();
    if (!out) throw std::runtime_error("cannot write " + (dir / "report.json").string());
  }
  for (const auto& s : report.series) write_series_csv(dir / "series" / (s.label + ".csv"), {s});
}

// ---------------------------------------------------------------------------
// Analysis

std::vector<DecaySeries> decay_norms(const SnapshotStore& store) {
  DecaySeries uh2{"uh_L2", {}, {}, {}, 0.0};
  DecaySeries u32{"u3_L2", {}, {}, {}, 0.0};
  DecaySeries uhinf{"uh_Linf", {}, {}, {}, 0.0};
  DecaySeries u3inf{"u3_Linf", {}, {}, {}, 0.0};
  DecaySeries grad{"grad_h_uh_L2", {}, {}, {}, 0.0};
  for (std::size_t i = 0; i < store.size(); ++i) {
    const double t = store.times()[i];
    if (!(t > 0.0)) continue;
    const VelocityField& u = store.at(i);
    const std::array<ScalarField, 2> uh{u[0], u[1]};
    const std::span<const ScalarField> h(uh);
    uh2.push(t, norm(h, NormSpec::lp(2.0)));
    u32.push(t, norm(u[2], NormSpec::lp(2.0)));
    uhinf.push(t, norm(h, NormSpec::lp(kInf)));
    u3inf.push(t, norm(u[2], NormSpec::lp(kInf)));
    const std::array<ScalarField, 4> g{derivative(u[0], {1, 0, 0}), derivative(u[0], {0, 1, 0}),
                                       derivative(u[1], {1, 0, 0}), derivative(u[1], {0, 1, 0})};
    grad.push(t, norm(std::span<const ScalarField>(g), NormSpec::lp(2.0)));
  }
  return {uh2, u32, uhinf, u3inf.scaled_by(1.5), grad};
}

namespace {

struct Analyzer {
  const SnapshotStore& store;
  const ExperimentConfig& config;
  Report& report;

  void fit(const DecaySeries& s, FitWindow window, bool scaled = false) {
    FitRow row;
    row.series = s.label;
    row.window = window;
    if (const ExpectedExponent* e = find_expected(s.label)) row.expected = *e;
    try {
      row.fit = scaled ? fit_scaled_rate(s, window) : fit_rate(s, window);
      row.pass = !row.expected || row.expected->accepts(row.fit.slope);
    } catch (const std::exception& e) {
      row.pass = false;
      row.detail = e.what();
    }
    report.fits.push_back(row);
  }

  void check(std::string name, std::string source, double measured, double threshold,
             bool pass, std::string detail = {}) {
    report.checks.push_back(
        {std::move(name), std::move(source), measured, threshold, pass, std::move(detail)});
  }

  const DecaySeries& series(const std::string& label) const {
    for (const auto& s : report.series)
      if (s.label == label) return s;
    throw std::logic_error("missing series " + label);
  }
};

std::string p_name(double p) { return std::isinf(p) ? "Linf" : "L" + format_double(p); }

std::vector<std::string> compress_warnings(const std::vector<std::string>& in) {
  if (in.size() <= 3) return in;
  std::vector<std::string> out{in.front(), in.back()};
  out.push_back(std::to_string(in.size() - 2) + " similar warnings omitted");
  return out;
}

}  // namespace

Report analyze(const SnapshotStore& store, const ExperimentConfig& config,
               const EnergyLedger* ledger, const std::vector<std::string>& run_warnings) {
  if (store.empty()) throw std::invalid_argument("analysis needs a nonempty store");
  Report report;
  report.experiment = config.name;
  report.version = code_version();
  report.config_hash = config_hash(config);
  report.config_text = to_ini(config);
  report.schedule = store.schedule();
  report.snapshots = store.size();
  report.warnings = compress_warnings(run_warnings);
  Analyzer a{store, config, report};
  const FitWindow window{config.fit_t_min, config.fit_t_max};

  {
    double worst = 0.0;
    for (std::size_t i = 0; i < store.size(); ++i)
      worst = std::max(worst, divergence_ratio(store.at(i)));
    a.check("divergence_certificate", "", worst, kDivergenceTolerance,
            worst <= kDivergenceTolerance, "max over snapshots of |xi.u|/max|u|");
  }

  for (auto& s : decay_norms(store)) report.series.push_back(std::move(s));
  if (config.has_check("decay"))
    for (const char* label : {"uh_L2", "u3_L2", "uh_Linf", "grad_h_uh_L2"})
      a.fit(a.series(label), window);

  if (config.has_check("linear") || config.has_check("mixed")) {
    DecaySeries heat{"heat_u_L2", {}, {}, {}, 0.0};
    const VelocityField u0 = to_physical(store.at(0));
    for (std::size_t i = 0; i < store.size(); ++i) {
      const double t = store.times()[i];
      if (t > 0.0) heat.push(t, norm(to_physical(heat_semigroup_h(u0, t)), NormSpec::lp(2.0)));
    }
    report.series.push_back(heat);
    for (auto& s : diagnostic_norms(store)) report.series.push_back(std::move(s));
    if (config.has_check("linear"))
      for (const char* label : {"heat_u_L2", "heat_u3_L2_h_L2_v", "heat_u3_Linf_h_Linf_v"})
        a.fit(a.series(label), window);
    if (config.has_check("mixed"))
      for (const char* label : {"u_Linf_h_L1_v", "xh_u3_L1_h_Linf_v", "xh_uh_L1_h_Linf_v"})
        a.fit(a.series(label), window);
  }

  if (config.has_check("profiles")) {
    const bool linear = config.linear_only;
    Profiles prof = linear ? linear_profiles(store.at(0)) : compute_profiles(store);
    if (!linear) {
      report.series.push_back(prof.correction_h.integrand_l1);
      report.series.push_back(prof.correction_v.integrand_l1);
      a.fit(prof.correction_h.integrand_l1, window);
      for (const auto* c : {&prof.correction_h, &prof.correction_v}) {
        for (const auto& w : c->warnings) report.warnings.push_back(c->integrand_l1.label + ": " + w);
        std::ostringstream os;
        os << c->integrand_l1.label << ": truncated at T = " << c->t_max
           << ", tail estimate " << c->tail_estimate;
        report.warnings.push_back(os.str());
      }
    }
    const Expansion uh = linear ? Expansion::uh_leading_linear : Expansion::uh_leading;
    const Expansion u3 = linear ? Expansion::u3_leading_linear : Expansion::u3_leading;
    const Expansion u3s = linear ? Expansion::u3_second_order_linear : Expansion::u3_second_order;
    for (double p : config.remainder_p) {
      for (Expansion e : {uh, u3, u3s}) {
        DecaySeries s = remainder_series(store, prof, e, p);
        std::string label = e == uh ? "uh-leading" : e == u3 ? "u3-leading" : "u3-second-order";
        std::replace(label.begin(), label.end(), '-', '_');
        s.label = "remainder_" + label + "_" + p_name(p);
        report.series.push_back(s);
        if (e == uh) {
          const DecaySeries w = s.window(window.t_min, window.t_max);
          if (w.size() >= 2 && w.scaled.front() > 0.0) {
            const double ratio = w.scaled.back() / w.scaled.front();
            a.check(s.label + "_scaled_ratio", "uh-profile-convergence", ratio, 0.5, ratio < 0.5,
                    "final/initial of t^" + format_double(s.scale_power) + " * remainder");
          } else {
            a.check(s.label + "_scaled_ratio", "uh-profile-convergence", 0.0, 0.5, false,
                    "fewer than two samples in the fit window");
          }
        }
        if (e == u3s && p == 2.0) a.fit(s, window);
      }
    }
  }

  if (config.has_check("plateau")) {
    const VelocityField u0 = to_physical(store.at(0));
    const VerticalProfile mass = horizontal_mass(u0[2]);
    ScalarField abs3 = u0[2];
    for (double& v : abs3.physical()) v = std::abs(v);
    const double scale = horizontal_mass(abs3).max_abs();
    const double rel = scale == 0.0 ? 0.0 : mass.max_abs() / scale;
    a.check("u3_initial_mass_zero", "corollary-plateau", rel, 1e-10, rel <= 1e-10,
            "max|mass(u0_3)| relative to the mass of |u0_3|");
    const DecaySeries w = a.series("u3_Linf").window(config.plateau_t_min, config.plateau_t_max);
    if (w.size() < 3) {
      a.check("u3_Linf_plateau_cv", "corollary-plateau", 0.0, 0.25, false,
              "fewer than three samples in the plateau window");
    } else {
      std::vector<double> v = w.scaled;
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      const double cv = std::sqrt(var / static_cast<double>(v.size())) / mean;
      std::sort(v.begin(), v.end());
      const std::size_t n = v.size();
      const double median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
      a.check("u3_Linf_plateau_cv", "corollary-plateau", cv, 0.25, cv < 0.25,
              "coefficient of variation of t^1.5 * ||u3||_inf");
      a.check("u3_Linf_plateau_min", "corollary-plateau", v.front() / median, 0.2,
              v.front() > 0.2 * median, "minimum over median of t^1.5 * ||u3||_inf");
    }
  }

  if (config.has_check("energy") && ledger != nullptr && !ledger->times().empty()) {
    const double drift = ledger->max_relative_drift();
    a.check("energy_balance_drift", "energy-inequality", drift, 1e-4, drift < 1e-4,
            "max |E(t) - E(0) + int ||grad_h u||^2| / E(0)");
    for (int sigma = 0; sigma <= 2; ++sigma) {
      const double r = ledger->max_inequality_ratio(sigma);
      a.check("energy_inequality_H" + std::to_string(sigma), "energy-inequality", r, 1.0 + 1e-4,
              r <= 1.0 + 1e-4, "(||u||^2 + 2 int ||grad_h u||^2) / (2 ||u0||^2)");
    }
    DecaySeries kinetic{"kinetic_energy", ledger->times(), ledger->kinetic(), ledger->kinetic(),
                        0.0};
    report.series.push_back(kinetic);
    DecaySeries diss{"cumulative_dissipation", ledger->times(), ledger->dissipation(0),
                     ledger->dissipation(0), 0.0};
    report.series.push_back(diss);
  }
  return report;
}

namespace {

template <class F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw std::runtime_error(name + " stage failed: " + e.what());
  }
}

}  // namespace

Report run_experiment(const ExperimentConfig& config) {
  stage("config", [&] {
    config.validate();
    return 0;
  });
  const std::filesystem::path out(config.out_dir);
  const Grid grid = stage("grid", [&] { return config.grid(); });
  const VelocityField u0 = stage("data", [&] {
    return preset_initial_data(config.preset, config.eta, grid, config.seed, config.bumps);
  });
  RunResult result = stage("solver", [&] { return run(u0, config.solver(), config.schedule()); });
  stage("persist", [&] {
    std::filesystem::create_directories(out);
    std::ofstream cfg(out / "config.ini");
    cfg << to_ini(config);
    if (!cfg) throw std::runtime_error("cannot write config.ini");
    save_store(result.store, out / "snapshots");
    return 0;
  });
  Report report = stage("analysis", [&] {
    return analyze(result.store, config, &result.ledger, result.warnings);
  });
  stage("report", [&] {
    write_report(report, out);
    return 0;
  });
  return report;
}

Report analyze_directory(const ExperimentConfig& config) {
  const std::filesystem::path out(config.out_dir);
  const SnapshotStore store = stage("load", [&] { return load_store(out / "snapshots"); });
  Report report = stage("analysis", [&] { return analyze(store, config); });
  stage("report", [&] {
    write_report(report, out / "reanalysis");
    return 0;
  });
  return report;
}

}  // namespace ans
