#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ans/experiment.hpp"
#include "ans/fft.hpp"
#include "ans/selfcheck.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string preset = "thm1-decay";
  double eta = 0.0;
  bool linear_only = false;
  int threads = 0;
};

ans::ExperimentConfig resolve(const Options& o, bool prefer_out_config) {
  ans::ExperimentConfig c;
  const std::filesystem::path stored = std::filesystem::path(o.out) / "config.ini";
  if (!o.config.empty())
    c = ans::load_config(o.config);
  else if (prefer_out_config && !o.out.empty() && std::filesystem::exists(stored))
    c = ans::load_config(stored);
  else
    c = ans::experiment_preset(o.preset);
  if (o.eta > 0.0) c.eta = o.eta;
  if (o.linear_only) c.linear_only = true;
  if (!o.out.empty()) c.out_dir = o.out;
  c.validate();
  return c;
}

int finish(const ans::Report& r) {
  std::cout << r.text();
  return r.all_pass() ? 0 : 1;
}

int selfcheck() {
  bool ok = true;
  auto print = [&](const char* suite, const std::vector<ans::CheckRow>& rows) {
    for (const auto& c : rows) {
      ok = ok && c.pass;
      std::cout << (c.pass ? "PASS " : "FAIL ") << suite << "/" << c.name << "  measured "
                << c.measured << "  threshold " << c.threshold;
      if (!c.detail.empty()) std::cout << "  " << c.detail;
      std::cout << "\n";
    }
  };
  print("multiplier", ans::multiplier_identity_checks());
  print("kernel", ans::kernel_oracle_checks());
  print("gaussian", ans::gaussian_norm_checks());
  print("fit", ans::fit_checks());
  std::cout << (ok ? "selfcheck PASS" : "selfcheck FAIL") << "\n";
  return ok ? 0 : 1;
}

int print_report(const Options& o) {
  if (o.out.empty()) throw std::invalid_argument("report needs --out DIR");
  const std::filesystem::path dir(o.out);
  std::ifstream text(dir / "report.txt");
  std::ifstream json(dir / "report.json");
  if (!text || !json) throw std::runtime_error("no report in " + dir.string());
  std::cout << text.rdbuf();
  const auto j = nlohmann::json::parse(json);
  return j.at("pass").get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic Navier-Stokes decay experiments"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "INI config file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--preset", o.preset, "experiment preset (thm1-decay, corollary)");
    sub->add_option("--eta", o.eta, "initial data amplitude")->check(CLI::PositiveNumber);
    sub->add_flag("--linear-only", o.linear_only, "disable the nonlinearity");
    sub->add_option("--threads", o.threads, "FFT threads (default: ANS_THREADS or 1)")
        ->check(CLI::PositiveNumber);
  };
  auto* run = app.add_subcommand("run", "run an experiment and write its report");
  auto* linear = app.add_subcommand("linear", "run with the nonlinearity disabled");
  auto* analyze = app.add_subcommand("analyze", "re-run diagnostics on stored snapshots");
  auto* report = app.add_subcommand("report", "print a stored report");
  auto* check = app.add_subcommand("selfcheck", "multiplier identities and oracle suite");
  for (auto* sub : {run, linear, analyze, report, check}) common(sub);

  CLI11_PARSE(app, argc, argv);
  try {
    ans::set_fft_threads(o.threads > 0 ? o.threads : ans::default_thread_count());
    if (run->parsed()) return finish(ans::run_experiment(resolve(o, false)));
    if (linear->parsed()) {
      o.linear_only = true;
      return finish(ans::run_experiment(resolve(o, false)));
    }
    if (analyze->parsed()) {
      if (o.out.empty()) throw std::invalid_argument("analyze needs --out DIR");
      return finish(ans::analyze_directory(resolve(o, true)));
    }
    if (report->parsed()) return print_report(o);
    if (check->parsed()) return selfcheck();
  } catch (const std::exception& e) {
    std::cerr << "ans: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
