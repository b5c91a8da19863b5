#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "ans/experiment.hpp"
#include "ans/io.hpp"

using namespace ans;
namespace fs = std::filesystem;

namespace {

std::string small_config(const fs::path& dir) {
  return "[grid]\nn_h = 16\nn_v = 8\nL_h = 24\nL_v = 8\n"
         "[solver]\ndt = 0.05\ndt_head = 0\nt_end = 4\nhead_spacing = 0.25\nhead_end = 1\n"
         "per_octave = 4\n"
         "[data]\npreset = corollary-phi\neta = 0.05\n"
         "[diagnostics]\nchecks = decay, mixed, energy\nfit_t_min = 0.5\nfit_t_max = 4\n"
         "[output]\nname = small\ndir = " +
         dir.string() + "\n";
}

std::string refusal(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config parse and canonical round trip") {
  const ExperimentConfig c = parse_config(small_config("out"));
  CHECK(c.n_h == 16);
  CHECK(c.L_h == 24.0);
  CHECK(c.dt_head == 0.0);
  CHECK(c.checks == std::vector<std::string>{"decay", "mixed", "energy"});
  CHECK(c.name == "small");
  CHECK(c.out_dir == "out");
  CHECK(c.eta == 0.05);
  const ExperimentConfig back = parse_config(to_ini(c));
  CHECK(to_ini(back) == to_ini(c));
  CHECK(config_hash(back) == config_hash(c));
  ExperimentConfig other = c;
  other.eta = 0.06;
  CHECK(config_hash(other) != config_hash(c));
}

TEST_CASE("config refusals") {
  CHECK(refusal("[grid]\nn_x = 4\n").find("unknown config key: grid.n_x") != std::string::npos);
  CHECK(refusal("n_h = 16\n").find("outside a section") != std::string::npos);
  CHECK(refusal("[data]\neta = 0\n").find("eta") != std::string::npos);
  CHECK(refusal("[data]\neta = -1\n").find("eta") != std::string::npos);
  CHECK(refusal("[grid]\nn_h = abc\n") != "");
  const std::string w =
      refusal("[grid]\nn_h = 16\nn_v = 8\nL_h = 24\nL_v = 8\n[solver]\nt_end = 10\n");
  CHECK(w.find("t_end = 10 exceeds the validity window (L_h/12)^2 = 4 for L_h = 24") !=
        std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), std::runtime_error);
}

TEST_CASE("experiment presets") {
  CHECK(experiment_preset_names().size() >= 2);
  for (const auto& name : experiment_preset_names()) {
    const ExperimentConfig c = experiment_preset(name);
    CHECK_NOTHROW(c.validate());
    CHECK(c.name == name);
    CHECK(c.t_end <= c.validity_window());
  }
  CHECK(experiment_preset("corollary").has_check("plateau"));
  CHECK_THROWS_AS(experiment_preset("nope"), std::invalid_argument);
}

TEST_CASE("corollary data is exactly solenoidal with zero u3 mass") {
  const Grid g = make_grid(64, 64, 12.0, 12.0);
  const VelocityField raw = preset_raw_data("corollary-phi", g);
  CHECK(divergence_ratio(raw) < 1e-10);
  const VelocityField u = preset_initial_data("corollary-phi", 0.01, g);
  CHECK(u.divergence_free());
  const VelocityField p = to_physical(u);
  double mass = 0.0;
  double scale = 0.0;
  for (int i1 = 0; i1 < g.n_h(); ++i1)
    for (int i2 = 0; i2 < g.n_h(); ++i2) {
      const double v = p[2].physical()[g.physical_index(i1, i2, g.n_v() / 2 + 3)];
      mass += v;
      scale += std::abs(v);
    }
  CHECK(std::abs(mass) < 1e-12 * scale);
}

TEST_CASE("random solenoidal data is reproducible") {
  const Grid g = make_grid(16, 16, 8.0, 8.0);
  const VelocityField a = preset_initial_data("random-solenoidal", 1.0, g, 42, 3);
  const VelocityField b = preset_initial_data("random-solenoidal", 1.0, g, 42, 3);
  const VelocityField c = preset_initial_data("random-solenoidal", 1.0, g, 43, 3);
  const VelocityField pa = to_physical(a);
  const VelocityField pb = to_physical(b);
  const VelocityField pc = to_physical(c);
  bool same = true;
  bool differs = false;
  for (int k = 0; k < 3; ++k) {
    const auto x = pa[k].physical();
    const auto y = pb[k].physical();
    const auto z = pc[k].physical();
    same = same && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
    for (std::size_t i = 0; i < x.size(); ++i) differs = differs || x[i] != z[i];
  }
  CHECK(same);
  CHECK(differs);
  CHECK_THROWS_AS(preset_initial_data("unknown", 1.0, g), std::invalid_argument);
  CHECK_THROWS_AS(preset_raw_data("unknown", g), std::invalid_argument);
}

TEST_CASE("expected exponents follow the formulas") {
  CHECK(uh_decay_exponent(2.0, 0) == doctest::Approx(-0.5));
  CHECK(uh_decay_exponent(kInf, 0) == doctest::Approx(-1.0));
  CHECK(uh_decay_exponent(2.0, 1) == doctest::Approx(-1.0));
  CHECK(u3_decay_exponent(2.0, 0) == doctest::Approx(-0.75));
  CHECK(u3_decay_exponent(kInf, 0) == doctest::Approx(-1.5));
  CHECK(enhanced_dissipation_exponent(2.0, 2.0) == doctest::Approx(-0.75));
  CHECK(enhanced_dissipation_exponent(kInf, kInf) == doctest::Approx(-1.5));
  CHECK(u3_second_order_exponent(2.0) == doctest::Approx(-1.0));
  const ExpectedExponent* uh = find_expected("uh_L2");
  REQUIRE(uh != nullptr);
  CHECK(uh->exponent == doctest::Approx(uh_decay_exponent(2.0, 0)));
  CHECK(find_expected("u3_L2")->exponent == doctest::Approx(u3_decay_exponent(2.0, 0)));
  CHECK(find_expected("heat_u3_Linf_h_Linf_v")->exponent ==
        doctest::Approx(enhanced_dissipation_exponent(kInf, kInf)));
  CHECK(find_expected("remainder_u3_second_order_L2")->exponent ==
        doctest::Approx(u3_second_order_exponent(2.0)));
  CHECK(find_expected("nothing") == nullptr);
  CHECK(uh->accepts(-0.45));
  CHECK_FALSE(uh->accepts(-0.65));
  const ExpectedExponent* lower = find_expected("xh_u3_L1_h_Linf_v");
  REQUIRE(lower != nullptr);
  CHECK(lower->bound == Bound::at_least);
  CHECK(lower->accepts(0.3));
  CHECK_FALSE(lower->accepts(-0.2));
}

TEST_CASE("run, persist and re-analyze") {
  const fs::path dir = fs::temp_directory_path() / "ans-experiment-small";
  fs::remove_all(dir);
  const ExperimentConfig c = parse_config(small_config(dir));
  const Report r = run_experiment(c);
  CHECK(r.experiment == "small");
  CHECK(r.config_hash == config_hash(c));
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(fs::exists(dir / "config.ini"));
  CHECK(fs::exists(dir / "snapshots" / "store.json"));
  CHECK(r.text().find("experiment") != std::string::npos);

  const nlohmann::json j = nlohmann::json::parse(r.json());
  CHECK(j.at("experiment") == "small");
  CHECK(j.at("pass").get<bool>() == r.all_pass());
  CHECK(j.at("fits").size() == r.fits.size());

  std::ifstream in(dir / "report.json");
  CHECK_NOTHROW((void)nlohmann::json::parse(in));

  const Report again = analyze_directory(load_config(dir / "config.ini"));
  REQUIRE(again.fits.size() == r.fits.size());
  for (std::size_t i = 0; i < r.fits.size(); ++i) {
    CHECK(again.fits[i].series == r.fits[i].series);
    CHECK(std::abs(again.fits[i].fit.slope - r.fits[i].fit.slope) <= 1e-12);
  }
  CHECK(fs::exists(dir / "reanalysis" / "report.json"));
}

TEST_CASE("stage failures are named") {
  ExperimentConfig c = parse_config(small_config(fs::temp_directory_path() / "ans-experiment-cfl"));
  c.eta = 1e4;
  try {
    (void)run_experiment(c);
    FAIL("expected a solver failure");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("solver stage failed") != std::string::npos);
  }
}

}  // TEST_SUITE
