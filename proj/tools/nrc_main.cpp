#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

#include "nrc/error.hpp"
#include "nrc/harness.hpp"
#include "nrc/serialization.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> grid;
  std::optional<std::string> fock_dim;
  std::optional<double> tol;
};

void add_common(CLI::App* app, Overrides& o, bool config_required) {
  auto* c = app->add_option("--config", o.config, "experiment config (JSON)");
  if (config_required) c->required()->check(CLI::ExistingFile);
  else c->check(CLI::ExistingFile);
  app->add_option("--out", o.out, "output directory");
  app->add_option("--workers", o.workers, "scan worker threads (0: available parallelism)");
  app->add_option("--grid", o.grid, "time grid points for measures and quadrature")->check(CLI::Range(3, 10'000'000));
  app->add_option("--fock-dim", o.fock_dim, "Fock truncation: a number or 'auto'");
  app->add_option("--tol", o.tol, "relative integrator tolerance")->check(CLI::Range(1e-14, 1e-2));
}

void apply(nrc::ExperimentConfig& c, const Overrides& o) {
  if (o.out) c.out_dir = *o.out;
  if (o.workers) c.workers = *o.workers;
  if (o.grid) c.grid = *o.grid;
  if (o.tol) c.tol = *o.tol;
  if (o.fock_dim) {
    if (*o.fock_dim == "auto") c.fock_dim = 0;
    else {
      try {
        std::size_t used = 0;
        const long long d = std::stoll(*o.fock_dim, &used);
        if (used != o.fock_dim->size() || d < 2) throw std::invalid_argument("bad");
        c.fock_dim = static_cast<std::size_t>(d);
      } catch (const std::exception&) {
        throw nrc::Error(nrc::ErrorKind::config, "--fock-dim expects an integer >= 2 or 'auto'");
      }
    }
  }
  nrc::validate(c);
}

nrc::ExperimentConfig load(const Overrides& o, nrc::ExperimentId fallback) {
  nrc::ExperimentConfig c = o.config.empty() ? nrc::default_config(fallback) : nrc::load_config(o.config);
  apply(c, o);
  return c;
}

void finish(const nrc::RunOutput& out, const nrc::ExperimentConfig& c, const std::string& dir) {
  nrc::write_outputs(out, c, dir);
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << out.summary.dump(2) << "\n";
  std::cout << "wrote " << out.tables.size() << " table(s) to " << dir << "\n";
}

int run_reproduce(const std::string& fig, const Overrides& o) {
  using nrc::ExperimentId;
  auto prepare = [&](ExperimentId id) {
    auto c = nrc::default_config(id);
    apply(c, o);
    c.out_dir = o.out.value_or("out") + "/" + fig;
    return c;
  };
  if (fig == "fig1") {
    const auto c = prepare(ExperimentId::tls_single);
    finish(nrc::run_tls_single(c), c, c.out_dir);
  } else if (fig == "fig2") {
    // panels: eta_x = 2 eta_z, eta_z = 2 eta_x, equal strengths
    const double panels[3][2] = {{0.0625, 0.125}, {0.125, 0.0625}, {0.125, 0.125}};
    const char* names[3] = {"a", "b", "c"};
    for (int k = 0; k < 3; ++k) {
      auto c = prepare(ExperimentId::tls_dual);
      c.channels[0].eta = panels[k][0];
      c.channels[1].eta = panels[k][1];
      finish(nrc::run_tls_dual(c), c, c.out_dir + "/" + names[k]);
    }
  } else if (fig == "fig3") {
    const auto c = prepare(ExperimentId::ho_coherent);
    finish(nrc::run_ho_coherent(c), c, c.out_dir);
  } else if (fig == "fig4") {
    const auto c = prepare(ExperimentId::ho_thermal);
    finish(nrc::run_ho_thermal(c), c, c.out_dir);
  } else {
    throw nrc::Error(nrc::ErrorKind::config, "unknown figure '" + fig + "' (fig1..fig4)");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noise-robust shortcut protocols: synthesis, measures, noisy dynamics and scans"};
  app.require_subcommand(1);

  Overrides o_syn, o_meas, o_sim, o_scan, o_rep;
  auto* syn = app.add_subcommand("synthesize", "build a protocol and write its controls");
  add_common(syn, o_syn, false);
  auto* meas = app.add_subcommand("measure", "evaluate O, A or S_n for a protocol");
  add_common(meas, o_meas, false);
  auto* sim = app.add_subcommand("simulate", "integrate the noisy dynamics of one protocol");
  add_common(sim, o_sim, false);
  auto* sc = app.add_subcommand("scan", "run the experiment described by a config");
  add_common(sc, o_scan, true);
  auto* rep = app.add_subcommand("reproduce", "run a figure-level experiment with default parameters");
  std::string fig;
  rep->add_option("figure", fig, "fig1 | fig2 | fig3 | fig4")->required()->check(
      CLI::IsMember({"fig1", "fig2", "fig3", "fig4"}));
  add_common(rep, o_rep, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_config;
  }

  try {
    if (syn->parsed()) {
      const auto c = load(o_syn, nrc::ExperimentId::tls_single);
      const auto d = nrc::default_protocol(c);
      nrc::RunOutput out;
      out.tables.push_back(nrc::control_trace(d, c.grid));
      out.summary = {{"protocol", nrc::to_json(d)}};
      finish(out, c, c.out_dir);
      return 0;
    }
    if (meas->parsed()) {
      const auto c = load(o_meas, nrc::ExperimentId::tls_single);
      std::vector<nrc::NoiseChannel> chs;
      for (const auto& ch : c.channels) chs.push_back(nrc::to_channel(ch));
      std::cout << nrc::measure_protocol(nrc::default_protocol(c), chs, c.grid).dump(2) << "\n";
      return 0;
    }
    if (sim->parsed()) {
      auto c = load(o_sim, nrc::ExperimentId::tls_single);
      if (!c.protocol) c.protocol = nrc::default_protocol(c);
      c.experiment = nrc::ExperimentId::custom;
      finish(nrc::run_custom(c), c, c.out_dir);
      return 0;
    }
    if (sc->parsed()) {
      const auto c = load(o_scan, nrc::ExperimentId::tls_single);
      finish(nrc::run_experiment(c), c, c.out_dir);
      return 0;
    }
    if (rep->parsed()) return run_reproduce(fig, o_rep);
  } catch (const nrc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == nrc::ErrorKind::config ? exit_config : exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numerical;
  }
  return 0;
}
