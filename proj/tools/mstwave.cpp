// mstwave: command-line front end.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 oracle comparison failed its threshold.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mstwave/mstwave.hpp"

namespace {

enum Exit { ok = 0, config_error = 1, numerical_failure = 2, comparison_failure = 3 };

struct Common {
  std::string config_file;
  std::string preset;
  std::vector<std::string> sets;
  std::string output;
  std::string format;
  int threads = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config_file, "flat key = value config file");
  sub->add_option("-p,--preset", c.preset, "figure preset: figure1 .. figure6");
  sub->add_option("-s,--set", c.sets, "override, e.g. --set potential.u_tilde=10 (repeatable)");
  sub->add_option("-o,--output", c.output, "output path (default stdout)");
  sub->add_option("-f,--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("-j,--threads", c.threads, "worker threads (output is identical for any count)");
}

mstwave::ScenarioConfig build_config(const Common& c) {
  mstwave::ScenarioConfig cfg;
  if (!c.preset.empty()) {
    const std::string p = c.preset.rfind("figure", 0) == 0 ? c.preset.substr(6) : c.preset;
    int n = 0;
    try {
      n = std::stoi(p);
    } catch (...) {
      throw mstwave::ConfigError("unknown preset: " + c.preset);
    }
    cfg = mstwave::figure_preset(n);
  }
  if (!c.config_file.empty()) mstwave::apply_config_file(cfg, c.config_file);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw mstwave::ConfigError("--set expects key=value, got '" + s + "'");
    mstwave::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!c.output.empty()) cfg.output_path = c.output;
  if (!c.format.empty()) mstwave::apply_setting(cfg, "output.format", c.format);
  if (c.threads > 0) cfg.threads = c.threads;
  cfg.validate();
  return cfg;
}

template <class W>
void emit(const mstwave::ScenarioConfig& cfg, W&& write) {
  if (cfg.output_path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(cfg.output_path);
  if (!f) throw mstwave::ConfigError("cannot write " + cfg.output_path);
  write(f);
}

int run_table(const Common& c, mstwave::Table (*producer)(const mstwave::ScenarioConfig&)) {
  const auto cfg = build_config(c);
  const auto tab = producer(cfg);
  emit(cfg, [&](std::ostream& os) { mstwave::write_table(os, tab, cfg); });
  if (tab.failures > 0) {
    std::cerr << "mstwave: " << tab.failures << " row(s) flagged (see status column)\n";
    return numerical_failure;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wave-packet propagation through a rectangular asymmetric well/barrier"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("mstwave ") + mstwave::tool_version);

  Common amp, den, dw, orc, fig;
  add_common(app.add_subcommand("amplitudes", "scattering amplitudes over grid.e"), amp);
  add_common(app.add_subcommand("density", "probability density over grid.x x grid.t"), den);
  add_common(app.add_subcommand("dwell", "dwell times over grid.u"), dw);
  add_common(app.add_subcommand("oracle-compare", "spectral result vs finite-difference solver"), orc);
  auto* figure = app.add_subcommand("figure", "run a figure preset (1-4 density, 5-6 dwell)");
  int figure_n = 0;
  figure->add_option("n", figure_n, "figure number")->required()->check(CLI::Range(1, 6));
  add_common(figure, fig);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (app.got_subcommand("amplitudes")) return run_table(amp, mstwave::run_amplitudes);
    if (app.got_subcommand("density")) return run_table(den, mstwave::run_density);
    if (app.got_subcommand("dwell")) return run_table(dw, mstwave::run_dwell);
    if (app.got_subcommand("figure")) {
      fig.preset = "figure" + std::to_string(figure_n);
      return run_table(fig, figure_n <= 4 ? mstwave::run_density : mstwave::run_dwell);
    }
    if (app.got_subcommand("oracle-compare")) {
      const auto cfg = build_config(orc);
      const auto rep = mstwave::run_oracle_compare(cfg);
      emit(cfg, [&](std::ostream& os) { os << rep.to_json().dump(2) << "\n"; });
      if (rep.mst_poisoned > 0) return numerical_failure;
      return rep.passed ? ok : comparison_failure;
    }
  } catch (const mstwave::ConfigError& e) {
    std::cerr << "mstwave: configuration error: " << e.what() << "\n";
    return config_error;
  } catch (const mstwave::DomainError& e) {
    std::cerr << "mstwave: configuration error: " << e.what() << "\n";
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "mstwave: numerical failure: " << e.what() << "\n";
    return numerical_failure;
  }
  return ok;
}
