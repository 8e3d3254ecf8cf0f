#include <CLI11.hpp>

#include <iostream>

#include "sdira/cli.hpp"

using namespace sdira;
using namespace sdira::cli;

namespace {

void add_common(CLI::App* app, RunConfig& c) {
  app->add_option("--delta", c.delta, "SV bias in [0, 0.5)");
  app->add_option("--omega0", c.omega0, "energy bound for x = 0");
  app->add_option("--omega1", c.omega1, "energy bound for x = 1");
  app->add_option("--n", c.n, "number of rounds");
  app->add_option("--d", c.d, "second-source length (0: extractor input length)");
  app->add_option("--m", c.m, "extractor output length");
  app->add_option("--gamma-est", c.gamma_est, "abort tolerance");
  app->add_option("--i-exp", c.i_exp, "expected winning value");
  app->add_option("--eps-s", c.eps_s, "smoothing parameter");
  app->add_option("--eps-ext", c.eps_ext, "extractor error");
  app->add_option("--eps-eat", c.eps_eat, "EAT error");
  app->add_option("--seed", c.seed, "base seed");
  app->add_option("--runs", c.runs, "number of protocol runs");
  app->add_option("--out", c.out, "output file (bounds, eat, extract) or directory (simulate)");
  app->add_option("--format", c.format, "csv or json");
  app->add_option("--threads", c.threads, "worker threads for bounds (0: auto)");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  std::string config_path;
  // The config file is applied first so that flags override it.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  }
  for (int i = 1; i < argc; ++i) {
    const std::string s(argv[i]);
    if (s.rfind("--config=", 0) == 0) config_path = s.substr(9);
  }
  try {
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }

  CLI::App app{"Randomness amplification with energy-bounded devices"};
  app.require_subcommand(1);
  std::string ignored;
  app.add_option("--config", ignored, "JSON config file; flags override its values");

  auto* bounds = app.add_subcommand("bounds", "single-round min-entropy bounds f and g over a delta grid");
  add_common(bounds, cfg);
  bounds->add_option("--deltas", cfg.deltas, "explicit delta grid")->delimiter(',');

  auto* eat = app.add_subcommand("eat", "finite-size entropy, extractor thresholds and security bounds");
  add_common(eat, cfg);
  eat->add_option("--eps-k", cfg.eps_k, "zero or literal");
  eat->add_option("--slope", cfg.slope, "f-delta or derivative");

  auto* simulate = app.add_subcommand("simulate", "run the protocol with simulated source and device");
  add_common(simulate, cfg);
  simulate->add_option("--device", cfg.device, "honest or vertex");
  simulate->add_option("--vertex", cfg.vertex, "classical vertex index");
  simulate->add_option("--source", cfg.source, "uniform, fixed-bias or greedy");
  simulate->add_option("--transcripts", cfg.transcripts, "write one transcript JSON per run");

  auto* ext = app.add_subcommand("extract", "apply the extractor to two bit strings");
  add_common(ext, cfg);
  ext->add_option("--a", cfg.a, "first input as len:hex");
  ext->add_option("--z", cfg.z, "second input as len:hex");

  for (auto* sub : {bounds, eat, simulate, ext}) sub->add_option("--config", ignored, "JSON config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (bounds->parsed()) return cmd_bounds(cfg, std::cout, std::cerr);
    if (eat->parsed()) return cmd_eat(cfg, std::cout, std::cerr);
    if (simulate->parsed()) return cmd_simulate(cfg, std::cout, std::cerr);
    if (ext->parsed()) return cmd_extract(cfg, std::cout, std::cerr);
  } catch (const InsufficientEntropyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInsufficient;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kComputation;
  }
  return kValidation;
}
