#include <iostream>

#include <CLI11.hpp>

#include "run_config.hpp"
#include "scenarios.hpp"

using namespace hybridwave;
using namespace hybridwave::cli;

namespace {

struct Options {
  std::string config;
  std::string out;
  unsigned threads = 0;
  bool verbose = false;
  bool quick = false;
};

RunConfig load(const Options& o, std::ostream& log) {
  if (o.config.empty()) throw ConfigError("--config is required for this subcommand");
  RunConfig cfg = parse_config(o.config);
  for (const auto& w : cfg.warnings) log << "warning: " << w << "\n";
  return cfg;
}

fs::path output_dir(const Options& o, const RunConfig* cfg) {
  fs::path dir = !o.out.empty() ? fs::path(o.out) : cfg ? fs::path(cfg->output.dir) : fs::path("out");
  fs::create_directories(dir);
  return dir;
}

void require_dim(const RunConfig& cfg, int dim, const char* cmd) {
  if (cfg.geometry.dim != dim)
    throw ConfigError(std::string(cmd) + ": geometry '" + cfg.geometry.type + "' is " +
                      std::to_string(cfg.geometry.dim) + "D");
}

int scatter(const Options& o, int dim, const char* cmd) {
  RunConfig cfg = load(o, std::cerr);
  require_dim(cfg, dim, cmd);
  const fs::path dir = output_dir(o, &cfg);
  ScatterResult res;
  try {
    res = run_scatter(cfg, o.verbose ? &std::cerr : nullptr);
  } catch (const std::exception& e) {
    throw std::runtime_error("scenario '" + cfg.scenario + "': " + e.what());
  }
  write_json(dir / "config.json", config_to_json(cfg));
  write_scatter(dir, cfg, res);
  std::cout << cfg.scenario << ": " << res.explicit_count << " trace(s), " << res.solves << " frequency solves\n";
  if (!res.reference.empty()) std::cout << "max_error " << fmt17(res.max_error) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid frequency/time-domain wave scattering"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory (default: output.dir, else ./out)");
  app.add_option("--threads", o.threads, "worker threads (default: HYBRIDWAVE_THREADS, else all cores)");
  app.add_flag("--verbose,-v", o.verbose, "progress on stderr");
  app.fallthrough();

  auto* demo = app.add_subcommand("transform-demo", "Fourier-quadrature convergence, periodic and FC(Gram)");
  auto* bench = app.add_subcommand("convolve-bench", "direct vs fast scaled convolution over M and N sweeps");
  bench->add_flag("--quick", o.quick, "skip the largest sizes");
  auto* s2 = app.add_subcommand("scatter2d", "2D scattering traces, tracking masks and snapshots");
  auto* s3 = app.add_subcommand("scatter-sphere", "3D sphere traces with exact reference");
  auto* conv = app.add_subcommand("convergence", "max all-time error vs delta omega");
  auto* show = app.add_subcommand("show-config", "print the configuration with defaults filled");

  CLI11_PARSE(app, argc, argv);
  if (o.threads > 0) set_thread_count(o.threads);

  try {
    if (*demo) {
      const fs::path dir = output_dir(o, nullptr);
      const auto rows = transform_demo();
      write_transform_demo(dir, rows);
      for (const auto& r : rows)
        std::cout << r.mode << " dw=" << fmt17(r.delta_omega) << " M=" << r.M << " error=" << r.error << "\n";
    } else if (*bench) {
      const fs::path dir = output_dir(o, nullptr);
      const auto b = convolve_bench(o.verbose ? &std::cerr : nullptr, o.quick);
      write_convolve_bench(dir, b);
      std::cout << "M direct_s fast_s error (N = 10000)\n";
      for (const auto& r : b.m_sweep)
        std::cout << r.M << " " << r.direct_seconds << " " << r.fast_seconds << " " << r.error << "\n";
      std::cout << "N direct_s fast_s error (M = 5000)\n";
      for (const auto& r : b.n_sweep)
        std::cout << r.N << " " << r.direct_seconds << " " << r.fast_seconds << " " << r.error << "\n";
    } else if (*s2) {
      return scatter(o, 2, "scatter2d");
    } else if (*s3) {
      return scatter(o, 3, "scatter-sphere");
    } else if (*conv) {
      RunConfig cfg = load(o, std::cerr);
      const fs::path dir = output_dir(o, &cfg);
      std::vector<ConvergenceRow> rows;
      try {
        rows = run_convergence(cfg, o.verbose ? &std::cerr : nullptr);
      } catch (const std::exception& e) {
        throw std::runtime_error("scenario '" + cfg.scenario + "': " + e.what());
      }
      write_json(dir / "config.json", config_to_json(cfg));
      write_convergence(dir, rows);
      for (const auto& r : rows) std::cout << fmt17(r.delta_omega) << " " << r.error << " " << r.ratio << "\n";
    } else if (*show) {
      RunConfig cfg = load(o, std::cerr);
      std::cout << config_to_json(cfg).dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
