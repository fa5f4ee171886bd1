#include "loe/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw loe::ParseError(path + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void print_run(const loe::RunRecord& r) {
  const std::string method = loe::to_string(r.method);
  if (!r.ok) {
    std::printf("  %-8s seed %-4llu n %-6d FAILED: %s\n", method.c_str(),
                static_cast<unsigned long long>(r.seed), r.n,
                r.message.c_str());
    return;
  }
  std::string purity;
  if (r.metrics.purity) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "  purity %.4f", *r.metrics.purity);
    purity = buf;
  }
  std::printf(
      "  %-8s seed %-4llu n %-6d c %-6g  %8.3fs  procrustes %-10.5g "
      "pred %-8.4f%s\n",
      method.c_str(), static_cast<unsigned long long>(r.seed), r.n, r.c,
      r.seconds, r.metrics.procrustes, r.metrics.prediction_error,
      purity.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loebench: landmark ordinal embedding experiments"};

  std::string config_path, preset_name, out_dir;
  std::string seeds, methods, experiment;
  std::vector<std::string> sets;
  int n = 0, d = 0, landmarks = -1, workers = 0;
  double c = 0.0, epsilon = -1.0;
  bool list_presets = false, show_config = false;

  app.add_flag("--list-presets", list_presets, "list preset names and exit");
  app.add_option("--preset", preset_name, "start from a named preset");
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--experiment", experiment,
                 "scalability|consistency|warmstart|clustering|single_run");
  app.add_option("--seeds", seeds, "seed list, e.g. 1,2,3 or 1:30");
  app.add_option("--workers", workers, "concurrent runs");
  app.add_option("--n", n, "number of items");
  app.add_option("--d", d, "embedding dimension");
  app.add_option("--landmarks", landmarks, "landmark count (0 = d+3)");
  app.add_option("--c", c, "triplet multiplier in m = c n ln n");
  app.add_option("--epsilon", epsilon, "LOE-STE stage-1 budget share");
  app.add_option("--method", methods, "method list: loe,ste,gnmds,loe_ste");
  app.add_option("--set", sets, "extra key=value overrides")->take_all();
  app.add_flag("--dry-run", show_config, "print the effective config, no runs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_presets) {
      for (const std::string& name : loe::preset_names())
        std::printf("%s%s\n", name.c_str(),
                    loe::is_full_scale_preset(name) ? "  [full-scale]" : "");
      return 0;
    }

    // Layered configuration: defaults, preset, config file, then flags.
    loe::ExperimentConfig config;
    if (!preset_name.empty()) config = loe::preset(preset_name);
    if (!config_path.empty())
      loe::apply_config_text(config, read_file(config_path));
    if (!experiment.empty()) loe::apply_option(config, "experiment", experiment);
    if (!out_dir.empty()) loe::apply_option(config, "out", out_dir);
    if (!seeds.empty()) loe::apply_option(config, "seeds", seeds);
    if (workers > 0) loe::apply_option(config, "workers", std::to_string(workers));
    if (n > 0) loe::apply_option(config, "n", std::to_string(n));
    if (d > 0) loe::apply_option(config, "d", std::to_string(d));
    if (landmarks >= 0)
      loe::apply_option(config, "landmarks", std::to_string(landmarks));
    if (c > 0.0) loe::apply_option(config, "c", std::to_string(c));
    if (epsilon >= 0.0)
      loe::apply_option(config, "epsilon", std::to_string(epsilon));
    if (!methods.empty()) loe::apply_option(config, "methods", methods);
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw loe::ParseError("--set expects key=value, got '" + kv + "'");
      loe::apply_option(config, kv.substr(0, eq), kv.substr(eq + 1));
    }

    if (show_config) {
      std::printf("%s", loe::serialize_config(config).c_str());
      return 0;
    }

    const loe::ExperimentReport report = loe::run_experiment(config);
    std::printf("%s: %zu runs -> %s\n",
                loe::to_string(config.experiment).c_str(),
                report.runs.size(), config.out.c_str());
    for (const loe::RunRecord& r : report.runs) print_run(r);
    std::printf("wrote %s, %s, %s\n", report.summary_file.c_str(),
                report.means_file.c_str(), report.report_file.c_str());
    return report.all_ok ? 0 : 1;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "loebench: %s\n", err.what());
    return 1;
  }
}
