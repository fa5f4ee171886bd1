#include "loe/harness.hpp"

#include "loe/baselines.hpp"
#include "loe/lmds.hpp"
#include "loe/synthetic.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace loe {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::scalability: return "scalability";
    case Experiment::consistency: return "consistency";
    case Experiment::warmstart: return "warmstart";
    case Experiment::clustering: return "clustering";
    case Experiment::single_run: return "single_run";
  }
  return "single_run";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::loe: return "loe";
    case Method::ste: return "ste";
    case Method::gnmds: return "gnmds";
    case Method::loe_ste: return "loe_ste";
  }
  return "loe";
}

Experiment parse_experiment(const std::string& name) {
  if (name == "scalability") return Experiment::scalability;
  if (name == "consistency") return Experiment::consistency;
  if (name == "warmstart") return Experiment::warmstart;
  if (name == "clustering") return Experiment::clustering;
  if (name == "single_run") return Experiment::single_run;
  throw ParseError("config: unknown experiment '" + name + "'");
}

Method parse_method(const std::string& name) {
  if (name == "loe") return Method::loe;
  if (name == "ste") return Method::ste;
  if (name == "gnmds") return Method::gnmds;
  if (name == "loe_ste" || name == "loe-ste") return Method::loe_ste;
  throw ParseError("config: unknown method '" + name + "'");
}

// ---------------------------------------------------------------------------
// Config text
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

long long parse_ll(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("config: bad integer for '" + key + "': " + value);
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("config: bad number for '" + key + "': " + value);
  }
}

/// Integer list with `a:b` inclusive-range sugar: "1:4,9" -> 1 2 3 4 9.
template <typename T>
std::vector<T> parse_int_list(const std::string& key,
                              const std::string& value) {
  std::vector<T> out;
  for (const std::string& item : split_list(value)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      out.push_back(static_cast<T>(parse_ll(key, item)));
      continue;
    }
    const long long lo = parse_ll(key, item.substr(0, colon));
    const long long hi = parse_ll(key, item.substr(colon + 1));
    if (hi < lo)
      throw ParseError("config: empty range for '" + key + "': " + item);
    for (long long v = lo; v <= hi; ++v) out.push_back(static_cast<T>(v));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  for (const std::string& item : split_list(value))
    out.push_back(parse_double(key, item));
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& values, F&& one) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += one(values[i]);
  }
  return out;
}

/// Config fields as (key, value) pairs in file syntax; single source for
/// serialize_config and the JSON snapshot, so records replay by feeding
/// each pair back through apply_option.
std::vector<std::pair<std::string, std::string>> config_items(
    const ExperimentConfig& c) {
  return {
      {"experiment", to_string(c.experiment)},
      {"n", std::to_string(c.n)},
      {"d", std::to_string(c.d)},
      {"landmarks", std::to_string(c.landmarks)},
      {"c", fmt(c.c)},
      {"epsilon", fmt(c.epsilon)},
      {"flip", fmt(c.flip)},
      {"distribution", c.distribution},
      {"link", c.link == Link::logistic ? "logistic" : "probit"},
      {"clusters", std::to_string(c.clusters)},
      {"separation", fmt(c.separation)},
      {"scale", fmt(c.scale)},
      {"seeds", join(c.seeds, [](std::uint64_t s) { return std::to_string(s); })},
      {"methods", join(c.methods, [](Method m) { return to_string(m); })},
      {"n_sweep", join(c.n_sweep, [](int v) { return std::to_string(v); })},
      {"c_sweep", join(c.c_sweep, [](double v) { return fmt(v); })},
      {"out", c.out},
      {"workers", std::to_string(c.workers)},
      {"log_base", fmt(c.log_base)},
      {"c_lambda", fmt(c.c_lambda)},
      {"mle_tol", fmt(c.mle_tol)},
      {"mle_max_iters", std::to_string(c.mle_max_iters)},
      {"descent_max_iters", std::to_string(c.descent_max_iters)},
      {"descent_loss_rtol", fmt(c.descent_loss_rtol)},
      {"descent_patience", std::to_string(c.descent_patience)},
      {"trace_every", std::to_string(c.trace_every)},
      {"minibatch", std::to_string(c.minibatch)},
      {"prediction_sample", std::to_string(c.prediction_sample)},
      {"exhaustive_prediction_max",
       std::to_string(c.exhaustive_prediction_max)},
  };
}

}  // namespace

void apply_option(ExperimentConfig& config, const std::string& key,
                  const std::string& value) {
  const auto positive = [&](long long v) {
    if (v < 1) throw ParseError("config: '" + key + "' must be positive");
    return v;
  };
  if (key == "experiment") config.experiment = parse_experiment(value);
  else if (key == "n") config.n = static_cast<int>(positive(parse_ll(key, value)));
  else if (key == "d") config.d = static_cast<int>(positive(parse_ll(key, value)));
  else if (key == "landmarks") config.landmarks = static_cast<int>(parse_ll(key, value));
  else if (key == "c") config.c = parse_double(key, value);
  else if (key == "epsilon") config.epsilon = parse_double(key, value);
  else if (key == "flip") config.flip = parse_double(key, value);
  else if (key == "distribution") {
    if (value != "normal" && value != "uniform" && value != "clustered")
      throw ParseError("config: unknown distribution '" + value + "'");
    config.distribution = value;
  } else if (key == "link") {
    if (value == "logistic") config.link = Link::logistic;
    else if (value == "probit") config.link = Link::probit;
    else throw ParseError("config: unknown link '" + value + "'");
  } else if (key == "clusters") config.clusters = static_cast<int>(positive(parse_ll(key, value)));
  else if (key == "separation") config.separation = parse_double(key, value);
  else if (key == "scale") config.scale = parse_double(key, value);
  else if (key == "seeds") config.seeds = parse_int_list<std::uint64_t>(key, value);
  else if (key == "methods") {
    config.methods.clear();
    for (const std::string& name : split_list(value))
      config.methods.push_back(parse_method(name));
  } else if (key == "n_sweep") config.n_sweep = parse_int_list<int>(key, value);
  else if (key == "c_sweep") config.c_sweep = parse_double_list(key, value);
  else if (key == "out") config.out = value;
  else if (key == "workers") config.workers = static_cast<int>(positive(parse_ll(key, value)));
  else if (key == "log_base") config.log_base = parse_double(key, value);
  else if (key == "c_lambda") config.c_lambda = parse_double(key, value);
  else if (key == "mle_tol") config.mle_tol = parse_double(key, value);
  else if (key == "mle_max_iters") config.mle_max_iters = static_cast<int>(positive(parse_ll(key, value)));
  else if (key == "descent_max_iters") config.descent_max_iters = static_cast<int>(positive(parse_ll(key, value)));
  else if (key == "descent_loss_rtol") config.descent_loss_rtol = parse_double(key, value);
  else if (key == "descent_patience") config.descent_patience = static_cast<int>(positive(parse_ll(key, value)));
  else if (key == "trace_every") config.trace_every = static_cast<int>(positive(parse_ll(key, value)));
  else if (key == "minibatch") config.minibatch = static_cast<std::uint64_t>(parse_ll(key, value));
  else if (key == "prediction_sample") config.prediction_sample = static_cast<std::uint64_t>(positive(parse_ll(key, value)));
  else if (key == "exhaustive_prediction_max") config.exhaustive_prediction_max = static_cast<int>(parse_ll(key, value));
  else throw ParseError("config: unknown key '" + key + "'");
}

void apply_config_text(ExperimentConfig& config, const std::string& text) {
  std::stringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(line_no) +
                       ": expected 'key = value', got '" + line + "'");
    apply_option(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  apply_config_text(config, text);
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, value] : config_items(config))
    out += key + " = " + value + "\n";
  return out;
}

std::uint64_t triplet_budget(const ExperimentConfig& config, int n) {
  if (n < 2) throw DimensionError("triplet_budget: need n >= 2");
  const double log_n = config.log_base > 0.0
                           ? std::log(static_cast<double>(n)) / std::log(config.log_base)
                           : std::log(static_cast<double>(n));
  return static_cast<std::uint64_t>(
      std::ceil(config.c * static_cast<double>(n) * log_n));
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

struct Preset {
  const char* name;
  const char* text;
};

// Desk-scale presets run in minutes on a workstation; the `-full` variants
// keep the published experiment scales and can run for hours.
const Preset kPresets[] = {
    {"consistency",
     "# Procrustes error vs triplet multiplier c (desk scale).\n"
     "experiment = consistency\n"
     "n = 100\n"
     "d = 2\n"
     "distribution = normal\n"
     "c_sweep = 10,50,100,200,400\n"
     "seeds = 1:30\n"
     "methods = loe\n"},
    {"consistency-full",
     "# Full c sweep of the consistency study.\n"
     "experiment = consistency\n"
     "n = 100\n"
     "d = 2\n"
     "distribution = normal\n"
     "c_sweep = 10,50,100,150,200,300,400\n"
     "seeds = 1:30\n"
     "methods = loe\n"},
    {"scalability",
     "# LOE wall-clock growth over n (desk scale).\n"
     "experiment = scalability\n"
     "d = 2\n"
     "c = 50\n"
     "n_sweep = 2000,4000,8000,16000\n"
     "seeds = 1\n"
     "methods = loe\n"},
    {"scalability-full",
     "# Full-scale scalability sweep: n up to 1e5 at c = 200.\n"
     "experiment = scalability\n"
     "d = 2\n"
     "c = 200\n"
     "n_sweep = 20000,40000,60000,80000,100000\n"
     "seeds = 1,2,3\n"
     "methods = loe\n"},
    {"speed",
     "# LOE finish time vs STE time-to-match (desk scale).\n"
     "experiment = single_run\n"
     "n = 4000\n"
     "d = 2\n"
     "c = 200\n"
     "seeds = 1,2,3\n"
     "methods = loe,ste\n"},
    {"speed-full",
     "# Full-scale time-versus-error runs at n = 1e5, c = 200.\n"
     "experiment = single_run\n"
     "n = 100000\n"
     "d = 2\n"
     "c = 200\n"
     "seeds = 1,2,3\n"
     "methods = loe,ste,gnmds\n"},
    {"warmstart-d2",
     "# LOE-STE vs cold STE, d = 2 protocol (desk scale).\n"
     "experiment = warmstart\n"
     "n = 2000\n"
     "d = 2\n"
     "c = 50\n"
     "epsilon = 0.3\n"
     "seeds = 1,2,3\n"
     "methods = ste,loe_ste\n"},
    {"warmstart-d2-full",
     "# Full-scale d = 2 warm start: n = 1e5, c = 50, epsilon = 0.3.\n"
     "experiment = warmstart\n"
     "n = 100000\n"
     "d = 2\n"
     "c = 50\n"
     "epsilon = 0.3\n"
     "seeds = 1,2,3\n"
     "methods = ste,loe_ste\n"},
    {"warmstart-d10",
     "# LOE-STE vs cold STE, d = 10 protocol (desk scale).\n"
     "experiment = warmstart\n"
     "n = 2000\n"
     "d = 10\n"
     "c = 200\n"
     "epsilon = 0.2\n"
     "seeds = 1,2,3\n"
     "methods = ste,loe_ste\n"},
    {"warmstart-d10-full",
     "# Full-scale d = 10 warm start: n = 2e4, c = 200, epsilon = 0.2.\n"
     "experiment = warmstart\n"
     "n = 20000\n"
     "d = 10\n"
     "c = 200\n"
     "epsilon = 0.2\n"
     "seeds = 1,2,3\n"
     "methods = ste,loe_ste\n"},
    {"clustering",
     "# Label-flip clustering purity on separated blobs (desk scale).\n"
     "experiment = clustering\n"
     "n = 500\n"
     "d = 5\n"
     "clusters = 5\n"
     "separation = 10\n"
     "flip = 0.15\n"
     "c = 200\n"
     "epsilon = 0.5\n"
     "seeds = 1,2,3\n"
     "methods = ste,loe_ste\n"},
    {"clustering-full",
     "# Larger clustering stand-in: n = 2e4 blobs, flip = 0.15.\n"
     "experiment = clustering\n"
     "n = 20000\n"
     "d = 5\n"
     "clusters = 5\n"
     "separation = 10\n"
     "flip = 0.15\n"
     "c = 200\n"
     "epsilon = 0.5\n"
     "seeds = 1,2,3\n"
     "methods = ste,loe_ste\n"},
};

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Preset& p : kPresets) out.emplace_back(p.name);
    return out;
  }();
  return names;
}

bool is_full_scale_preset(const std::string& name) {
  return name.size() > 5 && name.substr(name.size() - 5) == "-full";
}

std::string preset_text(const std::string& name) {
  for (const Preset& p : kPresets)
    if (name == p.name) return p.text;
  throw ParseError("unknown preset '" + name + "'");
}

ExperimentConfig preset(const std::string& name) {
  return parse_config_text(preset_text(name));
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot open for write");
    out << content;
    if (!out.flush())
      throw std::runtime_error(tmp.string() + ": write failed");
  }
  fs::rename(tmp, target);
}

namespace {

std::string sanitize(std::string text) {
  for (char& ch : text)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return text;
}

std::string trace_csv(const DescentTrace& trace) {
  std::string out = "elapsed_seconds,loss,procrustes_error\n";
  for (const TracePoint& p : trace) {
    out += fmt(p.seconds);
    out += ',';
    out += fmt(p.loss);
    out += ',';
    if (p.error) out += fmt(*p.error);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

struct RunSpec {
  Method method;
  int n;
  double c;
  std::uint64_t seed;
};

RunRecord run_one(const ExperimentConfig& cfg, const RunSpec& spec,
                  const std::string& trace_dir) {
  RunRecord rec;
  rec.method = spec.method;
  rec.seed = spec.seed;
  rec.n = spec.n;
  rec.d = cfg.d;
  rec.landmarks = cfg.landmarks > 0 ? cfg.landmarks : cfg.d + 3;
  rec.c = spec.c;
  rec.epsilon = cfg.epsilon;

  try {
    ExperimentConfig cell = cfg;
    cell.c = spec.c;
    rec.m = triplet_budget(cell, spec.n);

    const bool clustered = cfg.experiment == Experiment::clustering ||
                           cfg.distribution == "clustered";
    Matrix X_true;
    std::vector<int> labels;
    if (clustered) {
      ClusteredConfig blob = generate_clustered_config(
          spec.n, cfg.d, cfg.clusters, cfg.separation, spec.seed);
      X_true = std::move(blob.X);
      labels = std::move(blob.labels);
    } else if (cfg.distribution == "uniform") {
      X_true = generate_uniform_config(spec.n, cfg.d, spec.seed);
    } else {
      X_true = generate_normal_config(spec.n, cfg.d, spec.seed, cfg.scale);
    }

    // Clustered data pairs with the label-flip noise model; point data
    // pairs with the BTL link.
    std::unique_ptr<TripletOracle> oracle;
    if (clustered)
      oracle = std::make_unique<FlipTripletOracle>(X_true, spec.seed, cfg.flip);
    else
      oracle = std::make_unique<BtlTripletOracle>(X_true, spec.seed, cfg.link);

    LoeOptions lopts;
    lopts.landmarks = rec.landmarks;
    lopts.seed = spec.seed;
    lopts.c_lambda = cfg.c_lambda;
    lopts.mle.tol = cfg.mle_tol;
    lopts.mle.max_iters = cfg.mle_max_iters;
    // Nested parallelism is counterproductive once runs themselves are
    // concurrent.
    lopts.parallel_columns = cfg.workers <= 1;

    DescentOptions dopts;
    dopts.max_iters = cfg.descent_max_iters;
    dopts.loss_rtol = cfg.descent_loss_rtol;
    dopts.patience = cfg.descent_patience;
    dopts.seed = spec.seed;
    dopts.trace_every = cfg.trace_every;
    dopts.ground_truth = &X_true;
    dopts.minibatch = cfg.minibatch;

    Matrix X_hat;
    DescentTrace trace;
    switch (spec.method) {
      case Method::loe: {
        LoeResult res = loe(*oracle, cfg.d, rec.m, lopts);
        X_hat = std::move(res.X);
        rec.seconds = res.seconds.total;
        rec.queries = res.queries;
        rec.converged = res.converged;
        rec.stop_reason = "landmark pipeline";
        break;
      }
      case Method::ste:
      case Method::gnmds: {
        TripletBatch batch =
            sample_triplet_batch(*oracle, rec.m, spec.seed);
        DescentResult res =
            spec.method == Method::ste
                ? ste_nonconvex(batch, cfg.d, nullptr, dopts)
                : gnmds_nonconvex(batch, cfg.d, nullptr, dopts);
        X_hat = std::move(res.X);
        rec.seconds = res.trace.back().seconds;
        rec.queries = oracle->query_count();
        rec.converged = res.converged;
        rec.stop_reason = res.stop_reason;
        trace = std::move(res.trace);
        break;
      }
      case Method::loe_ste: {
        WarmstartOptions wopts{lopts, dopts};
        WarmstartResult res =
            loe_ste_warmstart(*oracle, cfg.d, rec.m, cfg.epsilon, wopts);
        X_hat = std::move(res.X);
        rec.seconds = res.trace.back().seconds;
        rec.queries = res.queries;
        rec.converged = res.stage1.converged && res.stage2.converged;
        rec.stop_reason = res.stage2.stop_reason;
        trace = std::move(res.trace);
        break;
      }
    }

    rec.metrics.procrustes = procrustes_distance(X_true, X_hat);
    rec.metrics.normalized_procrustes =
        rec.metrics.procrustes /
        std::sqrt(static_cast<double>(spec.n) * static_cast<double>(cfg.d));
    rec.metrics.prediction_error =
        spec.n <= cfg.exhaustive_prediction_max
            ? triplet_prediction_error(X_true, X_hat)
            : triplet_prediction_error(X_true, X_hat, cfg.prediction_sample,
                                       spec.seed);
    if (clustered)
      rec.metrics.purity =
          kmeans_purity(X_hat, labels, cfg.clusters, 5, 100, spec.seed);

    if (!trace.empty() && !trace_dir.empty()) {
      char cbuf[40];
      std::snprintf(cbuf, sizeof cbuf, "%g", spec.c);
      const std::string path = trace_dir + "/" + to_string(spec.method) +
                               "_n" + std::to_string(spec.n) + "_c" + cbuf +
                               "_seed" + std::to_string(spec.seed) + ".csv";
      write_file_atomic(path, trace_csv(trace));
      rec.trace_file = path;
    }
  } catch (const std::exception& err) {
    rec.ok = false;
    rec.message = err.what();
  }
  return rec;
}

std::string summary_csv(const ExperimentConfig& cfg,
                        const std::vector<RunRecord>& runs) {
  std::string out =
      "experiment,method,seed,n,d,landmarks,c,m,epsilon,status,seconds,"
      "procrustes,normalized_procrustes,prediction_error,purity,queries,"
      "converged,stop_reason,trace_file,message\n";
  for (const RunRecord& r : runs) {
    out += to_string(cfg.experiment) + ',' + to_string(r.method) + ',' +
           std::to_string(r.seed) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.d) + ',' + std::to_string(r.landmarks) + ',' +
           fmt(r.c) + ',' + std::to_string(r.m) + ',' + fmt(r.epsilon) + ',' +
           (r.ok ? "ok" : "failed") + ',' + fmt(r.seconds) + ',' +
           fmt(r.metrics.procrustes) + ',' +
           fmt(r.metrics.normalized_procrustes) + ',' +
           fmt(r.metrics.prediction_error) + ',' +
           (r.metrics.purity ? fmt(*r.metrics.purity) : std::string()) + ',' +
           std::to_string(r.queries) + ',' +
           (r.converged ? "true" : "false") + ',' + sanitize(r.stop_reason) +
           ',' + sanitize(r.trace_file) + ',' + sanitize(r.message) + '\n';
  }
  return out;
}

std::string means_csv(const std::vector<RunRecord>& runs) {
  struct Cell {
    int count = 0;
    std::uint64_t m = 0;
    double seconds = 0.0, procrustes = 0.0, normalized = 0.0;
    double prediction = 0.0, purity = 0.0;
    int purity_count = 0;
  };
  std::map<std::tuple<std::string, int, double>, Cell> cells;
  for (const RunRecord& r : runs) {
    if (!r.ok) continue;
    Cell& cell = cells[{to_string(r.method), r.n, r.c}];
    ++cell.count;
    cell.m = r.m;
    cell.seconds += r.seconds;
    cell.procrustes += r.metrics.procrustes;
    cell.normalized += r.metrics.normalized_procrustes;
    cell.prediction += r.metrics.prediction_error;
    if (r.metrics.purity) {
      cell.purity += *r.metrics.purity;
      ++cell.purity_count;
    }
  }
  std::string out =
      "method,n,c,m,runs,mean_seconds,mean_procrustes,"
      "mean_normalized_procrustes,mean_prediction_error,mean_purity\n";
  for (const auto& [key, cell] : cells) {
    const auto& [method, n, c] = key;
    const double k = cell.count;
    out += method + ',' + std::to_string(n) + ',' + fmt(c) + ',' +
           std::to_string(cell.m) + ',' + std::to_string(cell.count) + ',' +
           fmt(cell.seconds / k) + ',' + fmt(cell.procrustes / k) + ',' +
           fmt(cell.normalized / k) + ',' + fmt(cell.prediction / k) + ',' +
           (cell.purity_count > 0 ? fmt(cell.purity / cell.purity_count)
                                  : std::string()) +
           '\n';
  }
  return out;
}

json report_json(const ExperimentConfig& cfg,
                 const std::vector<RunRecord>& runs) {
  json config_obj = json::object();
  for (const auto& [key, value] : config_items(cfg)) config_obj[key] = value;

  json report;
  report["version"] = kVersion;
  report["experiment"] = to_string(cfg.experiment);
  report["config"] = config_obj;  // values in config-file syntax, replayable
  report["solver"] = {
      {"mle", "full-batch Barzilai-Borwein ascent with Armijo backtracking, "
              "gradient-norm stop"},
      {"descent", "full-batch steepest descent, Armijo backtracking, step "
                  "doubling on acceptance"},
      {"descent_stopping", "relative loss improvement below "
                           "descent_loss_rtol for descent_patience "
                           "consecutive iterations"},
  };
  json run_array = json::array();
  for (const RunRecord& r : runs) {
    json row;
    row["method"] = to_string(r.method);
    row["seed"] = r.seed;
    row["n"] = r.n;
    row["d"] = r.d;
    row["landmarks"] = r.landmarks;
    row["c"] = r.c;
    row["m"] = r.m;
    row["epsilon"] = r.epsilon;
    row["ok"] = r.ok;
    if (!r.ok) row["message"] = r.message;
    row["seconds"] = r.seconds;
    row["procrustes"] = r.metrics.procrustes;
    row["normalized_procrustes"] = r.metrics.normalized_procrustes;
    row["prediction_error"] = r.metrics.prediction_error;
    if (r.metrics.purity) row["purity"] = *r.metrics.purity;
    row["queries"] = r.queries;
    row["converged"] = r.converged;
    row["stop_reason"] = r.stop_reason;
    if (!r.trace_file.empty()) row["trace_file"] = r.trace_file;
    run_array.push_back(std::move(row));
  }
  report["runs"] = std::move(run_array);
  return report;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  // Cells: the (n, c) grid this experiment sweeps.
  std::vector<std::pair<int, double>> cells;
  if (config.experiment == Experiment::scalability) {
    const std::vector<int> ns =
        config.n_sweep.empty() ? std::vector<int>{config.n} : config.n_sweep;
    for (int n : ns) cells.emplace_back(n, config.c);
  } else if (config.experiment == Experiment::consistency) {
    const std::vector<double> cs = config.c_sweep.empty()
                                       ? std::vector<double>{config.c}
                                       : config.c_sweep;
    for (double c : cs) cells.emplace_back(config.n, c);
  } else {
    cells.emplace_back(config.n, config.c);
  }

  std::vector<Method> methods = config.methods;
  if (methods.empty()) {
    if (config.experiment == Experiment::warmstart ||
        config.experiment == Experiment::clustering)
      methods = {Method::ste, Method::loe_ste};
    else
      methods = {Method::loe};
  }

  std::vector<RunSpec> specs;
  for (const auto& [n, c] : cells)
    for (const Method method : methods)
      for (const std::uint64_t seed : config.seeds)
        specs.push_back(RunSpec{method, n, c, seed});

  const std::string trace_dir = config.out + "/traces";
  fs::create_directories(trace_dir);

  std::vector<RunRecord> records(specs.size());
  std::atomic<std::size_t> cursor{0};
  const auto work = [&] {
    while (true) {
      const std::size_t idx = cursor.fetch_add(1);
      if (idx >= specs.size()) return;
      records[idx] = run_one(config, specs[idx], trace_dir);
    }
  };
  const int workers = std::max(
      1, std::min(config.workers, static_cast<int>(specs.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  ExperimentReport report;
  report.config = config;
  report.runs = std::move(records);
  for (const RunRecord& r : report.runs) report.all_ok = report.all_ok && r.ok;

  report.summary_file = config.out + "/summary.csv";
  report.means_file = config.out + "/means.csv";
  report.report_file = config.out + "/report.json";
  write_file_atomic(report.summary_file, summary_csv(config, report.runs));
  write_file_atomic(report.means_file, means_csv(report.runs));
  write_file_atomic(report.report_file,
                    report_json(config, report.runs).dump(2) + "\n");
  return report;
}

}  // namespace loe
