// Command-line front end: train, simulate, sweep, validate.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "vecsim/errors.hpp"
#include "vecsim/experiment.hpp"
#include "vecsim/validate.hpp"

namespace fs = std::filesystem;
using namespace vecsim;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config_path, "JSON configuration file");
  if (config_required) opt->required();
  cmd->add_option("--seed", c.seed, "Root seed");
  cmd->add_option("--out", c.out_dir, "Output directory (overrides the config)");
}

SimConfig load(const Common& c) {
  SimConfig config = c.config_path.empty() ? SimConfig{} : load_config(c.config_path);
  if (!c.out_dir.empty()) config.out_dir = c.out_dir;
  config.validate();
  fs::create_directories(config.out_dir);
  return config;
}

std::string out_path(const SimConfig& config, const std::string& name) {
  return (fs::path(config.out_dir) / name).string();
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_train(const Common& c) {
  SimConfig config = load(c);
  // Training draws from the environment seed.
  if (c.seed) config.env_seed = *c.seed;
  const Environment env = build_environment(config);
  const std::string model = config.model_path.empty() ? out_path(config, "model.json")
                                                      : config.model_path;
  TrainResult result = train_cpp(config, env, [&](const CurveRow& row) {
    if ((row.epoch + 1) % 100 == 0) {
      std::fprintf(stderr, "epoch %d  epsilon %.3f  return %.4f\n", row.epoch + 1, row.epsilon,
                   row.mean_return);
    }
  });
  save_model(model, result.params, config);
  write_training_curve(out_path(config, "training_curve.csv"), result.curve,
                       config.fingerprint_hex());
  std::printf("model %s (%ld updates)\n", model.c_str(), result.train_steps);
  return 0;
}

std::optional<PositionTrace> maybe_trace(const SimConfig& config) {
  if (config.trace_path.empty()) return std::nullopt;
  return load_trace(config.trace_path);
}

int cmd_simulate(const Common& c, const std::string& model_arg) {
  SimConfig config = load(c);
  if (c.seed) config.seeds = {*c.seed};
  const Environment env = build_environment(config);
  std::optional<CppPolicy> cpp;
  if (config.policy == Policy::Cpp) {
    const std::string model = !model_arg.empty() ? model_arg : config.model_path;
    if (model.empty()) throw ConfigError("policy cpp needs --model or model_path in the config");
    cpp.emplace(load_model(model, config), config);
  }
  const auto trace = maybe_trace(config);
  const std::string tag = to_string(config.policy) + "_" + to_string(config.rat);
  std::vector<SummaryRow> rows;
  for (std::uint64_t seed : config.seeds) {
    const EpisodeResult r =
        run_episode(config, env, seed, cpp ? &*cpp : nullptr, trace ? &*trace : nullptr);
    const std::string suffix = tag + "_seed" + std::to_string(seed) + ".csv";
    write_slot_metrics(out_path(config, "slots_" + suffix), r.slots, config.fingerprint_hex());
    write_placements(out_path(config, "placements_" + suffix), r.placements,
                     config.fingerprint_hex());
    rows.push_back(summarize(config, seed, r.summary));
  }
  write_summary(out_path(config, "summary.csv"), rows, config.fingerprint_hex());
  for (const auto& row : rows) {
    std::printf("seed %llu  chr %.4f  violations %.2f%%\n",
                static_cast<unsigned long long>(row.seed), row.summary.chr.value_or(0.0),
                row.summary.violation_pct.value_or(0.0));
  }
  return 0;
}

struct SweepArgs {
  std::string axis;
  std::string values;
  std::string policies = "cpp,genie,rcr,kpop,klru";
  std::string rats = "user-centric,nc-rat";
  std::string model_dir;
};

int cmd_sweep(const Common& c, const SweepArgs& a) {
  SimConfig config = load(c);
  if (c.seed) config.seeds = {*c.seed};
  SweepSpec spec;
  spec.axis = parse_axis(a.axis);
  for (const auto& v : split(a.values)) {
    double x = 0.0;
    try {
      x = std::stod(v);
    } catch (const std::exception&) {
      throw ConfigError("sweep value '" + v + "' is not a number");
    }
    // Content sizes are given in KB on the command line.
    spec.values.push_back(spec.axis == SweepAxis::ContentSize ? x * kBitsPerKb : x);
  }
  for (const auto& p : split(a.policies)) spec.policies.push_back(parse_policy(p));
  for (const auto& r : split(a.rats)) spec.rats.push_back(parse_rat(r));
  spec.seeds = config.seeds;
  ModelStore models(a.model_dir.empty() ? out_path(config, "models") : a.model_dir);
  const auto rows = run_sweep(config, spec, &models);
  const std::string path = out_path(config, "sweep_" + to_string(spec.axis) + ".csv");
  write_summary(path, rows, config.fingerprint_hex());
  std::printf("%zu rows -> %s\n", rows.size(), path.c_str());
  return 0;
}

int cmd_validate() {
  bool ok = true;
  for (const auto& r : run_all_suites()) {
    std::puts(format_suite(r).c_str());
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicular edge caching and user-centric RAT simulator"};
  app.require_subcommand(1);

  Common train_opts, sim_opts, sweep_opts, validate_opts;
  std::string model_arg;
  SweepArgs sweep_args;

  auto* train = app.add_subcommand("train", "Learn the cache placement network");
  add_common(train, train_opts, true);

  auto* sim = app.add_subcommand("simulate", "Run seeded episodes and write CSVs");
  add_common(sim, sim_opts, true);
  sim->add_option("--model", model_arg, "Trained model for policy cpp");

  auto* sweep = app.add_subcommand("sweep", "Cross product over one axis, policies, RATs, seeds");
  add_common(sweep, sweep_opts, true);
  sweep->add_option("--axis", sweep_args.axis, "cache_size | content_size | num_cvs")->required();
  sweep->add_option("--values", sweep_args.values, "Comma-separated axis values")->required();
  sweep->add_option("--policies", sweep_args.policies, "Comma-separated policies");
  sweep->add_option("--rats", sweep_args.rats, "Comma-separated RATs");
  sweep->add_option("--models", sweep_args.model_dir, "Directory of cached trained models");

  auto* validate = app.add_subcommand("validate", "Run the oracle suites");
  add_common(validate, validate_opts, false);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) return cmd_train(train_opts);
    if (*sim) return cmd_simulate(sim_opts, model_arg);
    if (*sweep) return cmd_sweep(sweep_opts, sweep_args);
    if (*validate) return cmd_validate();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
