#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "divsched/experiment.hpp"
#include "divsched/sim_engine.hpp"

namespace {

constexpr const char* kVersion = "divsched 0.1.0";

using divsched::ExperimentSpec;
using ordered_json = nlohmann::ordered_json;

/// Snapshot of interval 0 under the config's seed, used by the oracle
/// subcommands.
divsched::IntervalSnapshot snapshot_from_spec(const ExperimentSpec& spec) {
  const divsched::SimConfig& config = spec.base;
  divsched::SimState state = divsched::init_state(config);
  divsched::Rng rng = divsched::make_rng(divsched::derive_seed(config.seed, 0x51u));
  if (config.fixed_drop_rate) {
    state.channel.drop_rate = *config.fixed_drop_rate;
    state.channel.delay_rate = *config.fixed_delay_rate;
  } else {
    state.channel = divsched::sample_channel_conditions(rng, config.channel, config.num_rsus);
  }
  return state.snapshot(config);
}

int run_simulate(ExperimentSpec spec, const std::vector<std::string>& policies,
                 const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
                 const std::string& dataset, bool dump_schedule) {
  if (!policies.empty()) {
    spec.policies.clear();
    for (const auto& name : policies) {
      divsched::PolicyEntry entry;
      entry.spec.kind = divsched::parse_policy_kind(name);
      entry.spec.coalition_size = spec.base.coalition_size;
      entry.spec.weights = spec.base.weights;
      if (entry.spec.kind == divsched::PolicyKind::optimized_nofair) {
        entry.spec.weights.fairness = 0.0;
      }
      entry.spec.selection = divsched::default_selection_mode(entry.spec.kind);
      entry.label = divsched::policy_kind_name(entry.spec.kind);
      spec.policies.push_back(std::move(entry));
    }
  }
  if (!seeds.empty()) spec.seeds = seeds;
  if (!out_dir.empty()) spec.output_dir = out_dir;
  if (!dataset.empty()) spec.base.dataset_path = dataset;
  if (dump_schedule) spec.base.record_schedules = true;
  spec.validate();
  return divsched::run_experiment(spec);
}

int run_oracle_coalition(const ExperimentSpec& spec) {
  const auto snapshot = snapshot_from_spec(spec);
  const int k = spec.base.coalition_size;
  const auto exact = divsched::enumerate_best_coalition_full(snapshot, k, spec.base.weights,
                                                             spec.base.limits);
  const auto greedy = divsched::greedy_coalition(snapshot, k, spec.base.weights, spec.base.limits);
  const auto greedy_in_frame =
      divsched::coalition_value(greedy.members, snapshot, spec.base.weights, exact.norm);

  ordered_json j;
  j["candidates"] = exact.candidates;
  j["exact"] = {{"members", exact.best.members}, {"value", exact.best.value}};
  j["greedy"] = {{"members", greedy.members}, {"value_in_exact_frame", greedy_in_frame.value}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

int run_oracle_grid(const ExperimentSpec& spec, int steps) {
  const auto snapshot = snapshot_from_spec(spec);
  const auto grid = divsched::grid_search_alpha(snapshot, steps, spec.base.weights);
  const auto coalition = divsched::enumerate_best_coalition(snapshot, spec.base.coalition_size,
                                                            spec.base.weights, spec.base.limits);
  // Raw objective of the chosen coalition's equal-split alpha, comparable to
  // the grid value.
  std::vector<double> alpha(snapshot.num_rsus(), 0.0);
  for (int i : coalition.members) {
    alpha[i] = static_cast<double>(snapshot.num_channels) / coalition.members.size();
  }
  double coalition_raw = 0.0;
  const auto& w = spec.base.weights;
  if (w.delay > 0.0) coalition_raw += w.delay * divsched::delay_objective(alpha, snapshot.channel);
  if (w.throughput > 0.0) {
    coalition_raw += w.throughput * divsched::throughput_objective(alpha, snapshot.channel,
                                                                   snapshot.channel_rate);
  }
  if (w.fairness > 0.0) {
    coalition_raw += w.fairness *
                     divsched::fairness_objective(snapshot.accumulator, alpha,
                                                  snapshot.inventory_counts, snapshot.channel,
                                                  snapshot.channel_rate);
  }

  ordered_json j;
  j["grid"] = {{"alpha", grid.alpha}, {"value", grid.value}};
  j["equal_split_coalition"] = {{"members", coalition.members}, {"raw_value", coalition_raw}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

int run_oracle_shapley(const ExperimentSpec& spec, const std::string& mode, int samples) {
  const auto snapshot = snapshot_from_spec(spec);
  divsched::ShapleyResult result;
  if (mode == "exact") {
    result = divsched::shapley_ranking(snapshot, spec.base.weights, divsched::ShapleyMode::exact,
                                       spec.base.limits);
  } else if (mode == "sampled") {
    divsched::Rng rng = divsched::make_rng(divsched::derive_seed(spec.base.seed, 0x5A3Bu));
    result = divsched::shapley_ranking(snapshot, spec.base.weights, divsched::ShapleyMode::sampled,
                                       spec.base.limits, samples, &rng);
  } else {
    throw std::invalid_argument("oracle shapley: mode must be exact or sampled");
  }

  ordered_json j;
  j["mode"] = mode;
  if (mode == "sampled") j["samples"] = result.samples;
  j["phi"] = result.phi;
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded RSU-to-server data-aggregation scheduling simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> policies;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::string dataset;
  bool dump_schedule = false;

  auto* simulate = app.add_subcommand("simulate", "Run the configured experiment grid");
  simulate->add_option("--config", config_path, "Experiment config (JSON)")->required();
  simulate->add_option("--policy", policies,
                       "Policy override: fair|nofair|uniform|random|delaymin (repeatable)");
  simulate->add_option("--seed", seeds, "Seed override (repeatable)");
  simulate->add_option("--out", out_dir, "Output directory override");
  simulate->add_option("--dataset", dataset,
                       "Labeled feature file (rows: feature_dim floats + integer label) "
                       "replacing the synthetic blobs");
  simulate->add_flag("--dump-schedule", dump_schedule,
                     "Include each interval's 0/1 schedule grid in the run JSON");

  auto* oracle = app.add_subcommand("oracle", "Validation oracles on the config's first interval");
  oracle->require_subcommand(1);
  std::string oracle_config;
  int grid_steps = 10;
  std::string shapley_mode = "exact";
  int shapley_samples = 10'000;

  auto* oc = oracle->add_subcommand("coalition", "Exact enumeration vs greedy coalition");
  oc->add_option("--config", oracle_config, "Experiment config (JSON)")->required();
  auto* og = oracle->add_subcommand("grid", "Alpha grid search vs equal-split coalition");
  og->add_option("--config", oracle_config, "Experiment config (JSON)")->required();
  og->add_option("--steps", grid_steps, "Grid steps per dimension");
  auto* os = oracle->add_subcommand("shapley", "Shapley ranking of the RSUs");
  os->add_option("--config", oracle_config, "Experiment config (JSON)")->required();
  os->add_option("--mode", shapley_mode, "exact or sampled");
  os->add_option("--samples", shapley_samples, "Permutations in sampled mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      return run_simulate(divsched::load_config(config_path), policies, seeds, out_dir, dataset,
                          dump_schedule);
    }
    const ExperimentSpec spec = divsched::load_config(oracle_config);
    if (oc->parsed()) return run_oracle_coalition(spec);
    if (og->parsed()) return run_oracle_grid(spec, grid_steps);
    if (os->parsed()) return run_oracle_shapley(spec, shapley_mode, shapley_samples);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
