#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "divsched/policies.hpp"
#include "divsched/sim_engine.hpp"

namespace divsched {

enum class SweepAxis { none, drop_rate_mean, intervals };

SweepAxis parse_sweep_axis(const std::string& name);
std::string sweep_axis_name(SweepAxis axis);

/// One policy row of the experiment grid, with its resolved spec.
struct PolicyEntry {
  std::string label;
  PolicySpec spec;
};

/// The full policy x seed x sweep grid an experiment executes.
struct ExperimentSpec {
  SimConfig base;
  std::vector<PolicyEntry> policies;
  std::vector<std::uint64_t> seeds;
  SweepAxis axis = SweepAxis::none;
  std::vector<double> sweep_values;  // single 0 entry when axis == none
  std::string output_dir = "out";

  void validate() const;
};

/// Parses and validates a JSON experiment config. Unknown keys are rejected
/// with the offending field name; invariant violations name the invariant.
ExperimentSpec load_config(const std::string& path);
ExperimentSpec parse_config_text(const std::string& text);

/// The SimConfig of one grid cell: sweep value applied and the run seed
/// derived from (base seed, policy index, seed index, sweep index) so adding
/// policies or seeds never perturbs other cells' streams.
SimConfig cell_config(const ExperimentSpec& spec, int policy_idx, int seed_idx, int sweep_idx);

struct CellResult {
  int policy_idx = 0;
  int seed_idx = 0;
  int sweep_idx = 0;
  RunSummary summary;
  bool failed = false;
  std::string error;
};

/// Executes the whole grid (cells run in an OpenMP worker pool; files are
/// written by a single writer afterwards): intervals.csv with one row per
/// (run, interval), one JSON summary per run, and summary.csv aggregating
/// mean/stddev across seeds per (policy, sweep value). Returns a process
/// exit status: 0 on success, 1 if any run failed (partial results are
/// still written).
int run_experiment(const ExperimentSpec& spec);

/// "%.6g" formatting used for every number the CSV writers emit.
std::string format_number(double value);

}  // namespace divsched
