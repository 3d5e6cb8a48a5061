#include "divsched/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace divsched {

using ordered_json = nlohmann::ordered_json;

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "none") return SweepAxis::none;
  if (name == "drop_rate_mean") return SweepAxis::drop_rate_mean;
  if (name == "intervals") return SweepAxis::intervals;
  throw std::invalid_argument("sweep.axis: unknown axis '" + name +
                              "' (expected none|drop_rate_mean|intervals)");
}

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::none: return "none";
    case SweepAxis::drop_rate_mean: return "drop_rate_mean";
    case SweepAxis::intervals: return "intervals";
  }
  return "none";
}

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

namespace {

void check_keys(const ordered_json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw std::invalid_argument("config: unknown field '" + it.key() + "' in " + where);
    }
  }
}

PolicyWeights parse_weights(const ordered_json& j, const std::string& where) {
  check_keys(j, where, {"delay", "throughput", "fairness"});
  PolicyWeights w;
  w.delay = j.value("delay", w.delay);
  w.throughput = j.value("throughput", w.throughput);
  w.fairness = j.value("fairness", w.fairness);
  return w;
}

SimConfig parse_sim(const ordered_json& j) {
  SimConfig c;
  check_keys(j, "sim",
             {"num_rsus", "num_channels", "coalition_size", "slots_per_interval", "intervals",
              "num_classes", "feature_dim", "seed", "channel", "weights", "classes_per_rsu",
              "samples_per_rsu", "major_fraction", "blob_sigma", "blob_separation",
              "test_samples_per_class", "dataset", "samples_per_packet",
              "redraw_channels_per_interval", "fixed_beta", "fixed_lambda",
              "enumeration_limit", "exact_shapley_limit", "classifier", "record_schedules"});
  c.num_rsus = j.value("num_rsus", c.num_rsus);
  c.num_channels = j.value("num_channels", c.num_channels);
  c.coalition_size = j.value("coalition_size", c.coalition_size);
  c.slots_per_interval = j.value("slots_per_interval", c.slots_per_interval);
  c.intervals = j.value("intervals", c.intervals);
  c.num_classes = j.value("num_classes", c.num_classes);
  c.feature_dim = j.value("feature_dim", c.feature_dim);
  c.seed = j.value("seed", c.seed);
  if (j.contains("channel")) {
    const auto& ch = j.at("channel");
    check_keys(ch, "sim.channel",
               {"beta_shape_a", "beta_shape_b", "gamma_shape", "gamma_scale", "channel_rate",
                "fixed_tx_delay", "packet_length_bits", "bandwidth_hz"});
    c.channel.beta_shape_a = ch.value("beta_shape_a", c.channel.beta_shape_a);
    c.channel.beta_shape_b = ch.value("beta_shape_b", c.channel.beta_shape_b);
    c.channel.gamma_shape = ch.value("gamma_shape", c.channel.gamma_shape);
    c.channel.gamma_scale = ch.value("gamma_scale", c.channel.gamma_scale);
    c.channel.channel_rate = ch.value("channel_rate", c.channel.channel_rate);
    c.channel.fixed_tx_delay = ch.value("fixed_tx_delay", c.channel.fixed_tx_delay);
    c.channel.packet_length_bits = ch.value("packet_length_bits", c.channel.packet_length_bits);
    c.channel.bandwidth_hz = ch.value("bandwidth_hz", c.channel.bandwidth_hz);
  }
  if (j.contains("weights")) c.weights = parse_weights(j.at("weights"), "sim.weights");
  c.classes_per_rsu = j.value("classes_per_rsu", c.classes_per_rsu);
  c.samples_per_rsu = j.value("samples_per_rsu", c.samples_per_rsu);
  c.major_fraction = j.value("major_fraction", c.major_fraction);
  c.blob_sigma = j.value("blob_sigma", c.blob_sigma);
  c.blob_separation = j.value("blob_separation", c.blob_separation);
  c.test_samples_per_class = j.value("test_samples_per_class", c.test_samples_per_class);
  c.dataset_path = j.value("dataset", c.dataset_path);
  c.samples_per_packet = j.value("samples_per_packet", c.samples_per_packet);
  c.redraw_channels_per_interval =
      j.value("redraw_channels_per_interval", c.redraw_channels_per_interval);
  if (j.contains("fixed_beta")) {
    c.fixed_drop_rate = j.at("fixed_beta").get<std::vector<double>>();
  }
  if (j.contains("fixed_lambda")) {
    c.fixed_delay_rate = j.at("fixed_lambda").get<std::vector<double>>();
  }
  c.limits.enumeration_limit = j.value("enumeration_limit", c.limits.enumeration_limit);
  c.limits.exact_shapley_limit = j.value("exact_shapley_limit", c.limits.exact_shapley_limit);
  if (j.contains("classifier")) {
    const auto& cl = j.at("classifier");
    check_keys(cl, "sim.classifier", {"learning_rate", "epochs", "enabled"});
    c.classifier.learning_rate = cl.value("learning_rate", c.classifier.learning_rate);
    c.classifier.epochs = cl.value("epochs", c.classifier.epochs);
    c.classifier_enabled = cl.value("enabled", c.classifier_enabled);
  }
  c.record_schedules = j.value("record_schedules", c.record_schedules);
  return c;
}

SelectionMode parse_selection(const std::string& name) {
  if (name == "balanced" || name == "balanced_minmargin") return SelectionMode::balanced_minmargin;
  if (name == "random" || name == "random_pool") return SelectionMode::random_pool;
  throw std::invalid_argument("policy.selection: unknown mode '" + name +
                              "' (expected balanced|random)");
}

PolicyEntry parse_policy(const ordered_json& j, const SimConfig& base) {
  PolicyEntry entry;
  std::string kind_name;
  if (j.is_string()) {
    kind_name = j.get<std::string>();
  } else if (j.is_object()) {
    check_keys(j, "policies[]", {"kind", "label", "coalition_size", "weights", "selection"});
    kind_name = j.at("kind").get<std::string>();
  } else {
    throw std::invalid_argument("policies[]: each entry must be a string or an object");
  }

  entry.spec.kind = parse_policy_kind(kind_name);
  entry.spec.coalition_size = base.coalition_size;
  entry.spec.weights = base.weights;
  if (entry.spec.kind == PolicyKind::optimized_nofair) entry.spec.weights.fairness = 0.0;
  entry.spec.selection = default_selection_mode(entry.spec.kind);
  entry.label = policy_kind_name(entry.spec.kind);

  if (j.is_object()) {
    entry.label = j.value("label", entry.label);
    entry.spec.coalition_size = j.value("coalition_size", entry.spec.coalition_size);
    if (j.contains("weights")) {
      entry.spec.weights = parse_weights(j.at("weights"), "policy.weights");
    }
    if (j.contains("selection")) {
      entry.spec.selection = parse_selection(j.at("selection").get<std::string>());
    }
  }
  return entry;
}

}  // namespace

void ExperimentSpec::validate() const {
  base.validate();
  if (policies.empty()) {
    throw std::invalid_argument("config: at least one policy is required");
  }
  if (seeds.empty()) {
    throw std::invalid_argument("config: at least one seed is required");
  }
  std::set<std::string> labels;
  for (const auto& p : policies) {
    p.spec.validate(base.num_rsus, base.num_channels);
    if (!labels.insert(p.label).second) {
      throw std::invalid_argument("config: duplicate policy label '" + p.label +
                                  "' (set distinct 'label' fields)");
    }
  }
  if (axis == SweepAxis::none) {
    if (sweep_values.size() != 1) {
      throw std::invalid_argument("config: sweep axis 'none' expects no values");
    }
  } else if (sweep_values.empty()) {
    throw std::invalid_argument("config: sweep needs at least one value");
  }
  for (double v : sweep_values) {
    if (axis == SweepAxis::drop_rate_mean && !(v > 0.0 && v < 1.0)) {
      throw std::invalid_argument("config: drop_rate_mean sweep values must lie in (0, 1)");
    }
    if (axis == SweepAxis::intervals && (v < 0.0 || v != std::floor(v))) {
      throw std::invalid_argument("config: intervals sweep values must be nonnegative integers");
    }
  }
  if (axis == SweepAxis::drop_rate_mean && base.fixed_drop_rate) {
    throw std::invalid_argument(
        "config: drop_rate_mean sweep requires distribution-drawn channels, not fixed_beta");
  }
}

ExperimentSpec parse_config_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }

  try {
    check_keys(j, "top level", {"sim", "policies", "seeds", "sweep", "output_dir"});

    ExperimentSpec spec;
    spec.base = j.contains("sim") ? parse_sim(j.at("sim")) : SimConfig{};

    if (j.contains("policies")) {
      for (const auto& p : j.at("policies")) {
        spec.policies.push_back(parse_policy(p, spec.base));
      }
    } else {
      spec.policies.push_back(parse_policy(ordered_json("fair"), spec.base));
    }

    if (j.contains("seeds")) {
      spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    } else {
      spec.seeds = {spec.base.seed};
    }

    if (j.contains("sweep")) {
      const auto& sweep = j.at("sweep");
      check_keys(sweep, "sweep", {"axis", "values"});
      spec.axis = parse_sweep_axis(sweep.value("axis", std::string("none")));
      if (sweep.contains("values")) {
        spec.sweep_values = sweep.at("values").get<std::vector<double>>();
      }
    }
    if (spec.axis == SweepAxis::none && spec.sweep_values.empty()) spec.sweep_values = {0.0};

    spec.output_dir = j.value("output_dir", spec.output_dir);
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

SimConfig cell_config(const ExperimentSpec& spec, int policy_idx, int seed_idx, int sweep_idx) {
  SimConfig config = spec.base;
  const double value = spec.sweep_values[sweep_idx];
  switch (spec.axis) {
    case SweepAxis::none: break;
    case SweepAxis::drop_rate_mean: {
      // Re-target the Beta mean while keeping the concentration a + b.
      const double concentration = config.channel.beta_shape_a + config.channel.beta_shape_b;
      config.channel.beta_shape_a = value * concentration;
      config.channel.beta_shape_b = (1.0 - value) * concentration;
      break;
    }
    case SweepAxis::intervals:
      config.intervals = static_cast<int>(std::llround(value));
      break;
  }

  const std::uint64_t seed_label = spec.seeds[seed_idx];
  std::uint64_t shared = derive_seed(spec.base.seed, seed_label);
  shared = derive_seed(shared, 0xB000u + static_cast<std::uint64_t>(sweep_idx));
  config.data_seed = shared;  // identical datasets across policies per (seed, sweep)
  config.seed = derive_seed(shared, 0xC000u + static_cast<std::uint64_t>(policy_idx));
  return config;
}

namespace {

ordered_json summary_to_json(const RunSummary& run, const std::string& label,
                             std::uint64_t seed_label, double sweep_value) {
  ordered_json j;
  j["policy"] = label;
  j["seed"] = seed_label;
  j["sweep_value"] = sweep_value;
  j["run_seed"] = run.seed;
  j["final_macro_f1"] = run.final_macro_f1;
  j["total_delivered_samples"] = run.total_delivered_samples;
  j["final_class_counts"] = run.final_class_counts;
  ordered_json records = ordered_json::array();
  for (const auto& r : run.records) {
    ordered_json rec;
    rec["interval"] = r.interval;
    rec["members"] = r.members;
    rec["alpha"] = r.alpha;
    rec["attempts"] = r.attempts;
    rec["delivered_packets"] = r.delivered_packets;
    rec["mean_delay"] = r.mean_delay;
    rec["goodput"] = r.goodput;
    rec["jain_delivered"] = r.jain_delivered;
    rec["class_counts"] = r.class_counts;
    rec["attempts_per_rsu"] = r.attempts_per_rsu;
    rec["delivered_per_rsu"] = r.delivered_per_rsu;
    rec["delivered_total"] = r.delivered_total;
    rec["online_f1"] = r.online_f1;
    if (!r.schedule.empty()) rec["schedule"] = r.schedule;
    records.push_back(std::move(rec));
  }
  j["intervals"] = std::move(records);
  return j;
}

struct RunScalars {
  double goodput = 0.0;
  double mean_delay = 0.0;
  double jain = 0.0;
  double f1 = 0.0;
};

RunScalars run_scalars(const RunSummary& run) {
  RunScalars s;
  double goodput_sum = 0.0;
  double delay_weighted = 0.0;
  long long delivered = 0;
  for (const auto& r : run.records) {
    goodput_sum += r.goodput;
    delay_weighted += r.mean_delay * static_cast<double>(r.delivered_packets);
    delivered += r.delivered_packets;
  }
  if (!run.records.empty()) {
    s.goodput = goodput_sum / static_cast<double>(run.records.size());
    s.jain = run.records.back().jain_delivered;
  }
  if (delivered > 0) s.mean_delay = delay_weighted / static_cast<double>(delivered);
  s.f1 = run.final_macro_f1;
  return s;
}

}  // namespace

int run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const int num_policies = static_cast<int>(spec.policies.size());
  const int num_seeds = static_cast<int>(spec.seeds.size());
  const int num_sweeps = static_cast<int>(spec.sweep_values.size());
  const int num_cells = num_policies * num_seeds * num_sweeps;

  std::vector<CellResult> cells(num_cells);

#pragma omp parallel for schedule(dynamic)
  for (int cell = 0; cell < num_cells; ++cell) {
    const int policy_idx = cell / (num_seeds * num_sweeps);
    const int seed_idx = (cell / num_sweeps) % num_seeds;
    const int sweep_idx = cell % num_sweeps;
    CellResult& result = cells[cell];
    result.policy_idx = policy_idx;
    result.seed_idx = seed_idx;
    result.sweep_idx = sweep_idx;
    try {
      const SimConfig config = cell_config(spec, policy_idx, seed_idx, sweep_idx);
      result.summary = run_simulation(config, spec.policies[policy_idx].spec);
    } catch (const std::exception& e) {
      result.failed = true;
      result.error = e.what();
    }
  }

  namespace fs = std::filesystem;
  fs::create_directories(spec.output_dir);

  // intervals.csv: one row per (run, interval), grid order.
  {
    std::ofstream csv(fs::path(spec.output_dir) / "intervals.csv");
    csv << "run_id,policy,seed,sweep_value,interval,delay_mean,goodput,jain_delivered,"
           "delivered_total,f1_online\n";
    for (const auto& cell : cells) {
      if (cell.failed) continue;
      const auto& label = spec.policies[cell.policy_idx].label;
      const auto seed_label = spec.seeds[cell.seed_idx];
      const double sweep_value = spec.sweep_values[cell.sweep_idx];
      const std::string run_id =
          label + "-v" + std::to_string(cell.sweep_idx) + "-s" + std::to_string(seed_label);
      for (const auto& r : cell.summary.records) {
        csv << run_id << ',' << label << ',' << seed_label << ',' << format_number(sweep_value)
            << ',' << r.interval << ',' << format_number(r.mean_delay) << ','
            << format_number(r.goodput) << ',' << format_number(r.jain_delivered) << ','
            << r.delivered_total << ',' << format_number(r.online_f1) << '\n';
      }
    }
  }

  // Per-run JSON summaries.
  for (const auto& cell : cells) {
    if (cell.failed) continue;
    const auto& label = spec.policies[cell.policy_idx].label;
    const auto seed_label = spec.seeds[cell.seed_idx];
    const std::string name = "run_" + label + "_v" + std::to_string(cell.sweep_idx) + "_s" +
                             std::to_string(seed_label) + ".json";
    std::ofstream out(fs::path(spec.output_dir) / name);
    out << summary_to_json(cell.summary, label, seed_label, spec.sweep_values[cell.sweep_idx])
               .dump(2)
        << '\n';
  }

  // summary.csv: mean and sample stddev across seeds per (policy, sweep value).
  {
    std::ofstream csv(fs::path(spec.output_dir) / "summary.csv");
    csv << "policy,sweep_value,runs,goodput_mean,goodput_std,delay_mean,delay_std,"
           "jain_mean,jain_std,f1_mean,f1_std\n";
    for (int p = 0; p < num_policies; ++p) {
      for (int w = 0; w < num_sweeps; ++w) {
        std::vector<RunScalars> scalars;
        for (int s = 0; s < num_seeds; ++s) {
          const auto& cell = cells[(p * num_seeds + s) * num_sweeps + w];
          if (!cell.failed) scalars.push_back(run_scalars(cell.summary));
        }
        if (scalars.empty()) continue;
        auto stat = [&](auto field) {
          double mean = 0.0;
          for (const auto& v : scalars) mean += field(v);
          mean /= static_cast<double>(scalars.size());
          double var = 0.0;
          for (const auto& v : scalars) {
            const double d = field(v) - mean;
            var += d * d;
          }
          var = scalars.size() > 1 ? var / static_cast<double>(scalars.size() - 1) : 0.0;
          return std::pair<double, double>(mean, std::sqrt(var));
        };
        const auto goodput = stat([](const RunScalars& v) { return v.goodput; });
        const auto delay = stat([](const RunScalars& v) { return v.mean_delay; });
        const auto jain = stat([](const RunScalars& v) { return v.jain; });
        const auto f1 = stat([](const RunScalars& v) { return v.f1; });
        csv << spec.policies[p].label << ',' << format_number(spec.sweep_values[w]) << ','
            << scalars.size() << ',' << format_number(goodput.first) << ','
            << format_number(goodput.second) << ',' << format_number(delay.first) << ','
            << format_number(delay.second) << ',' << format_number(jain.first) << ','
            << format_number(jain.second) << ',' << format_number(f1.first) << ','
            << format_number(f1.second) << '\n';
      }
    }
  }

  int status = 0;
  for (const auto& cell : cells) {
    if (cell.failed) {
      std::fprintf(stderr, "run failed (%s, seed %llu, sweep %d): %s\n",
                   spec.policies[cell.policy_idx].label.c_str(),
                   static_cast<unsigned long long>(spec.seeds[cell.seed_idx]), cell.sweep_idx,
                   cell.error.c_str());
      status = 1;
    }
  }
  return status;
}

}  // namespace divsched
