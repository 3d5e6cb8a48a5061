#include "divsched/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace divsched {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument("SimConfig: " + message);
}

}  // namespace

void SimConfig::validate() const {
  require(num_rsus >= 2, "N must be >= 2");
  require(num_channels >= 1, "M must be >= 1");
  require(num_channels < num_rsus, "M < N is required for a non-trivial schedule");
  require(coalition_size >= num_channels && coalition_size <= num_rsus,
          "K must satisfy M <= K <= N");
  require(slots_per_interval >= 1, "T must be >= 1");
  require(intervals >= 0, "intervals must be >= 0");
  require(num_classes >= 1, "C must be >= 1");
  require(feature_dim >= 1, "feature_dim must be >= 1");
  require(classes_per_rsu >= 1 && classes_per_rsu <= num_classes,
          "classes_per_rsu must lie in [1, C]");
  require(samples_per_rsu >= 0, "samples_per_rsu must be >= 0");
  require(major_fraction > 0.0 && major_fraction <= 1.0, "major_fraction must lie in (0, 1]");
  require(samples_per_packet >= 1, "samples_per_packet must be >= 1");
  require(test_samples_per_class >= 1, "test_samples_per_class must be >= 1");
  channel.validate();
  weights.validate();
  if (fixed_drop_rate) {
    require(static_cast<int>(fixed_drop_rate->size()) == num_rsus,
            "fixed_drop_rate must list one beta per RSU");
    for (double b : *fixed_drop_rate) require(b > 0.0 && b < 1.0, "fixed beta must lie in (0,1)");
  }
  if (fixed_delay_rate) {
    require(static_cast<int>(fixed_delay_rate->size()) == num_rsus,
            "fixed_delay_rate must list one lambda per RSU");
    for (double l : *fixed_delay_rate) require(l > 0.0, "fixed lambda must be positive");
  }
  require(static_cast<bool>(fixed_drop_rate) == static_cast<bool>(fixed_delay_rate),
          "fixed_drop_rate and fixed_delay_rate must be given together");
}

long long SimState::pending_packets() const {
  long long pending = 0;
  for (const auto& q : queues) pending += static_cast<long long>(q.size());
  return pending;
}

IntervalSnapshot SimState::snapshot(const SimConfig& config) const {
  IntervalSnapshot snap;
  snap.channel = channel;
  snap.accumulator = accumulator;
  snap.inventory_counts.reserve(inventories.size());
  for (const auto& inv : inventories) snap.inventory_counts.push_back(inv.counts());
  snap.channel_rate = config.channel.channel_rate;
  snap.num_channels = config.num_channels;
  return snap;
}

RealizationResult realize_transmissions(const ScheduleMatrix& schedule,
                                        const ChannelState& channel, const ChannelConfig& config,
                                        std::vector<std::deque<PendingPacket>>& queues,
                                        Rng& rng) {
  RealizationResult result;
  const int n = schedule.rows;
  result.attempts_per_rsu.assign(n, 0);
  result.delivered_per_rsu.assign(n, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int rsu = 0; rsu < n; ++rsu) {
    auto& queue = queues[rsu];
    if (schedule.row_targets[rsu] == 0 || queue.empty()) continue;
    const double beta = channel.drop_rate[rsu];
    const double lambda = channel.delay_rate[rsu];
    std::exponential_distribution<double> attempt_delay(lambda);

    for (int slot = 0; slot < schedule.slots && !queue.empty(); ++slot) {
      if (!schedule.at(rsu, slot)) continue;
      PendingPacket& packet = queue.front();
      ++packet.attempts;
      packet.delay += attempt_delay(rng) + config.fixed_tx_delay;
      ++result.attempts;
      ++result.attempts_per_rsu[rsu];
      if (unit(rng) >= beta) {
        PacketRecord record;
        record.rsu = rsu;
        record.attempts = packet.attempts;
        record.delay = packet.delay;
        record.class_label = packet.samples.empty() ? -1 : packet.samples.front().label;
        record.first_interval = packet.first_interval;
        result.delivered_records.push_back(record);
        for (auto& sample : packet.samples) {
          result.delivered_samples.push_back(std::move(sample));
        }
        queue.pop_front();
        ++result.delivered;
        ++result.delivered_per_rsu[rsu];
      }
    }
  }

  return result;
}

namespace {

// Round per-class stock so each RSU holds exactly samples_per_rsu samples.
std::vector<long long> per_class_stock(const SimConfig& config) {
  std::vector<long long> stock(config.classes_per_rsu, 0);
  if (config.classes_per_rsu == 1) {
    stock[0] = config.samples_per_rsu;
    return stock;
  }
  stock[0] = static_cast<long long>(std::llround(config.major_fraction * config.samples_per_rsu));
  const long long rest = config.samples_per_rsu - stock[0];
  const int others = config.classes_per_rsu - 1;
  for (int j = 1; j < config.classes_per_rsu; ++j) {
    stock[j] = rest / others + (j - 1 < rest % others ? 1 : 0);
  }
  return stock;
}

ChannelState fixed_channel_state(const SimConfig& config, int interval) {
  ChannelState state;
  state.drop_rate = *config.fixed_drop_rate;
  state.delay_rate = *config.fixed_delay_rate;
  state.interval = interval;
  return state;
}

std::vector<Sample> take_from_pool(std::vector<Sample>& pool, std::vector<size_t> indices) {
  std::sort(indices.begin(), indices.end());
  std::vector<Sample> taken;
  taken.reserve(indices.size());
  for (auto it = indices.rbegin(); it != indices.rend(); ++it) {
    taken.push_back(std::move(pool[*it]));
    pool.erase(pool.begin() + static_cast<long>(*it));
  }
  std::reverse(taken.begin(), taken.end());
  return taken;
}

// Balanced selection: global water-filling quota capped by each RSU's free
// packet slots, then min-margin (or cold-start random) picking inside each
// (RSU, class) pool.
std::vector<std::vector<Sample>> select_balanced(SimState& state, const SimConfig& config,
                                                 const std::vector<long long>& budgets,
                                                 Rng& rng) {
  const int n = config.num_rsus;
  std::vector<std::vector<double>> stock(n);
  std::vector<long long> caps(n);
  long long total_budget = 0;
  for (int i = 0; i < n; ++i) {
    stock[i] = state.inventories[i].counts();
    caps[i] = budgets[i] * config.samples_per_packet;
    total_budget += caps[i];
  }
  std::vector<double> global_counts(state.accumulator.delivered_counts.begin(),
                                    state.accumulator.delivered_counts.end());
  const auto quota = class_quota(stock, global_counts, total_budget, &caps);

  std::vector<std::vector<Sample>> picked(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < config.num_classes; ++j) {
      if (quota[i][j] == 0) continue;
      auto& pool = state.inventories[i].pools[j];
      auto indices = min_margin_select(pool, state.model, quota[i][j], rng);
      auto taken = take_from_pool(pool, std::move(indices));
      for (auto& sample : taken) picked[i].push_back(std::move(sample));
    }
  }
  return picked;
}

// Baseline selection: uniform draws from the RSU's pooled remaining samples,
// so classes are hit in proportion to their remaining stock.
std::vector<std::vector<Sample>> select_random(SimState& state, const SimConfig& config,
                                               const std::vector<long long>& budgets, Rng& rng) {
  const int n = config.num_rsus;
  std::vector<std::vector<Sample>> picked(n);
  for (int i = 0; i < n; ++i) {
    long long want = budgets[i] * config.samples_per_packet;
    auto& inventory = state.inventories[i];
    while (want > 0 && inventory.total() > 0) {
      std::uniform_int_distribution<long long> pick(0, inventory.total() - 1);
      long long offset = pick(rng);
      for (int j = 0; j < config.num_classes; ++j) {
        auto& pool = inventory.pools[j];
        const long long size = static_cast<long long>(pool.size());
        if (offset < size) {
          picked[i].push_back(std::move(pool[static_cast<size_t>(offset)]));
          pool.erase(pool.begin() + static_cast<long>(offset));
          break;
        }
        offset -= size;
      }
      --want;
    }
  }
  return picked;
}

}  // namespace

SimState init_state(const SimConfig& config) {
  config.validate();
  const std::uint64_t data_seed = config.data_seed ? config.data_seed : config.seed;
  SimState state;
  state.accumulator = AccumulatorState(config.num_classes);
  state.inventories.assign(config.num_rsus, RsuInventory(config.num_classes));
  state.queues.assign(config.num_rsus, {});
  state.model.num_classes = config.num_classes;
  state.model.dim = config.feature_dim;

  BlobSpec blobs{config.num_classes, config.feature_dim, config.blob_sigma,
                 config.blob_separation};

  if (!config.dataset_path.empty()) {
    auto samples = load_dataset_file(config.dataset_path, config.feature_dim);
    // External data: hold out a balanced test slice, then deal the rest
    // round-robin to the RSUs that hold each sample's class.
    std::vector<int> cursor(config.num_classes, 0);
    std::vector<int> held_out(config.num_classes, 0);
    std::vector<std::vector<int>> holders(config.num_classes);
    for (int i = 0; i < config.num_rsus; ++i) {
      for (int j = 0; j < config.classes_per_rsu; ++j) {
        holders[(static_cast<long long>(config.classes_per_rsu) * i + j) % config.num_classes]
            .push_back(i);
      }
    }
    for (auto& sample : samples) {
      if (sample.label < 0 || sample.label >= config.num_classes) {
        throw std::runtime_error("dataset label out of range: " + std::to_string(sample.label));
      }
      if (config.classifier_enabled && held_out[sample.label] < config.test_samples_per_class) {
        ++held_out[sample.label];
        state.test_set.push_back(std::move(sample));
        continue;
      }
      const auto& h = holders[sample.label];
      if (h.empty()) continue;
      const int rsu = h[cursor[sample.label]++ % h.size()];
      state.inventories[rsu].pools[sample.label].push_back(std::move(sample));
    }
  } else {
    Rng rng_data = make_rng(derive_seed(data_seed, 0xDA7A));
    const auto means = make_blob_means(blobs, rng_data);
    const auto stock = per_class_stock(config);
    long long next_id = 0;
    for (int i = 0; i < config.num_rsus; ++i) {
      for (int j = 0; j < config.classes_per_rsu; ++j) {
        const int label =
            static_cast<int>((static_cast<long long>(config.classes_per_rsu) * i + j) %
                             config.num_classes);
        for (long long s = 0; s < stock[j]; ++s) {
          state.inventories[i].pools[label].push_back(
              draw_blob_sample(blobs, means, label, next_id++, rng_data));
        }
      }
    }
    if (config.classifier_enabled) {
      Rng rng_test = make_rng(derive_seed(data_seed, 0x7E57));
      state.test_set = make_balanced_set(blobs, means, config.test_samples_per_class, rng_test);
    }
  }
  return state;
}

IntervalRecord step_interval(SimState& state, const SimConfig& config, const PolicySpec& policy,
                             Rng& rng) {
  const int t = state.interval;

  if (config.fixed_drop_rate) {
    state.channel = fixed_channel_state(config, t);
  } else if (t == 0 || config.redraw_channels_per_interval) {
    state.channel = sample_channel_conditions(rng, config.channel, config.num_rsus);
    state.channel.interval = t;
  } else {
    state.channel.interval = t;
  }

  const IntervalSnapshot snap = state.snapshot(config);
  const IntervalPlan plan = plan_interval(policy, snap, rng, config.limits);
  const ScheduleMatrix schedule =
      build_matrix(plan.alpha, config.slots_per_interval, config.num_channels, rng);

  // Pending packets occupy scheduled slots first; only the free remainder is
  // budgeted for fresh samples.
  std::vector<long long> budgets(config.num_rsus, 0);
  for (int i = 0; i < config.num_rsus; ++i) {
    budgets[i] = std::max<long long>(
        0, schedule.row_targets[i] - static_cast<long long>(state.queues[i].size()));
  }

  auto picked = policy.selection == SelectionMode::balanced_minmargin
                    ? select_balanced(state, config, budgets, rng)
                    : select_random(state, config, budgets, rng);
  for (int i = 0; i < config.num_rsus; ++i) {
    auto& samples = picked[i];
    for (size_t first = 0; first < samples.size(); first += config.samples_per_packet) {
      PendingPacket packet;
      packet.first_interval = t;
      const size_t last = std::min(samples.size(), first + config.samples_per_packet);
      for (size_t s = first; s < last; ++s) packet.samples.push_back(std::move(samples[s]));
      state.queues[i].push_back(std::move(packet));
      ++state.enqueued_packets;
    }
  }

  const RealizationResult realized =
      realize_transmissions(schedule, state.channel, config.channel, state.queues, rng);
  state.delivered_packets += realized.delivered;

  for (const auto& sample : realized.delivered_samples) {
    ++state.accumulator.delivered_counts[sample.label];
  }

  // Planner's expected ledger: each RSU adds inventory-count x throughput,
  // with inventories as seen at planning time.
  for (int i = 0; i < config.num_rsus; ++i) {
    if (plan.alpha[i] == 0.0) continue;
    const double zeta = plan.alpha[i] * config.channel.channel_rate *
                        (1.0 - state.channel.drop_rate[i]);
    for (int j = 0; j < config.num_classes; ++j) {
      state.accumulator.expected_counts[j] += snap.inventory_counts[i][j] * zeta;
    }
  }

  for (const auto& sample : realized.delivered_samples) {
    state.delivered_store.push_back(sample);
  }

  IntervalRecord record;
  record.interval = t;
  record.members = plan.members;
  record.alpha = plan.alpha;
  record.attempts = realized.attempts;
  record.delivered_packets = realized.delivered;
  record.attempts_per_rsu = realized.attempts_per_rsu;
  record.delivered_per_rsu = realized.delivered_per_rsu;
  record.goodput = static_cast<double>(realized.delivered) / config.slots_per_interval;
  if (!realized.delivered_records.empty()) {
    double sum = 0.0;
    for (const auto& r : realized.delivered_records) sum += r.delay;
    record.mean_delay = sum / static_cast<double>(realized.delivered_records.size());
  }
  record.class_counts = state.accumulator.delivered_counts;
  std::vector<double> counts_real(record.class_counts.begin(), record.class_counts.end());
  record.jain_delivered = jain_index(counts_real);
  record.delivered_total = state.delivered_packets;
  if (config.record_schedules) {
    record.schedule.reserve(config.num_rsus);
    for (int i = 0; i < config.num_rsus; ++i) {
      std::string row(config.slots_per_interval, '0');
      for (int s = 0; s < config.slots_per_interval; ++s) {
        if (schedule.at(i, s)) row[s] = '1';
      }
      record.schedule.push_back(std::move(row));
    }
  }

  if (config.classifier_enabled) {
    if (!state.delivered_store.empty()) {
      state.model = train_proxy_classifier(state.delivered_store, config.num_classes,
                                           config.feature_dim, config.classifier);
    }
    record.online_f1 = macro_f1(state.model, state.test_set);
  }

  state.interval = t + 1;
  state.accumulator.interval = state.interval;
  return record;
}

RunSummary run_simulation(const SimConfig& config, const PolicySpec& policy) {
  config.validate();
  policy.validate(config.num_rsus, config.num_channels);

  SimState state = init_state(config);
  Rng rng = make_rng(derive_seed(config.seed, 0x51u));

  RunSummary summary;
  summary.policy = policy_kind_name(policy.kind);
  summary.seed = config.seed;
  summary.records.reserve(config.intervals);
  for (int t = 0; t < config.intervals; ++t) {
    summary.records.push_back(step_interval(state, config, policy, rng));
  }
  summary.final_class_counts = state.accumulator.delivered_counts;
  long long total = 0;
  for (long long c : summary.final_class_counts) total += c;
  summary.total_delivered_samples = total;
  if (config.classifier_enabled) {
    summary.final_macro_f1 = config.intervals > 0 && !summary.records.empty()
                                 ? summary.records.back().online_f1
                                 : macro_f1(state.model, state.test_set);
  }
  return summary;
}

GridSearchResult grid_search_alpha(const IntervalSnapshot& snapshot, int steps,
                                   const PolicyWeights& weights) {
  const int n = snapshot.num_rsus();
  if (n > 4 || steps > 20 || steps < 1) {
    throw std::length_error(
        "grid_search_alpha: guarded to N <= 4 and steps <= 20 (grid grows as steps^N)");
  }
  weights.validate();

  GridSearchResult best;
  best.value = -std::numeric_limits<double>::infinity();

  std::vector<int> ticks(n, 0);
  std::vector<double> alpha(n, 0.0);
  for (;;) {
    double sum = 0.0;
    bool any = false;
    for (int i = 0; i < n; ++i) {
      alpha[i] = static_cast<double>(ticks[i]) / steps;
      sum += alpha[i];
      any = any || ticks[i] > 0;
    }
    if (any && sum <= snapshot.num_channels + 1e-9) {
      double value = 0.0;
      if (weights.delay > 0.0) value += weights.delay * delay_objective(alpha, snapshot.channel);
      if (weights.throughput > 0.0) {
        value += weights.throughput *
                 throughput_objective(alpha, snapshot.channel, snapshot.channel_rate);
      }
      if (weights.fairness > 0.0) {
        value += weights.fairness * fairness_objective(snapshot.accumulator, alpha,
                                                       snapshot.inventory_counts,
                                                       snapshot.channel, snapshot.channel_rate);
      }
      if (value > best.value) {
        best.value = value;
        best.alpha = alpha;
      }
    }
    int pos = n - 1;
    while (pos >= 0 && ticks[pos] == steps) {
      ticks[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++ticks[pos];
  }
  return best;
}

}  // namespace divsched
