#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "divsched/channel.hpp"
#include "divsched/coalition.hpp"
#include "divsched/dataset.hpp"
#include "divsched/metrics.hpp"
#include "divsched/policies.hpp"
#include "divsched/sample_select.hpp"
#include "divsched/schedule_matrix.hpp"

namespace divsched {

/// Full configuration of one simulation run.
struct SimConfig {
  int num_rsus = 10;             // N
  int num_channels = 5;          // M, must stay below N
  int coalition_size = 5;        // K
  int slots_per_interval = 100;  // T
  int intervals = 10;
  int num_classes = 10;          // C
  int feature_dim = 8;           // d
  std::uint64_t seed = 1;
  std::uint64_t data_seed = 0;  // 0: reuse seed. Kept separate so compared
                                // policies can share one dataset realization.

  ChannelConfig channel;
  PolicyWeights weights;  // weights of the optimized policies

  // Data partition: RSU i holds classes_per_rsu consecutive classes starting
  // at (classes_per_rsu * i) mod C; the first held class receives
  // major_fraction of the RSU's samples, the rest split the remainder.
  int classes_per_rsu = 2;
  long long samples_per_rsu = 1000;
  double major_fraction = 0.5;

  double blob_sigma = 1.0;
  double blob_separation = 4.0;
  int test_samples_per_class = 50;
  std::string dataset_path;  // optional: external samples instead of blobs

  int samples_per_packet = 1;
  bool redraw_channels_per_interval = true;
  std::optional<std::vector<double>> fixed_drop_rate;   // pins beta_i per RSU
  std::optional<std::vector<double>> fixed_delay_rate;  // pins lambda_i per RSU

  CoalitionLimits limits;
  ClassifierHyper classifier;
  bool classifier_enabled = true;
  bool record_schedules = false;  // keep each interval's 0/1 grid in the record

  void validate() const;  // throws std::invalid_argument naming the field
};

/// A packet waiting in an RSU's FCFS queue. Retransmissions keep the same
/// payload; attempts and delay accumulate until the packet gets through.
struct PendingPacket {
  std::vector<Sample> samples;
  int attempts = 0;
  double delay = 0.0;
  int first_interval = 0;
};

/// What one interval's slot walk produced.
struct RealizationResult {
  long long attempts = 0;
  long long delivered = 0;
  std::vector<PacketRecord> delivered_records;
  std::vector<Sample> delivered_samples;
  std::vector<long long> attempts_per_rsu;
  std::vector<long long> delivered_per_rsu;
};

/// Walks every RSU's scheduled slots in slot order with head-of-line FCFS
/// service: each slot spends one attempt on the queue's front packet, which
/// succeeds with probability 1 - beta_i and accrues an Exponential(lambda_i)
/// delay (+ fixed_tx_delay) either way. Unserved packets stay queued.
RealizationResult realize_transmissions(const ScheduleMatrix& schedule,
                                        const ChannelState& channel, const ChannelConfig& config,
                                        std::vector<std::deque<PendingPacket>>& queues,
                                        Rng& rng);

struct IntervalRecord {
  int interval = 0;
  std::vector<int> members;
  std::vector<double> alpha;
  long long attempts = 0;
  long long delivered_packets = 0;
  double mean_delay = 0.0;  // over packets delivered this interval; 0 when none
  double goodput = 0.0;     // delivered packets / T
  double jain_delivered = 0.0;  // Jain over cumulative delivered class counts
  std::vector<long long> class_counts;  // cumulative delivered per class
  std::vector<long long> attempts_per_rsu;
  std::vector<long long> delivered_per_rsu;
  long long delivered_total = 0;  // cumulative packets
  double online_f1 = 0.0;
  std::vector<std::string> schedule;  // one "0101..." string per RSU when recorded
};

struct RunSummary {
  std::string policy;
  std::uint64_t seed = 0;
  std::vector<IntervalRecord> records;
  std::vector<long long> final_class_counts;
  long long total_delivered_samples = 0;
  double final_macro_f1 = 0.0;
};

/// Mutable simulation state threaded through step_interval.
struct SimState {
  ChannelState channel;
  AccumulatorState accumulator;
  std::vector<RsuInventory> inventories;
  std::vector<std::deque<PendingPacket>> queues;
  std::vector<Sample> delivered_store;
  std::vector<Sample> test_set;
  ProxyClassifier model;
  int interval = 0;
  long long enqueued_packets = 0;
  long long delivered_packets = 0;

  long long pending_packets() const;
  IntervalSnapshot snapshot(const SimConfig& config) const;
};

/// Builds inventories and the held-out test set from the config's seed.
SimState init_state(const SimConfig& config);

/// Runs one interval: (re)draw channels, plan, build the schedule, select and
/// enqueue new samples into free slots, realize transmissions, update both
/// class ledgers, retrain the proxy classifier.
IntervalRecord step_interval(SimState& state, const SimConfig& config, const PolicySpec& policy,
                             Rng& rng);

/// Fresh state + `intervals` steps; deterministic given (config, policy).
RunSummary run_simulation(const SimConfig& config, const PolicySpec& policy);

struct GridSearchResult {
  std::vector<double> alpha;
  double value = 0.0;
};

/// Exhaustive validation oracle over the alpha grid {0, 1/steps, ..., 1}^N
/// restricted to sum(alpha) <= M, maximizing the raw weighted objective.
/// Guarded to N <= 4 and steps <= 20.
GridSearchResult grid_search_alpha(const IntervalSnapshot& snapshot, int steps,
                                   const PolicyWeights& weights);

}  // namespace divsched
