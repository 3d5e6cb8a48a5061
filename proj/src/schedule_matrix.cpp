#include "divsched/schedule_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace divsched {

namespace {

std::vector<int> row_targets_from_alpha(std::span<const double> alpha, int slots) {
  std::vector<int> targets(alpha.size());
  for (size_t i = 0; i < alpha.size(); ++i) {
    if (!(alpha[i] >= 0.0) || !(alpha[i] <= 1.0)) {
      throw std::invalid_argument("build_matrix: attempt probabilities must lie in [0, 1]");
    }
    // Tiny nudge so exact products like 0.29 * 100 floor to the intended value.
    targets[i] = static_cast<int>(std::floor(alpha[i] * slots + 1e-9));
  }
  return targets;
}

// Rows in descending-target order drop their ones into the currently
// least-loaded columns. Feasible whenever sum(targets) <= M*T and every
// target <= T.
void staircase_fill(ScheduleMatrix& m) {
  std::fill(m.cells.begin(), m.cells.end(), std::uint8_t{0});
  std::vector<int> order(m.rows);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return m.row_targets[a] > m.row_targets[b]; });

  std::vector<int> load(m.slots, 0);
  std::vector<int> cols(m.slots);
  for (int row : order) {
    const int target = m.row_targets[row];
    if (target == 0) continue;
    std::iota(cols.begin(), cols.end(), 0);
    std::stable_sort(cols.begin(), cols.end(), [&](int a, int b) { return load[a] < load[b]; });
    for (int j = 0; j < target; ++j) {
      m.at(row, cols[j]) = 1;
      ++load[cols[j]];
    }
  }
  m.used_fallback = true;
}

}  // namespace

std::vector<int> ScheduleMatrix::row_slots(int row) const {
  std::vector<int> result;
  for (int t = 0; t < slots; ++t) {
    if (at(row, t)) result.push_back(t);
  }
  return result;
}

std::string MatrixViolation::describe() const {
  if (kind == Kind::row_sum) {
    return "row " + std::to_string(index) + " has " + std::to_string(actual) +
           " ones, expected " + std::to_string(allowed);
  }
  return "column " + std::to_string(index) + " has " + std::to_string(actual) +
         " transmissions, capacity " + std::to_string(allowed);
}

ScheduleMatrix build_matrix(std::span<const double> alpha, int slots, int capacity, Rng& rng,
                            int max_iters) {
  if (slots < 1 || capacity < 1) {
    throw std::invalid_argument("build_matrix: slots and capacity must be >= 1");
  }
  ScheduleMatrix m;
  m.rows = static_cast<int>(alpha.size());
  m.slots = slots;
  m.capacity = capacity;
  m.row_targets = row_targets_from_alpha(alpha, slots);
  m.cells.assign(static_cast<size_t>(m.rows) * slots, 0);

  long long total = 0;
  for (size_t i = 0; i < m.row_targets.size(); ++i) {
    if (m.row_targets[i] > slots) {
      throw std::invalid_argument("build_matrix: row " + std::to_string(i) +
                                  " needs more ones than there are slots");
    }
    total += m.row_targets[i];
  }
  if (total > static_cast<long long>(capacity) * slots) {
    throw std::invalid_argument(
        "build_matrix: sum of row targets exceeds capacity * slots; requires "
        "sum(floor(alpha_i * T)) <= M * T");
  }

  // Random initial placement: each row samples its ones without replacement.
  std::vector<int> load(slots, 0);
  std::vector<int> perm(slots);
  for (int row = 0; row < m.rows; ++row) {
    const int target = m.row_targets[row];
    if (target == 0) continue;
    std::iota(perm.begin(), perm.end(), 0);
    for (int j = 0; j < target; ++j) {
      std::uniform_int_distribution<int> pick(j, slots - 1);
      std::swap(perm[j], perm[pick(rng)]);
      m.at(row, perm[j]) = 1;
      ++load[perm[j]];
    }
  }

  auto overloaded_columns = [&]() {
    std::vector<int> cols;
    for (int t = 0; t < slots; ++t) {
      if (load[t] > capacity) cols.push_back(t);
    }
    return cols;
  };

  std::vector<int> overloaded = overloaded_columns();
  int iter = 0;
  while (!overloaded.empty() && iter < max_iters) {
    ++iter;
    std::uniform_int_distribution<size_t> pick_col(0, overloaded.size() - 1);
    const int col = overloaded[pick_col(rng)];

    // Random row transmitting in the conflicted column.
    int chosen_row = -1;
    int seen = 0;
    for (int row = 0; row < m.rows; ++row) {
      if (!m.at(row, col)) continue;
      ++seen;
      std::uniform_int_distribution<int> reservoir(1, seen);
      if (reservoir(rng) == 1) chosen_row = row;
    }

    // Relocate that one to a slot minimizing the resulting overflow; ties
    // are broken uniformly at random (reservoir over the minimizers).
    int best_slot = -1;
    int best_overflow = load[col] - capacity;  // staying put keeps this overflow
    int tie_count = 0;
    for (int t = 0; t < slots; ++t) {
      if (m.at(chosen_row, t)) continue;
      const int overflow = std::max(0, load[t] + 1 - capacity);
      if (best_slot < 0 || overflow < best_overflow) {
        best_slot = t;
        best_overflow = overflow;
        tie_count = 1;
      } else if (overflow == best_overflow) {
        ++tie_count;
        std::uniform_int_distribution<int> reservoir(1, tie_count);
        if (reservoir(rng) == 1) best_slot = t;
      }
    }
    if (best_slot < 0) continue;  // row is all ones; nothing to move

    m.at(chosen_row, col) = 0;
    --load[col];
    m.at(chosen_row, best_slot) = 1;
    ++load[best_slot];
    overloaded = overloaded_columns();
  }
  m.iterations = iter;

  if (!overloaded.empty()) {
    staircase_fill(m);
  }
  return m;
}

std::vector<MatrixViolation> verify_matrix(const ScheduleMatrix& matrix) {
  std::vector<MatrixViolation> violations;
  for (int row = 0; row < matrix.rows; ++row) {
    int sum = 0;
    for (int t = 0; t < matrix.slots; ++t) sum += matrix.at(row, t);
    if (sum != matrix.row_targets[row]) {
      violations.push_back({MatrixViolation::Kind::row_sum, row, sum, matrix.row_targets[row]});
    }
  }
  for (int t = 0; t < matrix.slots; ++t) {
    int sum = 0;
    for (int row = 0; row < matrix.rows; ++row) sum += matrix.at(row, t);
    if (sum > matrix.capacity) {
      violations.push_back({MatrixViolation::Kind::column_capacity, t, sum, matrix.capacity});
    }
  }
  return violations;
}

}  // namespace divsched
