#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "divsched/rng.hpp"

namespace divsched {

/// Binary N x T transmission schedule. Row i carries exactly
/// floor(alpha_i * T) ones and every column sums to at most M.
struct ScheduleMatrix {
  int rows = 0;      // N
  int slots = 0;     // T
  int capacity = 0;  // M
  std::vector<std::uint8_t> cells;  // row-major
  std::vector<int> row_targets;
  bool used_fallback = false;
  int iterations = 0;

  std::uint8_t at(int row, int slot) const { return cells[static_cast<size_t>(row) * slots + slot]; }
  std::uint8_t& at(int row, int slot) { return cells[static_cast<size_t>(row) * slots + slot]; }

  /// Column indices of row's ones, ascending.
  std::vector<int> row_slots(int row) const;
};

struct MatrixViolation {
  enum class Kind { row_sum, column_capacity };
  Kind kind;
  int index = 0;    // row or column
  int actual = 0;
  int allowed = 0;

  std::string describe() const;
};

/// Builds a feasible schedule for the attempt vector via min-conflicts local
/// search: start from random row placements, then repeatedly pick a random
/// row holding a one in an over-capacity column and relocate that one to the
/// slot minimizing total column-capacity conflicts (ties broken uniformly at
/// random). If max_iters is exhausted the deterministic staircase
/// construction takes over: rows in descending-target order place their ones
/// into the least-loaded columns. Throws std::invalid_argument when the row
/// targets are infeasible (sum > M*T or a single target > T).
ScheduleMatrix build_matrix(std::span<const double> alpha, int slots, int capacity, Rng& rng,
                            int max_iters = 10'000);

/// Empty iff both invariants hold; otherwise one entry per violated row or
/// column with actual vs. allowed sums.
std::vector<MatrixViolation> verify_matrix(const ScheduleMatrix& matrix);

}  // namespace divsched
