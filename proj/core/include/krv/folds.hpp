#pragma once

#include <cstdint>
#include <vector>

#include "krv/dataset.hpp"

namespace krv {

// Stratified cross-validation plan: assignments[i] is the fold id of
// instance i. Per-class fold sizes differ by at most one.
struct FoldPlan {
  int n_folds = 0;
  std::vector<int> assignments;
  std::uint64_t seed = 0;

  std::vector<int> test_indices(int fold) const;
  std::vector<int> train_indices(int fold) const;
};

// Deterministic for a fixed seed. Requires 2 <= n_folds <= N.
FoldPlan stratified_kfold(const Dataset& d, int n_folds, std::uint64_t seed);

}  // namespace krv
