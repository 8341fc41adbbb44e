#include "krv/folds.hpp"

#include "krv/error.hpp"
#include "krv/rng.hpp"

namespace krv {

std::vector<int> FoldPlan::test_indices(int fold) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == fold) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> FoldPlan::train_indices(int fold) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] != fold) out.push_back(static_cast<int>(i));
  return out;
}

FoldPlan stratified_kfold(const Dataset& d, int n_folds, std::uint64_t seed) {
  const int n = static_cast<int>(d.size());
  if (n_folds < 2) throw Error("stratified_kfold: n_folds must be at least 2");
  if (n_folds > n) throw Error("stratified_kfold: n_folds exceeds instance count");

  FoldPlan plan;
  plan.n_folds = n_folds;
  plan.seed = seed;
  plan.assignments.assign(static_cast<std::size_t>(n), -1);

  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(d.num_classes()));
  for (int i = 0; i < n; ++i)
    by_class[static_cast<std::size_t>(d.labels[static_cast<std::size_t>(i)])].push_back(i);

  // Shuffle within each class, then deal round-robin. The starting fold is
  // rotated by the running total so overall fold sizes stay balanced too.
  Rng rng(seed);
  int dealt = 0;
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t j = 0; j < members.size(); ++j) {
      int fold = (dealt + static_cast<int>(j)) % n_folds;
      plan.assignments[static_cast<std::size_t>(members[j])] = fold;
    }
    dealt += static_cast<int>(members.size());
  }
  return plan;
}

}  // namespace krv
