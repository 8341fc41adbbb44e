#include <cmath>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "krv/csv.hpp"
#include "krv/error.hpp"
#include "krv/folds.hpp"
#include "krv/standardize.hpp"

using namespace krv;
using krv::testing::TempFile;

TEST_CASE("load_csv reads iris with expected shape") {
  Dataset d = load_csv(testing::data_path("iris.csv"));
  CHECK(d.size() == 150);
  CHECK(d.dim() == 4);
  CHECK(d.num_classes() == 3);
  CHECK(d.label_names[0] == "setosa");  // first-appearance order
  CHECK(d.attribute_kinds[0] == AttrKind::real);
}

TEST_CASE("load_csv rejects degenerate files") {
  TempFile empty("");
  CHECK_THROWS_WITH_AS(load_csv(empty.path()), doctest::Contains("no instances"), Error);

  TempFile single_class("x,y\n1,a\n2,a\n");
  CHECK_THROWS_AS(load_csv(single_class.path()), Error);

  TempFile ragged("a,b,cls\n1,2,x\n1,y\n");
  CHECK_THROWS_AS(load_csv(ragged.path()), Error);

  TempFile missing("a,b,cls\n1,?,x\n2,3,y\n");
  CHECK_THROWS_AS(load_csv(missing.path()), Error);

  CHECK_THROWS_AS(load_csv("/nonexistent/nope.csv"), Error);
}

TEST_CASE("load_csv one-hot encodes nominal columns") {
  // One nominal attribute with 2 levels expands into 2 columns: D 2 -> 3.
  TempFile f("num,color,cls\n1.5,red,yes\n2.0,blue,no\n2.5,red,yes\n");
  Dataset d = load_csv(f.path());
  CHECK(d.size() == 3);
  CHECK(d.dim() == 3);
  CHECK(d.attribute_kinds[0] == AttrKind::real);
  CHECK(d.attribute_kinds[1] == AttrKind::nominal);
  CHECK(d.attribute_kinds[2] == AttrKind::nominal);
  // red was seen first: row0 = (1,0), row1 = (0,1), row2 = (1,0).
  CHECK(d.instances(0, 1) == 1.0);
  CHECK(d.instances(0, 2) == 0.0);
  CHECK(d.instances(1, 1) == 0.0);
  CHECK(d.instances(1, 2) == 1.0);
  // Label alignment survives the expansion.
  CHECK(d.labels == std::vector<int>{0, 1, 0});
}

TEST_CASE("load_csv label column selection") {
  TempFile f("cls,a,b\nx,1,2\ny,3,4\n");
  Dataset by_index = load_csv(f.path(), 0);
  CHECK(by_index.dim() == 2);
  CHECK(by_index.label_names == std::vector<std::string>{"x", "y"});

  Dataset by_name = load_csv(f.path(), std::string("cls"));
  CHECK(by_name.instances == by_index.instances);

  CHECK_THROWS_AS(load_csv(f.path(), std::string("nope")), Error);
  CHECK_THROWS_AS(load_csv(f.path(), 7), Error);
}

TEST_CASE("load_csv integer kind detection and headerless files") {
  TempFile f("1,2.5,0\n3,4.5,1\n5,6.5,0\n");
  Dataset d = load_csv(f.path(), -1);
  CHECK(d.attribute_kinds[0] == AttrKind::integer);
  CHECK(d.attribute_kinds[1] == AttrKind::real);
  CHECK(d.label_names == std::vector<std::string>{"0", "1"});
}

TEST_CASE("standardize centers and scales") {
  Dataset d;
  d.name = "toy";
  d.instances.resize(3, 2);
  d.instances << 5, 1, 5, 2, 5, 3;
  d.labels = {0, 1, 0};
  d.label_names = {"a", "b"};
  d.attribute_kinds = {AttrKind::real, AttrKind::real};

  auto [std_d, sc] = standardize(d);
  // Constant column maps to all zeros.
  CHECK(std_d.instances.col(0).cwiseAbs().maxCoeff() == 0.0);
  // Non-constant column: mean 0, sample std 1.
  double mean = std_d.instances.col(1).mean();
  double var = (std_d.instances.col(1).array() - mean).square().sum() / 2.0;
  CHECK(std::abs(mean) < 1e-9);
  CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);

  // Idempotence.
  auto [again, sc2] = standardize(std_d);
  CHECK((again.instances - std_d.instances).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("standardizer replays the training transform on held-out rows") {
  Rng rng(7);
  Dataset d = testing::random_blobs(rng, 40, 3, 2);
  std::vector<int> train_rows, test_rows;
  for (int i = 0; i < 40; ++i) (i % 4 == 0 ? test_rows : train_rows).push_back(i);

  Dataset train = d.subset(train_rows);
  Standardizer sc = Standardizer::fit(train.instances);

  // Statistics derive from the training rows only.
  for (Eigen::Index c = 0; c < train.instances.cols(); ++c) {
    double mean = train.instances.col(c).mean();
    double sd = std::sqrt((train.instances.col(c).array() - mean).square().sum() /
                          static_cast<double>(train.instances.rows() - 1));
    CHECK(sc.mean(c) == doctest::Approx(mean).epsilon(1e-12));
    CHECK(sc.scale(c) == doctest::Approx(sd).epsilon(1e-12));
  }

  Dataset test = d.subset(test_rows);
  Eigen::MatrixXd t = sc.apply(test.instances);
  for (Eigen::Index c = 0; c < t.cols(); ++c)
    CHECK(t(0, c) ==
          doctest::Approx((test.instances(0, c) - sc.mean(c)) / sc.scale(c)).epsilon(1e-12));
}

TEST_CASE("stratified_kfold balances classes") {
  Rng rng(3);
  Dataset d = testing::random_blobs(rng, 10, 2, 2);  // 5 per class
  FoldPlan plan = stratified_kfold(d, 5, 42);

  // 10 instances, 2 balanced classes, 5 folds: exactly 1 per class per fold.
  for (int f = 0; f < 5; ++f) {
    auto test = plan.test_indices(f);
    REQUIRE(test.size() == 2);
    CHECK(d.labels[static_cast<std::size_t>(test[0])] +
              d.labels[static_cast<std::size_t>(test[1])] ==
          1);
  }

  // Partition: every index exactly once.
  std::set<int> seen;
  for (int f = 0; f < 5; ++f)
    for (int i : plan.test_indices(f)) seen.insert(i);
  CHECK(seen.size() == 10);

  // Determinism.
  FoldPlan plan2 = stratified_kfold(d, 5, 42);
  CHECK(plan.assignments == plan2.assignments);
  FoldPlan plan3 = stratified_kfold(d, 5, 43);
  CHECK(plan.assignments != plan3.assignments);
}

TEST_CASE("stratified_kfold per-class sizes differ by at most one") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 20 + static_cast<int>(rng.bounded(80));
    int c = 2 + static_cast<int>(rng.bounded(4));
    int folds = 2 + static_cast<int>(rng.bounded(9));
    Dataset d = testing::random_blobs(rng, n, 3, c);
    FoldPlan plan = stratified_kfold(d, folds, rng.next_u64());
    for (int cls = 0; cls < c; ++cls) {
      std::vector<int> per_fold(static_cast<std::size_t>(folds), 0);
      for (int i = 0; i < n; ++i)
        if (d.labels[static_cast<std::size_t>(i)] == cls)
          ++per_fold[static_cast<std::size_t>(plan.assignments[static_cast<std::size_t>(i)])];
      int lo = *std::min_element(per_fold.begin(), per_fold.end());
      int hi = *std::max_element(per_fold.begin(), per_fold.end());
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("stratified_kfold rejects bad fold counts") {
  Rng rng(5);
  Dataset d = testing::random_blobs(rng, 10, 2, 2);
  CHECK_THROWS_AS(stratified_kfold(d, 1, 0), Error);
  CHECK_THROWS_AS(stratified_kfold(d, 11, 0), Error);
}
