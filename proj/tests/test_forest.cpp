#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>

#include "paperharvest/forest.hpp"

using namespace paperharvest;

namespace {

// Exhaustive best-Gini decision stump: every feature, every midpoint between
// distinct adjacent sorted values. Written independently of the tree code so
// the two can cross-check each other.
struct OracleStump {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();
  int left_class = 0;
  int right_class = 0;

  int predict(const forest::FeatureRow& x) const {
    if (!found) return majority;
    return x[static_cast<std::size_t>(feature)] <= threshold ? left_class : right_class;
  }
  int majority = 0;
};

double oracle_gini(double c0, double c1) {
  double n = c0 + c1;
  if (n == 0) return 0.0;
  return 1.0 - (c0 / n) * (c0 / n) - (c1 / n) * (c1 / n);
}

OracleStump fit_oracle_stump(const std::vector<forest::FeatureRow>& X, const std::vector<int>& y) {
  OracleStump best;
  std::int64_t t1 = 0;
  for (int l : y) t1 += l;
  best.majority = 2 * t1 >= static_cast<std::int64_t>(y.size()) ? 1 : 0;

  int dim = static_cast<int>(X[0].size());
  double n = static_cast<double>(X.size());
  double parent = oracle_gini(static_cast<double>(y.size()) - static_cast<double>(t1),
                              static_cast<double>(t1));
  for (int f = 0; f < dim; ++f) {
    std::vector<std::pair<double, int>> vals;
    for (std::size_t i = 0; i < X.size(); ++i) vals.emplace_back(X[i][static_cast<std::size_t>(f)], y[i]);
    std::sort(vals.begin(), vals.end());
    double l0 = 0, l1 = 0, tot1 = static_cast<double>(t1), tot0 = n - tot1;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      if (vals[i].second) ++l1; else ++l0;
      if (vals[i].first == vals[i + 1].first) continue;
      double ln = l0 + l1, rn = n - ln;
      double imp = (ln * oracle_gini(l0, l1) + rn * oracle_gini(tot0 - l0, tot1 - l1)) / n;
      if (imp < best.impurity) {
        best.found = true;
        best.feature = f;
        best.threshold = (vals[i].first + vals[i + 1].first) / 2.0;
        best.impurity = imp;
        best.left_class = l1 >= l0 ? 1 : 0;
        best.right_class = (tot1 - l1) >= (tot0 - l0) ? 1 : 0;
      }
    }
  }
  if (best.found && best.impurity >= parent) best.found = false;
  return best;
}

// Brute-force entropy-based information gain over an explicit contingency table.
double oracle_info_gain(const std::vector<double>& values, const std::vector<int>& labels) {
  auto entropy = [](double c0, double c1) {
    double n = c0 + c1;
    if (n == 0) return 0.0;
    double h = 0.0;
    if (c0 > 0) h -= (c0 / n) * std::log2(c0 / n);
    if (c1 > 0) h -= (c1 / n) * std::log2(c1 / n);
    return h;
  };
  double t0 = 0, t1 = 0;
  std::map<double, std::pair<double, double>> table;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (labels[i]) { ++t1; ++table[values[i]].second; }
    else { ++t0; ++table[values[i]].first; }
  }
  double n = t0 + t1;
  double cond = 0.0;
  for (auto& [v, c] : table) cond += ((c.first + c.second) / n) * entropy(c.first, c.second);
  return entropy(t0, t1) - cond;
}

}  // namespace

TEST_CASE("one unrestricted tree on full data equals the exhaustive stump at depth 1") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<forest::FeatureRow> X;
    std::vector<int> y;
    bool has[2] = {false, false};
    for (int i = 0; i < 20; ++i) {
      forest::FeatureRow row(4);
      for (auto& v : row) v = static_cast<double>(rng() % 8);
      int label = static_cast<int>(rng() % 2);
      has[label] = true;
      X.push_back(std::move(row));
      y.push_back(label);
    }
    if (!has[0] || !has[1]) continue;

    forest::ForestConfig cfg;
    cfg.n_trees = 1;
    cfg.bootstrap = false;
    cfg.mtry = 4;       // consider every feature
    cfg.max_depth = 1;  // a stump
    cfg.seed = 7;
    auto model = forest::train_forest(X, y, cfg);
    auto stump = fit_oracle_stump(X, y);

    const auto& root = model.trees[0].nodes[0];
    if (!stump.found) {
      CHECK(root.is_leaf);
      continue;
    }
    REQUIRE_FALSE(root.is_leaf);
    CHECK(root.threshold == stump.threshold);
    // same impurity is required; the feature may differ only on exact ties
    auto tree_split = forest::detail::best_split_for_feature(
        X, y, [&] { std::vector<std::size_t> s(X.size()); std::iota(s.begin(), s.end(), 0); return s; }(),
        root.feature, cfg.min_leaf_size);
    CHECK(tree_split.impurity == Catch::Approx(stump.impurity).margin(1e-12));
    for (const auto& row : X) CHECK(model.trees[0].predict(row) == stump.predict(row));
  }
}

TEST_CASE("info_gain matches the brute-force entropy oracle") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 5 + rng() % 40;
    std::vector<double> values(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = static_cast<double>(rng() % 5);
      labels[i] = static_cast<int>(rng() % 2);
    }
    CHECK(forest::info_gain(values, labels) ==
          Catch::Approx(oracle_info_gain(values, labels)).margin(1e-9));
  }
}

TEST_CASE("a perfectly predictive feature gains exactly H(Y)") {
  std::vector<int> labels{0, 0, 1, 1, 1, 0, 1};
  std::vector<double> perfect(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) perfect[i] = labels[i] ? 7.0 : -3.0;
  CHECK(forest::info_gain(perfect, labels) == forest::entropy_bits(labels));
}

TEST_CASE("constant and independent features gain zero") {
  std::vector<int> labels{0, 1, 0, 1};
  CHECK(forest::info_gain({5.0, 5.0, 5.0, 5.0}, labels) == 0.0);
  // value groups with identical label mix
  CHECK(forest::info_gain({1.0, 1.0, 2.0, 2.0}, labels) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("entropy is 1 bit for a balanced binary label") {
  CHECK(forest::entropy_bits({0, 1}) == 1.0);
  CHECK(forest::entropy_bits({0, 0}) == 0.0);
  CHECK(forest::entropy_bits({1, 1, 1}) == 0.0);
  CHECK(forest::entropy_bits({}) == 0.0);
}

TEST_CASE("info_gain input validation") {
  CHECK_THROWS_AS(forest::info_gain({}, {}), InvalidInputError);
  CHECK_THROWS_AS(forest::info_gain({1.0}, {0, 1}), InvalidInputError);
}

TEST_CASE("rank_features binarizes at the median and sorts by gain") {
  // feature 0 perfectly predicts above/below its median; feature 1 is constant
  std::vector<forest::FeatureRow> X{{1.0, 5.0}, {2.0, 5.0}, {8.0, 5.0}, {9.0, 5.0}};
  std::vector<int> y{0, 0, 1, 1};
  auto report = forest::rank_features(X, y, {"signal", "flat"});
  REQUIRE(report.entries.size() == 2);
  CHECK(report.entries[0].feature == "signal");
  CHECK(report.entries[0].gain == 1.0);
  CHECK(report.entries[1].gain == 0.0);
}

TEST_CASE("training rejects malformed inputs") {
  forest::ForestConfig cfg;
  cfg.n_trees = 2;
  std::vector<forest::FeatureRow> X{{1.0}, {2.0}};
  CHECK_THROWS_AS(forest::train_forest(X, {0}, cfg), InvalidInputError);
  CHECK_THROWS_AS(forest::train_forest(X, {0, 2}, cfg), InvalidInputError);
  CHECK_THROWS_AS(forest::train_forest(X, {1, 1}, cfg), DegenerateTrainingError);
  CHECK_THROWS_AS(forest::train_forest({{1.0}, {1.0, 2.0}}, std::vector<int>{0, 1}, cfg),
                  InvalidInputError);
  CHECK_THROWS_AS(forest::train_forest({}, {}, cfg), InvalidInputError);
}

TEST_CASE("unrestricted forest fits its training data exactly when features separate it") {
  std::mt19937_64 rng(9);
  std::vector<forest::FeatureRow> X;
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    double a = static_cast<double>(rng() % 100);
    double b = static_cast<double>(rng() % 100);
    X.push_back({a, b, static_cast<double>(rng() % 3)});
    y.push_back(a + b > 100.0 ? 1 : 0);
  }
  forest::ForestConfig cfg;
  cfg.n_trees = 30;
  cfg.bootstrap = false;
  cfg.mtry = 3;
  cfg.seed = 4;
  auto model = forest::train_forest(X, y, cfg);
  for (std::size_t i = 0; i < X.size(); ++i) CHECK(forest::predict(model, X[i]).label == y[i]);
}

TEST_CASE("prediction score is the vote fraction, ties go to paper") {
  // two leaf-only trees with opposite majorities produce score 0.5 -> label 1
  forest::RandomForestModel model;
  model.dim = 1;
  forest::DecisionTree t0, t1;
  forest::TreeNode leaf0;
  leaf0.class_counts[0] = 3;
  leaf0.class_counts[1] = 1;
  forest::TreeNode leaf1;
  leaf1.class_counts[0] = 1;
  leaf1.class_counts[1] = 3;
  t0.nodes.push_back(leaf0);
  t1.nodes.push_back(leaf1);
  model.trees = {t0, t1};
  auto p = forest::predict(model, {0.0});
  CHECK(p.score == 0.5);
  CHECK(p.label == 1);
  CHECK_THROWS_AS(forest::predict(model, {0.0, 1.0}), InvalidInputError);
}

TEST_CASE("training is deterministic in the seed") {
  std::mt19937_64 rng(77);
  std::vector<forest::FeatureRow> X;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    X.push_back({static_cast<double>(rng() % 10), static_cast<double>(rng() % 10)});
    y.push_back(static_cast<int>(rng() % 2));
  }
  forest::ForestConfig cfg;
  cfg.n_trees = 10;
  cfg.seed = 31;
  auto a = forest::forest_to_json(forest::train_forest(X, y, cfg));
  auto b = forest::forest_to_json(forest::train_forest(X, y, cfg));
  CHECK(a == b);
  cfg.seed = 32;
  CHECK(forest::forest_to_json(forest::train_forest(X, y, cfg)) != a);
}

TEST_CASE("forest serialization round-trips predictions") {
  std::mt19937_64 rng(15);
  std::vector<forest::FeatureRow> X;
  std::vector<int> y;
  for (int i = 0; i < 50; ++i) {
    X.push_back({static_cast<double>(rng() % 20), static_cast<double>(rng() % 20)});
    y.push_back(X.back()[0] > 10.0 ? 1 : 0);
  }
  forest::ForestConfig cfg;
  cfg.n_trees = 12;
  auto model = forest::train_forest(X, y, cfg);
  auto restored = forest::forest_from_json(forest::forest_to_json(model));
  for (const auto& row : X) {
    CHECK(forest::predict(restored, row).label == forest::predict(model, row).label);
    CHECK(forest::predict(restored, row).score == forest::predict(model, row).score);
  }
  auto tampered = forest::forest_to_json(model);
  tampered["format_version"] = 0;
  CHECK_THROWS_AS(forest::forest_from_json(tampered), ParseError);
}

TEST_CASE("weighted F1 matches a hand computation") {
  // confusion: true 0 -> pred {0:3, 1:1}; true 1 -> pred {0:2, 1:4}
  std::vector<int> y_true{0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
  std::vector<int> y_pred{0, 0, 0, 1, 0, 0, 1, 1, 1, 1};
  auto r = forest::evaluate_classifier(y_true, y_pred);
  CHECK(r.confusion[0][0] == 3);
  CHECK(r.confusion[0][1] == 1);
  CHECK(r.confusion[1][0] == 2);
  CHECK(r.confusion[1][1] == 4);

  double p1 = 4.0 / 5.0, r1 = 4.0 / 6.0;
  double f1_paper = 2 * p1 * r1 / (p1 + r1);
  double p0 = 3.0 / 5.0, r0 = 3.0 / 4.0;
  double f1_non = 2 * p0 * r0 / (p0 + r0);
  CHECK(r.per_class[1].f1 == Catch::Approx(f1_paper).margin(1e-12));
  CHECK(r.per_class[0].f1 == Catch::Approx(f1_non).margin(1e-12));
  CHECK(r.weighted.f1 == Catch::Approx(0.4 * f1_non + 0.6 * f1_paper).margin(1e-12));
  CHECK(r.per_class[1].support == 6);
}

TEST_CASE("an always-paper predictor has recall 1 and precision = base rate") {
  std::vector<int> y_true{1, 0, 1, 0};
  std::vector<int> y_pred{1, 1, 1, 1};
  auto r = forest::evaluate_classifier(y_true, y_pred);
  CHECK(r.per_class[1].recall == 1.0);
  CHECK(r.per_class[1].precision == 0.5);
  CHECK(r.per_class[0].recall == 0.0);
}
