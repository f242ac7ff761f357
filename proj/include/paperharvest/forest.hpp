#pragma once

// Binary random forest over dense feature vectors (Gini splits, bootstrap,
// per-split feature subsampling), information-gain feature ranking, and
// confusion-matrix evaluation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "paperharvest/errors.hpp"

namespace paperharvest::forest {

using FeatureRow = std::vector<double>;

struct TreeNode {
  bool is_leaf = true;
  int feature = -1;
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  std::int64_t class_counts[2] = {0, 0};
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root

  int leaf_class(std::int64_t c0, std::int64_t c1) const { return c1 >= c0 ? 1 : 0; }

  int predict(const FeatureRow& x) const {
    int cur = 0;
    while (!nodes[static_cast<std::size_t>(cur)].is_leaf) {
      const auto& n = nodes[static_cast<std::size_t>(cur)];
      cur = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    const auto& n = nodes[static_cast<std::size_t>(cur)];
    return leaf_class(n.class_counts[0], n.class_counts[1]);
  }
};

struct ForestConfig {
  int n_trees = 100;
  int max_depth = -1;     // -1 = unlimited
  int mtry = 0;           // 0 = ceil(sqrt(dim))
  int min_leaf_size = 1;
  bool bootstrap = true;
  std::uint64_t seed = 42;
};

struct RandomForestModel {
  std::vector<DecisionTree> trees;
  ForestConfig config;
  int dim = 0;
};

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();  // weighted child Gini
};

namespace detail {

inline double gini(std::int64_t c0, std::int64_t c1) {
  std::int64_t n = c0 + c1;
  if (n == 0) return 0.0;
  double p0 = static_cast<double>(c0) / static_cast<double>(n);
  double p1 = static_cast<double>(c1) / static_cast<double>(n);
  return 1.0 - p0 * p0 - p1 * p1;
}

// Best midpoint threshold for one feature over the given sample indices.
// Children smaller than min_leaf_size are not allowed.
inline SplitChoice best_split_for_feature(const std::vector<FeatureRow>& X,
                                          const std::vector<int>& y,
                                          const std::vector<std::size_t>& samples, int feature,
                                          int min_leaf_size) {
  std::vector<std::pair<double, int>> vals;
  vals.reserve(samples.size());
  for (std::size_t i : samples)
    vals.emplace_back(X[i][static_cast<std::size_t>(feature)], y[i]);
  std::sort(vals.begin(), vals.end());

  std::int64_t total[2] = {0, 0};
  for (const auto& [v, label] : vals) ++total[label];

  SplitChoice best;
  std::int64_t left[2] = {0, 0};
  std::int64_t n = static_cast<std::int64_t>(vals.size());
  for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
    ++left[vals[i].second];
    if (vals[i].first == vals[i + 1].first) continue;  // not a boundary between distinct values
    std::int64_t ln = static_cast<std::int64_t>(i) + 1;
    std::int64_t rn = n - ln;
    if (ln < min_leaf_size || rn < min_leaf_size) continue;
    std::int64_t right0 = total[0] - left[0];
    std::int64_t right1 = total[1] - left[1];
    double impurity = (static_cast<double>(ln) * gini(left[0], left[1]) +
                       static_cast<double>(rn) * gini(right0, right1)) /
                      static_cast<double>(n);
    if (impurity < best.impurity) {
      best.found = true;
      best.feature = feature;
      best.threshold = (vals[i].first + vals[i + 1].first) / 2.0;
      best.impurity = impurity;
    }
  }
  return best;
}

struct TreeBuilder {
  const std::vector<FeatureRow>& X;
  const std::vector<int>& y;
  const ForestConfig& config;
  int dim;
  int mtry;
  std::mt19937_64 rng;
  DecisionTree tree;

  int build(std::vector<std::size_t> samples, int depth) {
    std::int64_t counts[2] = {0, 0};
    for (std::size_t i : samples) ++counts[y[i]];

    int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.back().class_counts[0] = counts[0];
    tree.nodes.back().class_counts[1] = counts[1];

    bool pure = counts[0] == 0 || counts[1] == 0;
    bool at_depth = config.max_depth >= 0 && depth >= config.max_depth;
    bool too_small = static_cast<std::int64_t>(samples.size()) < 2 * config.min_leaf_size;
    if (pure || at_depth || too_small) return node_index;

    // sample mtry features without replacement
    std::vector<int> candidates(static_cast<std::size_t>(dim));
    std::iota(candidates.begin(), candidates.end(), 0);
    if (mtry < dim) {
      for (int i = 0; i < mtry; ++i) {
        std::uniform_int_distribution<int> pick(i, dim - 1);
        std::swap(candidates[static_cast<std::size_t>(i)],
                  candidates[static_cast<std::size_t>(pick(rng))]);
      }
      candidates.resize(static_cast<std::size_t>(mtry));
      std::sort(candidates.begin(), candidates.end());  // order-independent tie-breaking
    }

    SplitChoice best;
    for (int f : candidates) {
      SplitChoice c = best_split_for_feature(X, y, samples, f, config.min_leaf_size);
      if (c.found && (c.impurity < best.impurity ||
                      (c.impurity == best.impurity && best.found && c.feature < best.feature)))
        best = c;
      else if (c.found && !best.found)
        best = c;
    }
    double parent_impurity = gini(counts[0], counts[1]);
    if (!best.found || best.impurity >= parent_impurity) return node_index;

    std::vector<std::size_t> left_samples, right_samples;
    for (std::size_t i : samples) {
      if (X[i][static_cast<std::size_t>(best.feature)] <= best.threshold)
        left_samples.push_back(i);
      else
        right_samples.push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();

    int left = build(std::move(left_samples), depth + 1);
    int right = build(std::move(right_samples), depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(node_index)];
    node.is_leaf = false;
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    return node_index;
  }
};

}  // namespace detail

inline RandomForestModel train_forest(const std::vector<FeatureRow>& X, const std::vector<int>& y,
                                      const ForestConfig& config) {
  if (X.size() != y.size()) throw InvalidInputError("train_forest: |X| != |y|");
  if (X.size() < 2) throw InvalidInputError("train_forest: need at least 2 samples");
  bool has0 = false, has1 = false;
  for (int label : y) {
    if (label == 0) has0 = true;
    else if (label == 1) has1 = true;
    else throw InvalidInputError("train_forest: labels must be 0 or 1");
  }
  if (!has0 || !has1) throw DegenerateTrainingError("train_forest: single-class training data");
  int dim = static_cast<int>(X[0].size());
  for (const auto& row : X)
    if (static_cast<int>(row.size()) != dim)
      throw InvalidInputError("train_forest: ragged feature matrix");

  int mtry = config.mtry > 0 ? std::min(config.mtry, dim)
                             : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(dim))));

  RandomForestModel model;
  model.config = config;
  model.dim = dim;
  for (int t = 0; t < config.n_trees; ++t) {
    // per-tree stream derived from (seed, tree index) so trees are
    // independent of training order and parallelizable
    std::seed_seq seq{config.seed, static_cast<std::uint64_t>(t)};
    detail::TreeBuilder builder{X, y, config, dim, mtry, std::mt19937_64(seq), {}};

    std::vector<std::size_t> samples;
    if (config.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, X.size() - 1);
      samples.reserve(X.size());
      for (std::size_t i = 0; i < X.size(); ++i) samples.push_back(pick(builder.rng));
    } else {
      samples.resize(X.size());
      std::iota(samples.begin(), samples.end(), 0);
    }
    builder.build(std::move(samples), 0);
    model.trees.push_back(std::move(builder.tree));
  }
  return model;
}

struct Prediction {
  int label = 0;              // 1 = paper
  double score = 0.0;         // fraction of trees voting paper
};

// Majority vote; label is paper when score >= 0.5 (ties go to paper).
inline Prediction predict(const RandomForestModel& model, const FeatureRow& x) {
  if (static_cast<int>(x.size()) != model.dim)
    throw InvalidInputError("predict: expected dim " + std::to_string(model.dim) + ", got " +
                            std::to_string(x.size()));
  std::int64_t votes = 0;
  for (const auto& tree : model.trees) votes += tree.predict(x);
  Prediction p;
  p.score = static_cast<double>(votes) / static_cast<double>(model.trees.size());
  p.label = p.score >= 0.5 ? 1 : 0;
  return p;
}

// --- information gain ---

inline double entropy_bits(const std::vector<int>& labels) {
  if (labels.empty()) return 0.0;
  std::int64_t c1 = 0;
  for (int l : labels) c1 += l;
  double n = static_cast<double>(labels.size());
  double p1 = static_cast<double>(c1) / n;
  double h = 0.0;
  if (p1 > 0.0) h -= p1 * std::log2(p1);
  if (p1 < 1.0) h -= (1.0 - p1) * std::log2(1.0 - p1);
  return h;
}

// IG = H(Y) - sum_v P(v) H(Y|v), base-2, grouping on exact feature values.
inline double info_gain(const std::vector<double>& values, const std::vector<int>& labels) {
  if (values.size() != labels.size()) throw InvalidInputError("info_gain: length mismatch");
  if (values.empty()) throw InvalidInputError("info_gain: empty input");
  std::map<double, std::pair<std::int64_t, std::int64_t>> groups;  // value -> (c0, c1)
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto& g = groups[values[i]];
    if (labels[i]) ++g.second;
    else ++g.first;
  }
  double n = static_cast<double>(values.size());
  double conditional = 0.0;
  for (const auto& [v, counts] : groups) {
    (void)v;
    double gn = static_cast<double>(counts.first + counts.second);
    double p1 = static_cast<double>(counts.second) / gn;
    double h = 0.0;
    if (p1 > 0.0) h -= p1 * std::log2(p1);
    if (p1 < 1.0) h -= (1.0 - p1) * std::log2(1.0 - p1);
    conditional += (gn / n) * h;
  }
  return entropy_bits(labels) - conditional;
}

struct InfoGainEntry {
  std::string feature;
  double gain = 0.0;
};

struct InfoGainReport {
  std::vector<InfoGainEntry> entries;  // sorted descending by gain, ties by name
};

namespace detail {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace detail

// Numeric columns are binarized at their median (value > median) so binary
// term features and numeric features rank under one rule.
inline InfoGainReport rank_features(const std::vector<FeatureRow>& X, const std::vector<int>& y,
                                    const std::vector<std::string>& names) {
  if (X.empty()) throw InvalidInputError("rank_features: empty dataset");
  if (X[0].size() != names.size()) throw InvalidInputError("rank_features: names do not match dim");
  InfoGainReport report;
  for (std::size_t f = 0; f < names.size(); ++f) {
    std::vector<double> col(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) col[i] = X[i][f];
    double med = detail::median(col);
    std::vector<double> binarized(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) binarized[i] = col[i] > med ? 1.0 : 0.0;
    report.entries.push_back({names[f], info_gain(binarized, y)});
  }
  std::sort(report.entries.begin(), report.entries.end(),
            [](const InfoGainEntry& a, const InfoGainEntry& b) {
              if (a.gain != b.gain) return a.gain > b.gain;
              return a.feature < b.feature;
            });
  return report;
}

// --- evaluation ---

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
};

struct ClassifierEvalReport {
  ClassMetrics per_class[2];           // [0] = non-paper, [1] = paper
  ClassMetrics weighted;               // support-weighted average
  std::int64_t confusion[2][2] = {{0, 0}, {0, 0}};  // [true][predicted]

  std::int64_t total() const {
    return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
  }
};

inline ClassifierEvalReport evaluate_classifier(const std::vector<int>& y_true,
                                                const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty())
    throw InvalidInputError("evaluate_classifier: bad label vectors");
  ClassifierEvalReport r;
  for (std::size_t i = 0; i < y_true.size(); ++i) ++r.confusion[y_true[i]][y_pred[i]];
  for (int c = 0; c < 2; ++c) {
    std::int64_t tp = r.confusion[c][c];
    std::int64_t fp = r.confusion[1 - c][c];
    std::int64_t fn = r.confusion[c][1 - c];
    auto& m = r.per_class[c];
    m.support = tp + fn;
    m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = m.support > 0 ? static_cast<double>(tp) / static_cast<double>(m.support) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
  }
  double n = static_cast<double>(y_true.size());
  r.weighted.support = static_cast<std::int64_t>(y_true.size());
  for (int c = 0; c < 2; ++c) {
    double w = static_cast<double>(r.per_class[c].support) / n;
    r.weighted.precision += w * r.per_class[c].precision;
    r.weighted.recall += w * r.per_class[c].recall;
    r.weighted.f1 += w * r.per_class[c].f1;
  }
  return r;
}

inline ClassifierEvalReport evaluate_classifier(const RandomForestModel& model,
                                                const std::vector<FeatureRow>& X,
                                                const std::vector<int>& y) {
  std::vector<int> pred;
  pred.reserve(X.size());
  for (const auto& row : X) pred.push_back(predict(model, row).label);
  return evaluate_classifier(y, pred);
}

// --- serialization ---

inline constexpr int kForestFormatVersion = 1;

inline nlohmann::json forest_to_json(const RandomForestModel& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : model.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      if (n.is_leaf) {
        nodes.push_back({{"counts", {n.class_counts[0], n.class_counts[1]}}});
      } else {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"counts", {n.class_counts[0], n.class_counts[1]}}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  return {{"format_version", kForestFormatVersion},
          {"dim", model.dim},
          {"config",
           {{"n_trees", model.config.n_trees},
            {"max_depth", model.config.max_depth},
            {"mtry", model.config.mtry},
            {"min_leaf_size", model.config.min_leaf_size},
            {"bootstrap", model.config.bootstrap},
            {"seed", model.config.seed}}},
          {"trees", std::move(trees)}};
}

inline RandomForestModel forest_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kForestFormatVersion)
    throw ParseError("forest model: unsupported format version");
  RandomForestModel model;
  model.dim = j.at("dim").get<int>();
  const auto& cj = j.at("config");
  model.config.n_trees = cj.at("n_trees").get<int>();
  model.config.max_depth = cj.at("max_depth").get<int>();
  model.config.mtry = cj.at("mtry").get<int>();
  model.config.min_leaf_size = cj.at("min_leaf_size").get<int>();
  model.config.bootstrap = cj.at("bootstrap").get<bool>();
  model.config.seed = cj.at("seed").get<std::uint64_t>();
  for (const auto& tj : j.at("trees")) {
    DecisionTree tree;
    for (const auto& nj : tj) {
      TreeNode n;
      n.class_counts[0] = nj.at("counts").at(0).get<std::int64_t>();
      n.class_counts[1] = nj.at("counts").at(1).get<std::int64_t>();
      if (nj.contains("feature")) {
        n.is_leaf = false;
        n.feature = nj.at("feature").get<int>();
        n.threshold = nj.at("threshold").get<double>();
        n.left = nj.at("left").get<int>();
        n.right = nj.at("right").get<int>();
      }
      tree.nodes.push_back(n);
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace paperharvest::forest
