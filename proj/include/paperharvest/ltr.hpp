#pragma once

// Homepage ranking models: a pairwise-hinge linear ranker plus the pointwise
// baselines (Bernoulli naive Bayes, logistic regression, linear SVM), with
// per-query evaluation and seeded k-fold splitting.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "paperharvest/errors.hpp"
#include "paperharvest/features.hpp"

namespace paperharvest::ltr {

using features::PreferencePair;
using features::RankInstance;
using features::RankLabel;

struct TrainConfig {
  int epochs = 50;
  double learning_rate = 0.1;
  double lambda = 1e-4;  // L2 strength; plays the role of SVM C via lambda = 1/C
  std::uint64_t seed = 42;
  bool shuffle = true;
};

struct LinearRankModel {
  std::vector<double> weights;
  TrainConfig config;

  double score(const RankInstance& inst) const {
    double s = 0.0;
    for (const auto& [idx, val] : inst.vector) {
      if (idx < 0 || idx >= static_cast<int>(weights.size()))
        throw InvalidInputError("score: feature index " + std::to_string(idx) +
                                " out of range for dim " + std::to_string(weights.size()));
      s += weights[static_cast<std::size_t>(idx)] * val;
    }
    return s;
  }
};

// Per-epoch diagnostics, measured by a full pass after each epoch's updates.
struct RankTrainTrace {
  std::vector<double> epoch_avg_hinge;   // (1/N) sum max(0, 1 - w·(x+ - x-))
  std::vector<int> epoch_violated_pairs;  // pairs with w·(x+ - x-) <= 0
};

namespace detail {

inline double pair_margin(const std::vector<double>& w, const PreferencePair& p) {
  double m = 0.0;
  for (const auto& [idx, val] : p.preferred.vector) m += w[static_cast<std::size_t>(idx)] * val;
  for (const auto& [idx, val] : p.other.vector) m -= w[static_cast<std::size_t>(idx)] * val;
  return m;
}

inline void check_pair_dims(const std::vector<PreferencePair>& pairs, int dim) {
  for (const auto& p : pairs) {
    for (const auto* inst : {&p.preferred, &p.other}) {
      for (const auto& [idx, val] : inst->vector) {
        (void)val;
        if (idx < 0 || idx >= dim)
          throw InvalidInputError("train_rank_svm: feature index " + std::to_string(idx) +
                                  " outside dim " + std::to_string(dim));
      }
    }
  }
}

}  // namespace detail

// Stochastic subgradient descent on the averaged pairwise hinge loss with L2
// regularization. Deterministic for a fixed (pair order, config).
inline LinearRankModel train_rank_svm(const std::vector<PreferencePair>& pairs, int dim,
                                      const TrainConfig& config,
                                      RankTrainTrace* trace = nullptr) {
  if (pairs.empty()) throw InvalidInputError("train_rank_svm: empty pair list");
  if (dim <= 0) throw InvalidInputError("train_rank_svm: dim must be positive");
  detail::check_pair_dims(pairs, dim);

  std::vector<double> w(static_cast<std::size_t>(dim), 0.0);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const auto& p = pairs[i];
      double margin = detail::pair_margin(w, p);
      if (config.lambda > 0.0) {
        double decay = 1.0 - 2.0 * config.learning_rate * config.lambda;
        if (decay < 0.0) decay = 0.0;
        for (double& wi : w) wi *= decay;
      }
      if (margin < 1.0) {
        for (const auto& [idx, val] : p.preferred.vector)
          w[static_cast<std::size_t>(idx)] += config.learning_rate * val;
        for (const auto& [idx, val] : p.other.vector)
          w[static_cast<std::size_t>(idx)] -= config.learning_rate * val;
      }
    }
    if (trace) {
      double loss = 0.0;
      int violated = 0;
      for (const auto& p : pairs) {
        double margin = detail::pair_margin(w, p);
        loss += std::max(0.0, 1.0 - margin);
        if (margin <= 0.0) ++violated;
      }
      trace->epoch_avg_hinge.push_back(loss / static_cast<double>(pairs.size()));
      trace->epoch_violated_pairs.push_back(violated);
    }
  }
  return {std::move(w), config};
}

// Scorer abstraction so pointwise models rank with the same argmax rule.
using ScoreFn = std::function<double(const RankInstance&)>;

// Highest score wins; ties go to the lower original search rank.
inline const search::SearchResult& predict_homepage(const search::ResultPage& page,
                                                    const std::vector<RankInstance>& instances,
                                                    const ScoreFn& score) {
  if (page.results.empty()) throw InvalidInputError("predict_homepage: empty result page");
  if (instances.size() != page.results.size())
    throw InvalidInputError("predict_homepage: instances do not match results");
  std::size_t best = 0;
  double best_score = score(instances[0]);
  for (std::size_t i = 1; i < instances.size(); ++i) {
    double s = score(instances[i]);
    bool better = s > best_score ||
                  (s == best_score && page.results[i].rank < page.results[best].rank);
    if (better) {
      best = i;
      best_score = s;
    }
  }
  return page.results[best];
}

inline const search::SearchResult& predict_homepage(const search::ResultPage& page,
                                                    const std::vector<RankInstance>& instances,
                                                    const LinearRankModel& model) {
  return predict_homepage(page, instances,
                          [&](const RankInstance& x) { return model.score(x); });
}

// --- pointwise baselines ---

enum class PointwiseKind { naive_bayes, logistic, linear_svm };

inline const char* pointwise_kind_name(PointwiseKind k) {
  switch (k) {
    case PointwiseKind::naive_bayes: return "naive_bayes";
    case PointwiseKind::logistic: return "logistic";
    case PointwiseKind::linear_svm: return "linear_svm";
  }
  return "?";
}

struct PointwiseModel {
  PointwiseKind kind = PointwiseKind::logistic;
  int dim = 0;
  // logistic / linear_svm
  std::vector<double> weights;
  double bias = 0.0;
  // naive_bayes (Bernoulli, add-one smoothing); index 0 = negative class
  double log_prior[2] = {0.0, 0.0};
  std::vector<double> log_p1[2];  // log P(feature on | class)
  std::vector<double> log_p0[2];  // log P(feature off | class)

  // Decision value usable as a ranking score: log-odds for naive bayes,
  // w·x + b for the linear models.
  double score(const RankInstance& inst) const {
    if (kind == PointwiseKind::naive_bayes) {
      double joint[2];
      for (int c = 0; c < 2; ++c) {
        joint[c] = log_prior[c];
        for (int f = 0; f < dim; ++f) joint[c] += log_p0[c][static_cast<std::size_t>(f)];
      }
      for (const auto& [idx, val] : inst.vector) {
        if (idx < 0 || idx >= dim) throw InvalidInputError("pointwise score: index out of range");
        if (val > 0.0) {
          for (int c = 0; c < 2; ++c) {
            joint[c] -= log_p0[c][static_cast<std::size_t>(idx)];
            joint[c] += log_p1[c][static_cast<std::size_t>(idx)];
          }
        }
      }
      return joint[1] - joint[0];
    }
    double s = bias;
    for (const auto& [idx, val] : inst.vector) {
      if (idx < 0 || idx >= dim) throw InvalidInputError("pointwise score: index out of range");
      s += weights[static_cast<std::size_t>(idx)] * val;
    }
    return s;
  }

  bool predict_positive(const RankInstance& inst) const { return score(inst) > 0.0; }
};

inline PointwiseModel train_pointwise(const std::vector<RankInstance>& instances,
                                      PointwiseKind kind, int dim, const TrainConfig& config) {
  if (instances.empty()) throw InvalidInputError("train_pointwise: empty training set");
  std::size_t positives = 0;
  for (const auto& inst : instances)
    if (inst.label == RankLabel::homepage) ++positives;
  if (positives == 0 || positives == instances.size())
    throw DegenerateTrainingError("train_pointwise: training data has a single class");

  PointwiseModel model;
  model.kind = kind;
  model.dim = dim;

  if (kind == PointwiseKind::naive_bayes) {
    std::size_t n = instances.size();
    std::size_t count[2] = {n - positives, positives};
    std::vector<double> on_count[2];
    for (int c = 0; c < 2; ++c) on_count[c].assign(static_cast<std::size_t>(dim), 0.0);
    for (const auto& inst : instances) {
      int c = inst.label == RankLabel::homepage ? 1 : 0;
      for (const auto& [idx, val] : inst.vector) {
        if (idx < 0 || idx >= dim) throw InvalidInputError("train_pointwise: index out of range");
        if (val > 0.0) on_count[c][static_cast<std::size_t>(idx)] += 1.0;
      }
    }
    for (int c = 0; c < 2; ++c) {
      model.log_prior[c] =
          std::log(static_cast<double>(count[c]) / static_cast<double>(n));
      model.log_p1[c].resize(static_cast<std::size_t>(dim));
      model.log_p0[c].resize(static_cast<std::size_t>(dim));
      for (int f = 0; f < dim; ++f) {
        double p1 = (on_count[c][static_cast<std::size_t>(f)] + 1.0) /
                    (static_cast<double>(count[c]) + 2.0);
        model.log_p1[c][static_cast<std::size_t>(f)] = std::log(p1);
        model.log_p0[c][static_cast<std::size_t>(f)] = std::log(1.0 - p1);
      }
    }
    return model;
  }

  // logistic / linear_svm: seeded SGD with L2 decay, labels in {-1,+1}
  model.weights.assign(static_cast<std::size_t>(dim), 0.0);
  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const auto& inst = instances[i];
      double y = inst.label == RankLabel::homepage ? 1.0 : -1.0;
      double s = model.bias;
      for (const auto& [idx, val] : inst.vector) {
        if (idx < 0 || idx >= dim) throw InvalidInputError("train_pointwise: index out of range");
        s += model.weights[static_cast<std::size_t>(idx)] * val;
      }
      double grad_scale;  // coefficient of x in the loss subgradient
      if (kind == PointwiseKind::logistic) {
        grad_scale = -y / (1.0 + std::exp(y * s));
      } else {
        grad_scale = (y * s < 1.0) ? -y : 0.0;
      }
      if (config.lambda > 0.0) {
        double decay = 1.0 - 2.0 * config.learning_rate * config.lambda;
        if (decay < 0.0) decay = 0.0;
        for (double& wi : model.weights) wi *= decay;
      }
      if (grad_scale != 0.0) {
        for (const auto& [idx, val] : inst.vector)
          model.weights[static_cast<std::size_t>(idx)] -= config.learning_rate * grad_scale * val;
        model.bias -= config.learning_rate * grad_scale;
      }
    }
  }
  return model;
}

// --- evaluation ---

struct PerQueryPrediction {
  std::string query_id;
  int predicted_rank = 0;
  int true_rank = 0;
};

struct RankEvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<PerQueryPrediction> per_query;

  double accuracy() const { return f1; }  // one prediction per query makes all three equal
};

struct LabeledQueryInstances {
  search::ResultPage page;
  std::vector<RankInstance> instances;  // labels set, aligned with page.results
  int homepage_rank = 0;
};

// Per-query prediction: one predicted homepage per query, so precision,
// recall, and F1 all equal the fraction of queries predicted correctly.
inline RankEvalReport evaluate_ranker(const std::vector<LabeledQueryInstances>& queries,
                                      const ScoreFn& score) {
  if (queries.empty()) throw InvalidInputError("evaluate_ranker: no queries");
  RankEvalReport report;
  std::size_t correct = 0;
  for (const auto& q : queries) {
    if (q.homepage_rank < 1) throw InvalidLabelingError("evaluate_ranker: query without homepage");
    const auto& predicted = predict_homepage(q.page, q.instances, score);
    report.per_query.push_back({q.page.query.id, predicted.rank, q.homepage_rank});
    if (predicted.rank == q.homepage_rank) ++correct;
  }
  double frac = static_cast<double>(correct) / static_cast<double>(queries.size());
  report.precision = report.recall = report.f1 = frac;
  return report;
}

inline RankEvalReport evaluate_ranker(const std::vector<LabeledQueryInstances>& queries,
                                      const LinearRankModel& model) {
  return evaluate_ranker(queries, [&](const RankInstance& x) { return model.score(x); });
}

// Seeded fold assignment: shuffle query indices, deal round-robin into k folds.
inline std::vector<std::vector<std::size_t>> kfold_assignment(std::size_t n, int k,
                                                              std::uint64_t seed) {
  if (k < 2 || static_cast<std::size_t>(k) > n)
    throw InvalidInputError("kfold_assignment: need 2 <= k <= #queries");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) folds[i % static_cast<std::size_t>(k)].push_back(idx[i]);
  return folds;
}

// --- serialization ---

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json train_config_to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"lambda", c.lambda},
          {"seed", c.seed},
          {"shuffle", c.shuffle}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.shuffle = j.at("shuffle").get<bool>();
  return c;
}

inline nlohmann::json rank_model_to_json(const LinearRankModel& m) {
  return {{"format_version", kModelFormatVersion},
          {"dim", m.weights.size()},
          {"weights", m.weights},
          {"config", train_config_to_json(m.config)}};
}

inline LinearRankModel rank_model_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kModelFormatVersion)
    throw ParseError("rank model: unsupported format version");
  LinearRankModel m;
  m.weights = j.at("weights").get<std::vector<double>>();
  if (m.weights.size() != j.at("dim").get<std::size_t>())
    throw ParseError("rank model: dim does not match weights");
  m.config = train_config_from_json(j.at("config"));
  return m;
}

inline nlohmann::json pointwise_model_to_json(const PointwiseModel& m) {
  nlohmann::json j = {{"format_version", kModelFormatVersion},
                      {"kind", pointwise_kind_name(m.kind)},
                      {"dim", m.dim}};
  if (m.kind == PointwiseKind::naive_bayes) {
    j["log_prior"] = {m.log_prior[0], m.log_prior[1]};
    j["log_p1"] = {m.log_p1[0], m.log_p1[1]};
    j["log_p0"] = {m.log_p0[0], m.log_p0[1]};
  } else {
    j["weights"] = m.weights;
    j["bias"] = m.bias;
  }
  return j;
}

inline PointwiseModel pointwise_model_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kModelFormatVersion)
    throw ParseError("pointwise model: unsupported format version");
  PointwiseModel m;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "naive_bayes") m.kind = PointwiseKind::naive_bayes;
  else if (kind == "logistic") m.kind = PointwiseKind::logistic;
  else if (kind == "linear_svm") m.kind = PointwiseKind::linear_svm;
  else throw ParseError("pointwise model: unknown kind " + kind);
  m.dim = j.at("dim").get<int>();
  if (m.kind == PointwiseKind::naive_bayes) {
    auto priors = j.at("log_prior");
    m.log_prior[0] = priors.at(0).get<double>();
    m.log_prior[1] = priors.at(1).get<double>();
    for (int c = 0; c < 2; ++c) {
      m.log_p1[c] = j.at("log_p1").at(c).get<std::vector<double>>();
      m.log_p0[c] = j.at("log_p0").at(c).get<std::vector<double>>();
    }
  } else {
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
  }
  return m;
}

}  // namespace paperharvest::ltr
