#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "simplegate/common.hpp"
#include "simplegate/json_util.hpp"

namespace simplegate {

inline constexpr double kVarianceFloor = 1e-9;

using FeatureMatrix = std::vector<std::vector<double>>;

struct Prediction {
  Label label = Label::No;
  double score = 0.0;  // NB: posterior p(Yes|x); SVM: signed margin
};

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;  // clamped at sqrt of the variance floor

  static Standardizer fit(const FeatureMatrix& rows) {
    Standardizer s;
    const std::size_t n = rows.size();
    const std::size_t dim = rows.empty() ? 0 : rows.front().size();
    s.mean.assign(dim, 0.0);
    s.stddev.assign(dim, 1.0);
    if (n == 0) return s;
    for (const auto& row : rows)
      for (std::size_t d = 0; d < dim; ++d) s.mean[d] += row[d];
    for (std::size_t d = 0; d < dim; ++d) s.mean[d] /= static_cast<double>(n);
    std::vector<double> var(dim, 0.0);
    for (const auto& row : rows)
      for (std::size_t d = 0; d < dim; ++d) {
        double diff = row[d] - s.mean[d];
        var[d] += diff * diff;
      }
    for (std::size_t d = 0; d < dim; ++d) {
      var[d] /= static_cast<double>(n);
      s.stddev[d] = std::sqrt(var[d] < kVarianceFloor ? kVarianceFloor : var[d]);
    }
    return s;
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> out(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) out[d] = (x[d] - mean[d]) / stddev[d];
    return out;
  }
};

// Training summary carried inside model files; `data_hash` lets the
// evaluator warn when test data matches the training data.
struct ModelMeta {
  long long n_yes = 0;
  long long n_no = 0;
  std::vector<double> feature_means;
  std::string data_hash;
};

struct NBModel {
  double prior_yes = 0.5;
  double prior_no = 0.5;
  std::vector<double> mean_yes, var_yes;
  std::vector<double> mean_no, var_no;
  ModelMeta meta;

  std::size_t dim() const { return mean_yes.size(); }
};

namespace detail {

inline void validate_training_input(const FeatureMatrix& rows, const std::vector<Label>& labels) {
  if (rows.size() != labels.size()) throw DataError("feature/label length mismatch");
  if (rows.size() < 2) throw DataError("degenerate training set: fewer than 2 rows");
  long long yes = 0, no = 0;
  for (Label l : labels) (l == Label::Yes ? yes : no) += 1;
  if (yes == 0 || no == 0) throw DataError("degenerate training set: single class");
  const std::size_t dim = rows.front().size();
  if (dim == 0) throw DataError("degenerate training set: zero-dimensional features");
  for (const auto& row : rows) {
    if (row.size() != dim) throw DataError("ragged feature matrix");
    for (double v : row)
      if (!std::isfinite(v)) throw DataError("non-finite feature value in training data");
  }
}

inline void validate_probe(std::span<const double> x, std::size_t dim) {
  if (x.size() != dim)
    throw DataError("feature vector has dimension " + std::to_string(x.size()) +
                    ", model expects " + std::to_string(dim));
  for (double v : x)
    if (!std::isfinite(v)) throw DataError("non-finite feature value");
}

inline ModelMeta make_meta(const FeatureMatrix& rows, const std::vector<Label>& labels) {
  ModelMeta meta;
  const std::size_t dim = rows.front().size();
  meta.feature_means.assign(dim, 0.0);
  for (const auto& row : rows)
    for (std::size_t d = 0; d < dim; ++d) meta.feature_means[d] += row[d];
  for (std::size_t d = 0; d < dim; ++d)
    meta.feature_means[d] /= static_cast<double>(rows.size());
  for (Label l : labels) (l == Label::Yes ? meta.n_yes : meta.n_no) += 1;
  return meta;
}

}  // namespace detail

// Gaussian Naive Bayes on raw features: class priors from frequencies,
// per-class population moments, variances clamped at the floor.
inline NBModel train_nb(const FeatureMatrix& rows, const std::vector<Label>& labels) {
  detail::validate_training_input(rows, labels);
  const std::size_t dim = rows.front().size();
  NBModel model;
  model.meta = detail::make_meta(rows, labels);
  const double n = static_cast<double>(rows.size());
  model.prior_yes = static_cast<double>(model.meta.n_yes) / n;
  model.prior_no = static_cast<double>(model.meta.n_no) / n;
  model.mean_yes.assign(dim, 0.0);
  model.mean_no.assign(dim, 0.0);
  model.var_yes.assign(dim, 0.0);
  model.var_no.assign(dim, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& mean = labels[i] == Label::Yes ? model.mean_yes : model.mean_no;
    for (std::size_t d = 0; d < dim; ++d) mean[d] += rows[i][d];
  }
  for (std::size_t d = 0; d < dim; ++d) {
    model.mean_yes[d] /= static_cast<double>(model.meta.n_yes);
    model.mean_no[d] /= static_cast<double>(model.meta.n_no);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& var = labels[i] == Label::Yes ? model.var_yes : model.var_no;
    const auto& mean = labels[i] == Label::Yes ? model.mean_yes : model.mean_no;
    for (std::size_t d = 0; d < dim; ++d) {
      double diff = rows[i][d] - mean[d];
      var[d] += diff * diff;
    }
  }
  for (std::size_t d = 0; d < dim; ++d) {
    model.var_yes[d] /= static_cast<double>(model.meta.n_yes);
    model.var_no[d] /= static_cast<double>(model.meta.n_no);
    if (model.var_yes[d] < kVarianceFloor) model.var_yes[d] = kVarianceFloor;
    if (model.var_no[d] < kVarianceFloor) model.var_no[d] = kVarianceFloor;
  }
  return model;
}

// Normalized class posteriors (p_yes, p_no) via log-sum-exp.
inline std::pair<double, double> nb_posteriors(const NBModel& model, std::span<const double> x) {
  detail::validate_probe(x, model.dim());
  auto log_joint = [&](double prior, const std::vector<double>& mean,
                       const std::vector<double>& var) {
    double ll = std::log(prior);
    for (std::size_t d = 0; d < x.size(); ++d) {
      double diff = x[d] - mean[d];
      ll += -0.5 * std::log(2.0 * std::numbers::pi * var[d]) - diff * diff / (2.0 * var[d]);
    }
    return ll;
  };
  double a_yes = log_joint(model.prior_yes, model.mean_yes, model.var_yes);
  double a_no = log_joint(model.prior_no, model.mean_no, model.var_no);
  double m = std::max(a_yes, a_no);
  double e_yes = std::exp(a_yes - m);
  double e_no = std::exp(a_no - m);
  double z = e_yes + e_no;
  return {e_yes / z, e_no / z};
}

// Label Yes iff p(Yes|x) > 0.5; an exact tie falls to No.
inline Prediction predict_nb(const NBModel& model, std::span<const double> x) {
  auto [p_yes, p_no] = nb_posteriors(model, x);
  return {p_yes > 0.5 ? Label::Yes : Label::No, p_yes};
}

struct SvmHyper {
  double lambda = 1e-3;
  int epochs = 50;
  std::uint64_t seed = 13;
};

struct SVMModel {
  std::vector<double> weights;  // in standardized feature space
  double bias = 0.0;
  Standardizer standardizer;
  SvmHyper hyper;
  ModelMeta meta;

  std::size_t dim() const { return weights.size(); }
};

// Pegasos objective: lambda/2 ||w||^2 + mean hinge loss, evaluated on
// pre-standardized rows.
inline double svm_objective(const std::vector<double>& weights, double bias, double lambda,
                            const FeatureMatrix& standardized_rows,
                            const std::vector<Label>& labels) {
  double norm2 = 0.0;
  for (double w : weights) norm2 += w * w;
  double hinge = 0.0;
  for (std::size_t i = 0; i < standardized_rows.size(); ++i) {
    double margin = bias;
    for (std::size_t d = 0; d < weights.size(); ++d)
      margin += weights[d] * standardized_rows[i][d];
    double y = labels[i] == Label::Yes ? 1.0 : -1.0;
    double loss = 1.0 - y * margin;
    if (loss > 0.0) hinge += loss;
  }
  return 0.5 * lambda * norm2 + hinge / static_cast<double>(standardized_rows.size());
}

// Primal stochastic subgradient descent on the regularized hinge loss
// with the 1/(lambda t) step schedule. The bias is updated on margin
// violations but not regularized. Deterministic given the seed; a run
// with fewer epochs is an exact prefix of a longer run.
inline SVMModel train_svm(const FeatureMatrix& rows, const std::vector<Label>& labels,
                          const SvmHyper& hyper = {}) {
  detail::validate_training_input(rows, labels);
  if (!(hyper.lambda > 0.0)) throw DataError("lambda must be > 0");
  if (hyper.epochs < 1) throw DataError("epochs must be >= 1");

  SVMModel model;
  model.hyper = hyper;
  model.meta = detail::make_meta(rows, labels);
  model.standardizer = Standardizer::fit(rows);

  const std::size_t n = rows.size();
  const std::size_t dim = rows.front().size();
  FeatureMatrix std_rows(n);
  for (std::size_t i = 0; i < n; ++i) model.standardizer.apply(rows[i]).swap(std_rows[i]);

  model.weights.assign(dim, 0.0);
  model.bias = 0.0;
  std::mt19937_64 rng(hyper.seed);
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t step = 0; step < n; ++step) {
      ++t;
      std::size_t i = static_cast<std::size_t>(rng() % n);
      double eta = 1.0 / (hyper.lambda * static_cast<double>(t));
      double margin = model.bias;
      for (std::size_t d = 0; d < dim; ++d) margin += model.weights[d] * std_rows[i][d];
      double y = labels[i] == Label::Yes ? 1.0 : -1.0;
      double shrink = 1.0 - 1.0 / static_cast<double>(t);
      for (double& w : model.weights) w *= shrink;
      if (y * margin < 1.0) {
        for (std::size_t d = 0; d < dim; ++d) model.weights[d] += eta * y * std_rows[i][d];
        model.bias += eta * y;
      }
    }
  }
  for (double w : model.weights)
    if (!std::isfinite(w)) throw DataError("SVM training diverged to non-finite weights");
  return model;
}

// Label Yes iff the signed margin is strictly positive; a zero margin
// falls to No.
inline Prediction predict_svm(const SVMModel& model, std::span<const double> x) {
  detail::validate_probe(x, model.dim());
  std::vector<double> z = model.standardizer.apply(x);
  double score = model.bias;
  for (std::size_t d = 0; d < z.size(); ++d) score += model.weights[d] * z[d];
  return {score > 0.0 ? Label::Yes : Label::No, score};
}

using ClassifierModel = std::variant<NBModel, SVMModel>;

inline Prediction predict(const ClassifierModel& model, std::span<const double> x) {
  return std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, NBModel>)
          return predict_nb(m, x);
        else
          return predict_svm(m, x);
      },
      model);
}

inline const char* model_kind(const ClassifierModel& model) {
  return std::holds_alternative<NBModel>(model) ? "nb" : "svm";
}

namespace detail {

inline nlohmann::json meta_to_json(const ModelMeta& meta) {
  return {{"n_yes", meta.n_yes},
          {"n_no", meta.n_no},
          {"feature_means", meta.feature_means},
          {"data_hash", meta.data_hash}};
}

inline ModelMeta meta_from_json(const nlohmann::json& j) {
  ModelMeta meta;
  meta.n_yes = j.value("n_yes", 0ll);
  meta.n_no = j.value("n_no", 0ll);
  if (j.contains("feature_means"))
    meta.feature_means = j["feature_means"].get<std::vector<double>>();
  meta.data_hash = j.value("data_hash", std::string());
  return meta;
}

}  // namespace detail

inline nlohmann::json model_to_json(const ClassifierModel& model) {
  nlohmann::json j;
  j["version"] = kFormatVersion;
  if (const NBModel* nb = std::get_if<NBModel>(&model)) {
    j["kind"] = "nb";
    j["prior_yes"] = nb->prior_yes;
    j["prior_no"] = nb->prior_no;
    j["mean_yes"] = nb->mean_yes;
    j["var_yes"] = nb->var_yes;
    j["mean_no"] = nb->mean_no;
    j["var_no"] = nb->var_no;
    j["meta"] = detail::meta_to_json(nb->meta);
  } else {
    const SVMModel& svm = std::get<SVMModel>(model);
    j["kind"] = "svm";
    j["weights"] = svm.weights;
    j["bias"] = svm.bias;
    j["standardizer"] = {{"mean", svm.standardizer.mean}, {"stddev", svm.standardizer.stddev}};
    j["hyper"] = {{"lambda", svm.hyper.lambda},
                  {"epochs", svm.hyper.epochs},
                  {"seed", svm.hyper.seed}};
    j["meta"] = detail::meta_to_json(svm.meta);
  }
  return j;
}

inline ClassifierModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version") || !j.contains("kind"))
    throw DataError("missing version/kind header in model document");
  int version = j["version"].get<int>();
  if (version != kFormatVersion)
    throw DataError("unsupported model version " + std::to_string(version));
  std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "nb") {
      NBModel nb;
      nb.prior_yes = j.at("prior_yes").get<double>();
      nb.prior_no = j.at("prior_no").get<double>();
      nb.mean_yes = j.at("mean_yes").get<std::vector<double>>();
      nb.var_yes = j.at("var_yes").get<std::vector<double>>();
      nb.mean_no = j.at("mean_no").get<std::vector<double>>();
      nb.var_no = j.at("var_no").get<std::vector<double>>();
      if (j.contains("meta")) nb.meta = detail::meta_from_json(j["meta"]);
      return nb;
    }
    if (kind == "svm") {
      SVMModel svm;
      svm.weights = j.at("weights").get<std::vector<double>>();
      svm.bias = j.at("bias").get<double>();
      svm.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
      svm.standardizer.stddev = j.at("standardizer").at("stddev").get<std::vector<double>>();
      svm.hyper.lambda = j.at("hyper").at("lambda").get<double>();
      svm.hyper.epochs = j.at("hyper").at("epochs").get<int>();
      svm.hyper.seed = j.at("hyper").at("seed").get<std::uint64_t>();
      if (j.contains("meta")) svm.meta = detail::meta_from_json(j["meta"]);
      return svm;
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed " + kind + " model document: " + e.what());
  }
  throw DataError("unknown model kind \"" + kind + "\"");
}

inline void save_model(const std::string& path, const ClassifierModel& model) {
  write_json_file(path, model_to_json(model));
}

inline ClassifierModel load_model(const std::string& path) {
  return model_from_json(load_json_file(path));
}

}  // namespace simplegate
