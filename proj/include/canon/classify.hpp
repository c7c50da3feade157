#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "canon/distance.hpp"
#include "canon/dtm.hpp"

namespace canon {

/// Feature rows with one book label each.
struct LabeledDataset {
  RealMatrix features;
  std::vector<BookId> labels;
  std::vector<RowLabel> rows;
  std::vector<BookLabel> books;  ///< class t is books[t]
  Vocabulary vocab;

  std::size_t n() const noexcept { return features.rows(); }
  std::size_t p() const noexcept { return features.cols(); }
  std::size_t num_classes() const noexcept { return books.size(); }

  /// Rows `indices` in the given order; classes and vocabulary are kept.
  LabeledDataset subset(std::span<const std::size_t> indices) const;
};

enum class FeatureMode { Counts, Tfidf };

std::string_view to_string(FeatureMode f) noexcept;
FeatureMode parse_feature_mode(std::string_view name);

LabeledDataset make_dataset(const DocTermMatrix& dtm);
LabeledDataset make_dataset(const WeightMatrix& weights);
LabeledDataset make_dataset(const DocTermMatrix& dtm, FeatureMode mode);

// ---- hyperparameters ------------------------------------------------------

struct MnbParams {
  double alpha = 1.0;

  friend bool operator==(const MnbParams&, const MnbParams&) = default;
};

struct KnnParams {
  std::size_t k = 5;
  Measure measure = Measure::Euclidean;

  friend bool operator==(const KnnParams&, const KnnParams&) = default;
};

struct SvmParams {
  double lambda = 1e-3;
  std::size_t epochs = 20;

  friend bool operator==(const SvmParams&, const SvmParams&) = default;
};

struct RfParams {
  std::size_t trees = 100;
  std::optional<std::size_t> max_depth;          ///< unlimited when empty
  std::optional<std::size_t> features_per_split;  ///< ceil(sqrt(p)) when empty

  friend bool operator==(const RfParams&, const RfParams&) = default;
};

using Params = std::variant<MnbParams, KnnParams, SvmParams, RfParams>;

/// Short model name: mnb, knn, svm or rf.
std::string_view model_name(const Params& params) noexcept;
/// Compact "key=value;key=value" rendering, stable across runs.
std::string describe(const Params& params);

// ---- models ---------------------------------------------------------------

struct MnbModel {
  MnbParams params;
  std::size_t p = 0;
  std::vector<double> log_priors;       ///< T; -inf for classes absent from training
  std::vector<double> log_likelihoods;  ///< T x p, row-major

  friend bool operator==(const MnbModel&, const MnbModel&) = default;
};

struct KnnModel {
  KnnParams params;
  std::size_t classes = 0;
  RealMatrix features;
  std::vector<BookId> labels;

  friend bool operator==(const KnnModel&, const KnnModel&) = default;
};

struct SvmModel {
  SvmParams params;
  std::size_t p = 0;
  std::vector<double> weights;  ///< T x p, row-major
  std::vector<double> biases;   ///< decision value is w.x - b
  /// Per class, the hinge objective of the running average of all iterates
  /// at the end of each epoch.
  std::vector<std::vector<double>> objective_trace;

  friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

struct TreeNode {
  std::int32_t feature = -1;  ///< -1 marks a leaf
  double threshold = 0.0;     ///< x[feature] <= threshold goes left
  std::uint32_t left = 0, right = 0;
  std::vector<std::uint32_t> distribution;  ///< leaf class counts

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  ///< nodes[0] is the root

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct RfModel {
  RfParams params;  ///< features_per_split resolved at training time
  std::uint64_t seed = 0;
  std::size_t classes = 0;
  std::size_t p = 0;
  std::vector<DecisionTree> trees;

  friend bool operator==(const RfModel&, const RfModel&) = default;
};

using Model = std::variant<MnbModel, KnnModel, SvmModel, RfModel>;

/// Number of classes a model scores.
std::size_t num_classes(const Model& model) noexcept;
std::size_t num_features(const Model& model) noexcept;

// ---- training -------------------------------------------------------------

/// Laplace-smoothed multinomial naive Bayes. Throws EmptyClass when the
/// training set has no rows, InvalidHyperparameter when alpha <= 0.
MnbModel train_mnb(const LabeledDataset& data, const MnbParams& params);

/// Stores the training rows. Throws InvalidHyperparameter when k is 0 or
/// exceeds the number of rows.
KnnModel train_knn(const LabeledDataset& data, const KnnParams& params);

/// One-vs-rest linear SVM by averaged stochastic subgradient descent on
/// (1/m) sum hinge + lambda |w|^2, step 1/(2 lambda t), with projection onto
/// |w|^2 <= 1/lambda. Throws NonFiniteObjective on divergence.
SvmModel train_svm(const LabeledDataset& data, const SvmParams& params, std::uint64_t seed);

/// Bootstrap forest of Gini CART trees. Throws InvalidHyperparameter when
/// features_per_split is 0 or exceeds p.
RfModel train_rf(const LabeledDataset& data, const RfParams& params, std::uint64_t seed);

Model train(const LabeledDataset& data, const Params& params, std::uint64_t seed);

// ---- prediction -----------------------------------------------------------

struct Prediction {
  BookId label = 0;
  /// MNB: posteriors. KNN, RF: vote shares. SVM: decision values.
  std::vector<double> scores;
};

/// Throws DimensionMismatch when the row is wider than the model's p.
Prediction classify(const Model& model, const RealMatrix::RowView& x);
Prediction classify(const Model& model, std::span<const double> dense_x);
std::vector<Prediction> classify_all(const Model& model, const RealMatrix& rows);

/// Index of the largest score, smallest index on ties.
BookId argmax(std::span<const double> scores) noexcept;

/// Hinge objective (1/m) sum max(0, 1 - y (w.x - b)) + lambda (|w|^2 + b^2)
/// for labels y in {-1, +1}. The bias is regularized like a weight.
double hinge_objective(const RealMatrix& x, std::span<const int> y, std::span<const double> w, double b,
                       double lambda);

enum class KernelKind { Linear, Rbf };

/// linear: x.y; rbf: exp(-gamma |x - y|^2).
double kernel(std::span<const double> x, std::span<const double> y, KernelKind kind, double gamma = 1.0);

// ---- export ---------------------------------------------------------------

std::string serialize_model(const Model& model);
Model deserialize_model(std::string_view text);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

/// CSV `doc_label,true,predicted,score_0..score_{T-1}`.
std::string scores_csv(const LabeledDataset& data, std::span<const Prediction> predictions);

}  // namespace canon
