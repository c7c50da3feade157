#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "canon/classify.hpp"

namespace canon {

struct FoldAssignment {
  std::vector<std::uint32_t> fold_of;  ///< one fold id per sample
  std::size_t m = 0;
  std::uint64_t seed = 0;
  bool stratified = false;

  std::size_t n() const noexcept { return fold_of.size(); }
  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::vector<std::size_t> sizes() const;
};

/// Seeded shuffle, then round-robin dealing. Throws TooManyFolds unless
/// 2 <= m <= n.
FoldAssignment make_folds(std::size_t n, std::size_t m, std::uint64_t seed);

/// Same dealing, but samples are shuffled within each class and dealt class
/// by class so every fold gets a near-equal share of each class.
FoldAssignment make_stratified_folds(std::span<const BookId> labels, std::size_t m, std::uint64_t seed);

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes) : T_(classes), counts_(classes * classes, 0) {}

  void add(BookId truth, BookId predicted, std::uint64_t count = 1);
  std::size_t classes() const noexcept { return T_; }
  std::uint64_t operator()(std::size_t truth, std::size_t predicted) const { return counts_.at(truth * T_ + predicted); }
  std::uint64_t total() const noexcept;
  std::uint64_t support(std::size_t truth) const;
  std::uint64_t trace() const noexcept;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t T_ = 0;
  std::vector<std::uint64_t> counts_;
};

/// trace / total. Throws EmptyInput on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

/// Per class, (TP + TN) / (TP + TN + FP + FN) after a one-vs-rest collapse.
std::vector<double> one_vs_rest_accuracy(const ConfusionMatrix& cm);

using Trainer = std::function<Model(const LabeledDataset&, std::uint64_t seed)>;

Trainer make_trainer(const Params& params);

struct CvResult {
  std::vector<double> fold_accuracy;
  double mean_fold_accuracy = 0.0;
  double pooled_accuracy = 0.0;  ///< 1 - CV error under 0-1 loss
  ConfusionMatrix confusion;
  std::vector<BookId> predictions;          ///< out-of-fold, per sample
  std::vector<std::size_t> single_class_folds;  ///< folds whose training part had one class
};

/// Each sample is predicted by the model trained on every other fold. Fold
/// f trains with a seed derived from (seed, f).
CvResult cross_validate(const Trainer& trainer, const LabeledDataset& data, const FoldAssignment& folds,
                        std::uint64_t seed);

struct GridSearchResult {
  std::vector<Params> grid;
  std::vector<CvResult> results;
  std::size_t best = 0;
  Model best_model;

  const Params& best_params() const { return grid.at(best); }
  double best_accuracy() const { return results.at(best).pooled_accuracy; }
};

/// Every point shares `folds`. The best point has the highest pooled CV
/// accuracy, first in grid order on ties, and is retrained on all of `data`.
/// Throws EmptyGrid.
GridSearchResult grid_search(std::span<const Params> grid, const LabeledDataset& data, const FoldAssignment& folds,
                             std::uint64_t seed);

struct Grids {
  std::vector<Params> mnb, svm, rf, knn;

  static Grids defaults();
};

struct BenchmarkRow {
  std::string model;
  GridSearchResult search;
};

struct Benchmark {
  FoldAssignment folds;
  std::vector<BenchmarkRow> rows;  ///< mnb, svm, rf, knn
};

/// Grid search for all four classifiers on one shared fold assignment. MNB
/// reads `counts`; the others read `features`. Default KNN points whose k
/// exceeds the smallest training split are dropped.
Benchmark benchmark_all(const LabeledDataset& counts, const LabeledDataset& features, const FoldAssignment& folds,
                        const Grids& grids, std::uint64_t seed);

// ---- export ---------------------------------------------------------------

std::string folds_csv(const FoldAssignment& folds);
std::string confusion_csv(const ConfusionMatrix& cm, const std::vector<BookLabel>& books);
std::string confusion_svg(const ConfusionMatrix& cm, const std::vector<BookLabel>& books, std::string_view title);
/// `model,best_params,cv_accuracy`
std::string comparison_csv(const Benchmark& b);
/// Every grid point: `model,params,pooled_accuracy,mean_fold_accuracy`.
std::string grid_csv(const std::string& model, const GridSearchResult& g);
std::string fold_accuracy_csv(const CvResult& cv);

}  // namespace canon
