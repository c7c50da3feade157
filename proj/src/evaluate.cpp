#include "canon/evaluate.hpp"

#include <algorithm>
#include <numeric>

#include "canon/distance.hpp"
#include "canon/io.hpp"
#include "canon/random.hpp"

namespace canon {

// ---- folds ----------------------------------------------------------------

std::vector<std::size_t> FoldAssignment::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::sizes() const {
  std::vector<std::size_t> out(m, 0);
  for (auto f : fold_of) ++out[f];
  return out;
}

namespace {

void check_fold_count(std::size_t n, std::size_t m) {
  if (m < 2 || m > n) {
    throw Error(ErrorCode::TooManyFolds, std::to_string(m) + " folds for " + std::to_string(n) + " samples");
  }
}

}  // namespace

FoldAssignment make_folds(std::size_t n, std::size_t m, std::uint64_t seed) {
  check_fold_count(n, m);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  SplitMix64 rng = SplitMix64(seed).split("folds");
  rng.shuffle(std::span<std::size_t>(perm));
  FoldAssignment out{std::vector<std::uint32_t>(n), m, seed, false};
  for (std::size_t i = 0; i < n; ++i) out.fold_of[perm[i]] = static_cast<std::uint32_t>(i % m);
  return out;
}

FoldAssignment make_stratified_folds(std::span<const BookId> labels, std::size_t m, std::uint64_t seed) {
  const auto n = labels.size();
  check_fold_count(n, m);
  const BookId T = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::vector<std::size_t>> by_class(T);
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
  const SplitMix64 root = SplitMix64(seed).split("stratified_folds");
  FoldAssignment out{std::vector<std::uint32_t>(n), m, seed, true};
  std::size_t dealt = 0;
  for (BookId t = 0; t < T; ++t) {
    SplitMix64 rng = root.split(static_cast<std::uint64_t>(t));
    rng.shuffle(std::span<std::size_t>(by_class[t]));
    for (auto i : by_class[t]) out.fold_of[i] = static_cast<std::uint32_t>(dealt++ % m);
  }
  return out;
}

// ---- confusion ------------------------------------------------------------

void ConfusionMatrix::add(BookId truth, BookId predicted, std::uint64_t count) {
  if (truth >= T_ || predicted >= T_) throw Error(ErrorCode::InvariantViolation, "class outside confusion matrix");
  counts_[truth * T_ + predicted] += count;
}

std::uint64_t ConfusionMatrix::total() const noexcept { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

std::uint64_t ConfusionMatrix::support(std::size_t truth) const {
  std::uint64_t s = 0;
  for (std::size_t p = 0; p < T_; ++p) s += (*this)(truth, p);
  return s;
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t s = 0;
  for (std::size_t t = 0; t < T_; ++t) s += counts_[t * T_ + t];
  return s;
}

double accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw Error(ErrorCode::EmptyInput, "accuracy of an empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

std::vector<double> one_vs_rest_accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw Error(ErrorCode::EmptyInput, "accuracy of an empty confusion matrix");
  std::vector<double> out;
  for (std::size_t t = 0; t < cm.classes(); ++t) {
    std::uint64_t predicted_t = 0;
    for (std::size_t s = 0; s < cm.classes(); ++s) predicted_t += cm(s, t);
    const auto tp = cm(t, t);
    const auto fn = cm.support(t) - tp;
    const auto fp = predicted_t - tp;
    const auto tn = total - tp - fn - fp;
    out.push_back(static_cast<double>(tp + tn) / static_cast<double>(total));
  }
  return out;
}

// ---- cross-validation -----------------------------------------------------

Trainer make_trainer(const Params& params) {
  return [params](const LabeledDataset& data, std::uint64_t seed) { return train(data, params, seed); };
}

CvResult cross_validate(const Trainer& trainer, const LabeledDataset& data, const FoldAssignment& folds,
                        std::uint64_t seed) {
  if (folds.n() != data.n()) {
    throw Error(ErrorCode::DimensionMismatch, "fold assignment covers " + std::to_string(folds.n()) + " samples, data has " +
                                                  std::to_string(data.n()));
  }
  const SplitMix64 root = SplitMix64(seed).split("cv");
  CvResult out;
  out.confusion = ConfusionMatrix(data.num_classes());
  out.predictions.assign(data.n(), 0);
  for (std::size_t f = 0; f < folds.m; ++f) {
    const auto train_idx = folds.train_indices(f);
    const auto test_idx = folds.test_indices(f);
    const auto train_set = data.subset(train_idx);
    const auto first = train_set.labels.front();
    if (std::all_of(train_set.labels.begin(), train_set.labels.end(), [&](BookId y) { return y == first; })) {
      out.single_class_folds.push_back(f);
    }
    const Model model = trainer(train_set, root.split(static_cast<std::uint64_t>(f)).next());
    std::size_t correct = 0;
    for (auto i : test_idx) {
      const auto pred = classify(model, data.features.row(i)).label;
      out.predictions[i] = pred;
      out.confusion.add(data.labels[i], pred);
      if (pred == data.labels[i]) ++correct;
    }
    out.fold_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(test_idx.size()));
  }
  out.mean_fold_accuracy =
      std::accumulate(out.fold_accuracy.begin(), out.fold_accuracy.end(), 0.0) / static_cast<double>(folds.m);
  out.pooled_accuracy = accuracy(out.confusion);
  return out;
}

GridSearchResult grid_search(std::span<const Params> grid, const LabeledDataset& data, const FoldAssignment& folds,
                             std::uint64_t seed) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "grid search over an empty grid");
  GridSearchResult out;
  out.grid.assign(grid.begin(), grid.end());
  for (const auto& point : grid) {
    out.results.push_back(cross_validate(make_trainer(point), data, folds, seed));
    if (out.results.back().pooled_accuracy > out.results[out.best].pooled_accuracy) out.best = out.results.size() - 1;
  }
  for (const auto& r : out.results) {
    if (r.pooled_accuracy > out.best_accuracy()) throw Error(ErrorCode::InvariantViolation, "grid search missed the best point");
  }
  out.best_model = train(data, out.best_params(), SplitMix64(seed).split("final").next());
  return out;
}

Grids Grids::defaults() {
  Grids g;
  for (double a : {0.1, 0.5, 1.0, 2.0}) g.mnb.emplace_back(MnbParams{a});
  for (double l : {1e-4, 1e-3, 1e-2, 1e-1}) {
    for (std::size_t e : {20, 50}) g.svm.emplace_back(SvmParams{l, e});
  }
  for (std::size_t trees : {50, 200}) {
    g.rf.emplace_back(RfParams{trees, std::nullopt, std::nullopt});
    g.rf.emplace_back(RfParams{trees, 20, std::nullopt});
  }
  for (std::size_t k : {1, 3, 5, 7, 11, 21}) g.knn.emplace_back(KnnParams{k, Measure::Euclidean});
  return g;
}

Benchmark benchmark_all(const LabeledDataset& counts, const LabeledDataset& features, const FoldAssignment& folds,
                        const Grids& grids, std::uint64_t seed) {
  if (counts.n() != features.n()) throw Error(ErrorCode::DimensionMismatch, "count and feature datasets differ in rows");
  const auto sizes = folds.sizes();
  const auto smallest_train = counts.n() - *std::max_element(sizes.begin(), sizes.end());
  std::vector<Params> knn;
  for (const auto& point : grids.knn) {
    if (std::get<KnnParams>(point).k <= smallest_train) knn.push_back(point);
  }
  Benchmark out;
  out.folds = folds;
  out.rows.push_back({"mnb", grid_search(grids.mnb, counts, folds, seed)});
  out.rows.push_back({"svm", grid_search(grids.svm, features, folds, seed)});
  out.rows.push_back({"rf", grid_search(grids.rf, features, folds, seed)});
  out.rows.push_back({"knn", grid_search(knn, features, folds, seed)});
  return out;
}

// ---- export ---------------------------------------------------------------

std::string folds_csv(const FoldAssignment& folds) {
  std::string out = "doc_index,fold\n";
  for (std::size_t i = 0; i < folds.n(); ++i) out += std::to_string(i) + "," + std::to_string(folds.fold_of[i]) + "\n";
  return out;
}

std::string confusion_csv(const ConfusionMatrix& cm, const std::vector<BookLabel>& books) {
  if (books.size() != cm.classes()) throw Error(ErrorCode::DimensionMismatch, "one book name per class required");
  std::string out = "true\\predicted";
  for (const auto& b : books) out += "," + io::csv_field(b.name);
  out += "\n";
  for (std::size_t t = 0; t < cm.classes(); ++t) {
    out += io::csv_field(books[t].name);
    for (std::size_t p = 0; p < cm.classes(); ++p) out += "," + std::to_string(cm(t, p));
    out += "\n";
  }
  return out;
}

std::string confusion_svg(const ConfusionMatrix& cm, const std::vector<BookLabel>& books, std::string_view title) {
  std::vector<double> values;
  std::vector<std::string> labels;
  for (std::size_t t = 0; t < cm.classes(); ++t) {
    labels.push_back(books.at(t).name);
    for (std::size_t p = 0; p < cm.classes(); ++p) values.push_back(static_cast<double>(cm(t, p)));
  }
  return heatmap_svg(values, labels, title);
}

std::string comparison_csv(const Benchmark& b) {
  std::string out = "model,best_params,cv_accuracy\n";
  for (const auto& row : b.rows) {
    out += row.model + "," + io::csv_field(describe(row.search.best_params())) + "," +
           io::format_double17(row.search.best_accuracy()) + "\n";
  }
  return out;
}

std::string grid_csv(const std::string& model, const GridSearchResult& g) {
  std::string out = "model,params,pooled_accuracy,mean_fold_accuracy\n";
  for (std::size_t i = 0; i < g.grid.size(); ++i) {
    out += model + "," + io::csv_field(describe(g.grid[i])) + "," + io::format_double17(g.results[i].pooled_accuracy) +
           "," + io::format_double17(g.results[i].mean_fold_accuracy) + "\n";
  }
  return out;
}

std::string fold_accuracy_csv(const CvResult& cv) {
  std::string out = "fold,accuracy\n";
  for (std::size_t f = 0; f < cv.fold_accuracy.size(); ++f) {
    out += std::to_string(f) + "," + io::format_double17(cv.fold_accuracy[f]) + "\n";
  }
  out += "mean," + io::format_double17(cv.mean_fold_accuracy) + "\npooled," + io::format_double17(cv.pooled_accuracy) + "\n";
  return out;
}

}  // namespace canon
