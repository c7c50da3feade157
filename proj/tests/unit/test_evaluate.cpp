#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "canon/evaluate.hpp"
#include "canon/random.hpp"
#include "helpers.hpp"

using namespace canon;
using test::code_of;
using V = std::vector<double>;

namespace {

LabeledDataset make_data(const std::vector<V>& rows, std::vector<BookId> labels, std::size_t classes) {
  LabeledDataset d;
  d.features = RealMatrix(rows.front().size());
  for (const auto& r : rows) d.features.push_dense_row(r);
  d.labels = std::move(labels);
  for (std::size_t t = 0; t < classes; ++t) d.books.push_back({static_cast<BookId>(t), "c" + std::to_string(t)});
  for (std::size_t i = 0; i < d.labels.size(); ++i) d.rows.push_back({d.books[d.labels[i]], static_cast<std::uint32_t>(i + 1)});
  return d;
}

LabeledDataset toy(FeatureMode mode = FeatureMode::Counts) {
  const auto manifest = test::source_dir() / "data/toy/manifest.txt";
  return make_dataset(build_dtm(load_corpus(manifest.parent_path(), read_manifest(manifest))), mode);
}

// Always predicts class 0.
Model constant_model(std::size_t p) {
  MnbModel m;
  m.p = p;
  m.log_priors = {0.0, -std::numeric_limits<double>::infinity()};
  m.log_likelihoods.assign(2 * p, 0.0);
  return m;
}

}  // namespace

TEST_CASE("fold shapes") {
  const auto loo = make_folds(10, 10, 42);
  CHECK(loo.sizes() == std::vector<std::size_t>(10, 1));

  const auto f = make_folds(7, 3, 42);
  auto sizes = f.sizes();
  std::sort(sizes.rbegin(), sizes.rend());
  CHECK(sizes == std::vector<std::size_t>{3, 2, 2});

  CHECK(make_folds(50, 7, 1).fold_of == make_folds(50, 7, 1).fold_of);
  CHECK(make_folds(50, 7, 1).fold_of != make_folds(50, 7, 2).fold_of);

  CHECK(code_of([] { make_folds(5, 6, 1); }) == ErrorCode::TooManyFolds);
  CHECK(code_of([] { make_folds(5, 1, 1); }) == ErrorCode::TooManyFolds);
}

TEST_CASE("folds partition the index set") {
  SplitMix64 rng(61);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng.below(100), m = 2 + rng.below(n - 1);
    const auto f = make_folds(n, m, rng.next());
    const auto sizes = f.sizes();
    CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
    std::set<std::size_t> seen;
    for (std::size_t k = 0; k < m; ++k) {
      const auto test_idx = f.test_indices(k), train_idx = f.train_indices(k);
      CHECK(!test_idx.empty());
      CHECK(test_idx.size() + train_idx.size() == n);
      for (auto i : test_idx) CHECK(seen.insert(i).second);
    }
    CHECK(seen.size() == n);
  }
}

TEST_CASE("stratified folds spread every class") {
  std::vector<BookId> labels;
  for (BookId c = 0; c < 3; ++c) labels.insert(labels.end(), 10 * (c + 1), c);
  const auto f = make_stratified_folds(labels, 5, 42);
  CHECK(f.stratified);
  const auto sizes = f.sizes();
  CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
  for (BookId c = 0; c < 3; ++c) {
    std::vector<std::size_t> per_fold(5, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) ++per_fold[f.fold_of[i]];
    }
    CHECK(*std::max_element(per_fold.begin(), per_fold.end()) - *std::min_element(per_fold.begin(), per_fold.end()) <= 1);
  }
}

TEST_CASE("accuracy") {
  ConfusionMatrix cm(2);
  cm.add(0, 0, 3);
  cm.add(0, 1, 1);
  cm.add(1, 0, 2);
  cm.add(1, 1, 4);
  CHECK(accuracy(cm) == 0.7);
  CHECK(cm.total() == 10);
  CHECK(cm.support(0) == 4);

  ConfusionMatrix diag(3), off(3);
  for (BookId t = 0; t < 3; ++t) {
    diag.add(t, t, 5);
    off.add(t, (t + 1) % 3, 5);
  }
  CHECK(accuracy(diag) == 1.0);
  CHECK(accuracy(off) == 0.0);
  CHECK(code_of([] { accuracy(ConfusionMatrix(2)); }) == ErrorCode::EmptyInput);
}

TEST_CASE("one-vs-rest accuracy is never below multiclass accuracy") {
  SplitMix64 rng(67);
  for (int t = 0; t < 100; ++t) {
    const std::size_t T = 2 + rng.below(8);
    ConfusionMatrix cm(T);
    for (int s = 0; s < 60; ++s) cm.add(static_cast<BookId>(rng.below(T)), static_cast<BookId>(rng.below(T)));
    const double acc = accuracy(cm);
    for (double a : one_vs_rest_accuracy(cm)) CHECK(a >= acc - 1e-15);
  }
  ConfusionMatrix cm(2);
  cm.add(0, 0, 3);
  cm.add(0, 1, 1);
  cm.add(1, 0, 2);
  cm.add(1, 1, 4);
  // With two classes the collapse is the binary formula for both classes.
  CHECK(one_vs_rest_accuracy(cm) == std::vector<double>{0.7, 0.7});
}

TEST_CASE("cross-validation equals a fold-by-fold run") {
  const auto d = toy();
  const auto folds = make_folds(d.n(), 3, 42);
  const Params params = MnbParams{1.0};
  const auto cv = cross_validate(make_trainer(params), d, folds, 42);

  ConfusionMatrix cm(d.num_classes());
  std::vector<double> per_fold;
  const SplitMix64 root = SplitMix64(42).split("cv");
  for (std::size_t f = 0; f < 3; ++f) {
    const auto model = train(d.subset(folds.train_indices(f)), params, root.split(static_cast<std::uint64_t>(f)).next());
    std::size_t ok = 0;
    const auto test_idx = folds.test_indices(f);
    for (auto i : test_idx) {
      const auto pred = classify(model, d.features.row(i)).label;
      cm.add(d.labels[i], pred);
      ok += pred == d.labels[i];
      CHECK(cv.predictions[i] == pred);
    }
    per_fold.push_back(static_cast<double>(ok) / static_cast<double>(test_idx.size()));
  }
  CHECK(cv.confusion == cm);
  CHECK(cv.fold_accuracy == per_fold);
  CHECK(cv.pooled_accuracy == accuracy(cm));
  CHECK(cv.confusion.total() == d.n());
}

TEST_CASE("cross-validation reference points") {
  // Each point appears twice, so 1-NN always finds its twin.
  std::vector<V> rows;
  std::vector<BookId> labels;
  for (int i = 0; i < 10; ++i) {
    for (int twin = 0; twin < 2; ++twin) {
      rows.push_back({static_cast<double>(i), i < 5 ? 0.0 : 10.0});
      labels.push_back(i < 5 ? 0 : 1);
    }
  }
  const auto d = make_data(rows, labels, 2);
  const auto memorize = cross_validate(make_trainer(KnnParams{1, Measure::Euclidean}), d, make_folds(d.n(), 5, 9), 1);
  CHECK(memorize.pooled_accuracy == 1.0);

  const Trainer constant = [](const LabeledDataset& data, std::uint64_t) { return constant_model(data.p()); };
  const auto base = cross_validate(constant, d, make_folds(d.n(), 4, 3), 1);
  CHECK(base.pooled_accuracy == 0.5);
  CHECK(code_of([&] { cross_validate(constant, d, make_folds(5, 2, 1), 1); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("grid search picks the known optimum") {
  // Two tight, far-apart clusters where the majority class is 0.
  std::vector<V> rows;
  std::vector<BookId> labels;
  for (int i = 0; i < 12; ++i) {
    const bool b = i >= 8;
    rows.push_back({(b ? 100.0 : 0.0) + i * 0.01});
    labels.push_back(b ? 1 : 0);
  }
  const auto d = make_data(rows, labels, 2);
  const auto folds = make_folds(d.n(), 4, 42);
  const std::size_t n_train = d.n() - 3;
  const std::vector<Params> grid{KnnParams{n_train, Measure::Euclidean}, KnnParams{1, Measure::Euclidean}};
  const auto g = grid_search(grid, d, folds, 42);
  CHECK(g.best == 1);
  CHECK(g.best_accuracy() == 1.0);
  CHECK(g.results[0].pooled_accuracy == doctest::Approx(8.0 / 12.0));
  for (const auto& r : g.results) CHECK(g.best_accuracy() >= r.pooled_accuracy);
  CHECK(std::get<KnnModel>(g.best_model).features.rows() == d.n());

  const std::vector<Params> single{MnbParams{0.5}};
  CHECK(grid_search(single, d, folds, 1).best == 0);
  // Ties go to the first grid point.
  const std::vector<Params> tied{KnnParams{1, Measure::Euclidean}, KnnParams{1, Measure::Manhattan}};
  CHECK(grid_search(tied, d, folds, 1).best == 0);
  CHECK(code_of([&] { grid_search(std::span<const Params>{}, d, folds, 1); }) == ErrorCode::EmptyGrid);
}

TEST_CASE("grid search is deterministic") {
  const auto d = toy(FeatureMode::Tfidf);
  const auto folds = make_folds(d.n(), 3, 42);
  const std::vector<Params> grid{RfParams{20, std::nullopt, std::nullopt}, RfParams{20, 3, std::nullopt}};
  const auto a = grid_search(grid, d, folds, 42), b = grid_search(grid, d, folds, 42);
  CHECK(a.best == b.best);
  CHECK(a.best_model == b.best_model);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(a.results[i].predictions == b.results[i].predictions);
    CHECK(a.results[i].fold_accuracy == b.results[i].fold_accuracy);
  }
}

TEST_CASE("benchmark on the toy corpus") {
  const auto counts = toy(), weights = toy(FeatureMode::Tfidf);
  const auto folds = make_folds(counts.n(), 3, 42);
  Grids g;
  g.mnb = {MnbParams{0.5}, MnbParams{1.0}};
  g.svm = {SvmParams{1e-2, 10}};
  g.rf = {RfParams{20, std::nullopt, std::nullopt}};
  g.knn = {KnnParams{1, Measure::Euclidean}, KnnParams{3, Measure::Euclidean}, KnnParams{9, Measure::Euclidean}};
  const auto b = benchmark_all(counts, weights, folds, g, 42);
  REQUIRE(b.rows.size() == 4);
  CHECK(b.rows[0].model == "mnb");
  CHECK(b.rows[1].model == "svm");
  CHECK(b.rows[2].model == "rf");
  CHECK(b.rows[3].model == "knn");
  for (const auto& row : b.rows) {
    CHECK(row.search.best_accuracy() >= 0.0);
    CHECK(row.search.best_accuracy() <= 1.0);
    CHECK(row.search.results.front().confusion.total() == counts.n());
  }
  // k = 9 exceeds the 8-row training split and is dropped.
  CHECK(b.rows[3].search.grid.size() == 2);

  const auto again = benchmark_all(counts, weights, folds, g, 42);
  CHECK(comparison_csv(again) == comparison_csv(b));
  const auto csv = comparison_csv(b);
  CHECK(csv.rfind("model,best_params,cv_accuracy\nmnb,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("exports") {
  const auto f = make_folds(4, 2, 1);
  const auto csv = folds_csv(f);
  CHECK(csv.rfind("doc_index,fold\n0,", 0) == 0);
  ConfusionMatrix cm(2);
  cm.add(0, 0, 2);
  cm.add(1, 0, 1);
  const std::vector<BookLabel> books{{0, "Quran"}, {1, "Bible, KJV"}};
  CHECK(confusion_csv(cm, books) == "true\\predicted,Quran,\"Bible, KJV\"\nQuran,2,0\n\"Bible, KJV\",1,0\n");
  CHECK(confusion_svg(cm, books, "mnb").find("<svg") != std::string::npos);
}
