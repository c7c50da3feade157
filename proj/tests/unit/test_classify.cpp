#include <doctest.h>

#include <cmath>
#include <numeric>

#include "canon/classify.hpp"
#include "canon/dtm.hpp"
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
  for (std::size_t i = 0; i < rows.size(); ++i) d.rows.push_back({d.books[d.labels[i]], static_cast<std::uint32_t>(i + 1)});
  return d;
}

LabeledDataset toy(FeatureMode mode = FeatureMode::Counts) {
  const auto manifest = test::source_dir() / "data/toy/manifest.txt";
  return make_dataset(build_dtm(load_corpus(manifest.parent_path(), read_manifest(manifest))), mode);
}

// Random points around one centre per class.
LabeledDataset blobs(SplitMix64& rng, std::size_t n, std::size_t p, std::size_t classes) {
  std::vector<V> rows;
  std::vector<BookId> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<BookId>(i % classes);
    V r(p);
    for (std::size_t j = 0; j < p; ++j) r[j] = rng.uniform() + (j % classes == c ? 3.0 : 0.0);
    rows.push_back(r);
    labels.push_back(c);
  }
  return make_data(rows, labels, classes);
}

double training_accuracy(const Model& m, const LabeledDataset& d) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.n(); ++i) ok += classify(m, d.features.row(i)).label == d.labels[i];
  return static_cast<double>(ok) / static_cast<double>(d.n());
}

}  // namespace

TEST_CASE("mnb on the two-document fixture") {
  // Vocabulary {god, tao}; class A is "god god", class B is "tao tao".
  const auto d = make_data({{2, 0}, {0, 2}}, {0, 1}, 2);
  const auto m = train_mnb(d, MnbParams{1.0});
  CHECK(std::exp(m.log_priors[0]) == doctest::Approx(0.5));
  CHECK(std::exp(m.log_priors[1]) == doctest::Approx(0.5));
  CHECK(std::exp(m.log_likelihoods[0]) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(std::exp(m.log_likelihoods[1]) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(std::exp(m.log_likelihoods[2]) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(std::exp(m.log_likelihoods[3]) == doctest::Approx(0.75).epsilon(1e-14));

  const auto pred = classify(Model{m}, V{1, 0});
  CHECK(pred.label == 0);
  // 0.5 * 3/4 against 0.5 * 1/4.
  CHECK(pred.scores[0] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(pred.scores[1] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("mnb probabilities are normalised") {
  const auto d = toy();
  const auto m = train_mnb(d, MnbParams{0.5});
  double prior_sum = 0;
  for (auto lp : m.log_priors) prior_sum += std::exp(lp);
  CHECK(std::abs(prior_sum - 1.0) <= 1e-12);
  for (std::size_t t = 0; t < d.num_classes(); ++t) {
    double s = 0;
    for (std::size_t j = 0; j < m.p; ++j) s += std::exp(m.log_likelihoods[t * m.p + j]);
    CHECK(std::abs(s - 1.0) <= 1e-10);
  }
  for (const auto& pr : classify_all(Model{m}, d.features)) {
    CHECK(std::abs(std::accumulate(pr.scores.begin(), pr.scores.end(), 0.0) - 1.0) <= 1e-12);
  }
}

TEST_CASE("mnb edge cases") {
  const auto uniform = make_data({{1, 1}, {1, 1}, {1, 1}}, {0, 1, 2}, 3);
  for (auto lp : train_mnb(uniform, {}).log_priors) CHECK(lp == doctest::Approx(std::log(1.0 / 3.0)));

  // Only one class present: every prediction is that class.
  const auto single = make_data({{1, 0}, {3, 1}}, {1, 1}, 2);
  const Model m = train_mnb(single, {});
  CHECK(classify(m, V{0, 5}).label == 1);
  CHECK(classify(m, V{5, 0}).label == 1);

  CHECK(code_of([] { train_mnb(make_data({{1}}, {0}, 1), MnbParams{0.0}); }) == ErrorCode::InvalidHyperparameter);
  CHECK(code_of([&] { train_mnb(single.subset(std::vector<std::size_t>{}), {}); }) == ErrorCode::EmptyClass);
  CHECK(code_of([&] { classify(m, V{1, 2, 3}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("mnb label is unchanged when a test vector is scaled") {
  const auto d = toy();
  const Model m = train_mnb(d, {});
  SplitMix64 rng(5);
  for (std::size_t i = 0; i < d.n(); ++i) {
    const auto x = d.features.dense_row(i);
    const auto base = classify(m, x).label;
    for (int s = 2; s <= 5; ++s) {
      V y = x;
      for (auto& v : y) v *= s;
      CHECK(classify(m, y).label == base);
    }
    auto r = test::random_vector(rng, d.p(), 0.1, true);
    const auto rl = classify(m, r).label;
    for (auto& v : r) v *= 3;
    CHECK(classify(m, r).label == rl);
  }
}

TEST_CASE("knn matches an exhaustive scan") {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = 5 + rng.below(46);
    const auto data = blobs(rng, n, 6, 3);
    for (auto measure : kAllMeasures) {
      for (std::size_t k = 1; k <= n; k += 1 + n / 6) {
        const Model m = train_knn(data, KnnParams{k, measure});
        for (int q = 0; q < 5; ++q) {
          auto x = test::random_vector(rng, 6);
          x[0] += 0.5;
          // Oracle: sort every training row by (distance, index) and vote.
          std::vector<std::pair<double, std::size_t>> all;
          for (std::size_t i = 0; i < n; ++i) all.push_back({distance(measure, x, data.features.dense_row(i)), i});
          std::sort(all.begin(), all.end());
          std::vector<std::size_t> votes(3, 0);
          for (std::size_t r = 0; r < k; ++r) ++votes[data.labels[all[r].second]];
          const auto expected = static_cast<BookId>(std::max_element(votes.begin(), votes.end()) - votes.begin());
          const auto pred = classify(m, x);
          CHECK(pred.label == expected);
          CHECK(pred.scores[expected] == doctest::Approx(static_cast<double>(votes[expected]) / static_cast<double>(k)));
        }
      }
    }
  }
}

TEST_CASE("knn small cases") {
  const auto d = make_data({{0}, {1}, {5}}, {0, 0, 1}, 2);
  CHECK(classify(Model{train_knn(d, {1, Measure::Euclidean})}, V{4}).label == 1);
  CHECK(classify(Model{train_knn(d, {1, Measure::Euclidean})}, V{0.2}).label == 0);
  // k = n always returns the majority class.
  CHECK(classify(Model{train_knn(d, {3, Measure::Euclidean})}, V{5}).label == 0);
  // A training point is its own nearest neighbour.
  const auto t = toy(FeatureMode::Tfidf);
  const Model m = train_knn(t, {1, Measure::Euclidean});
  CHECK(training_accuracy(m, t) == 1.0);
  CHECK(code_of([&] { train_knn(d, {0, Measure::Euclidean}); }) == ErrorCode::InvalidHyperparameter);
  CHECK(code_of([&] { train_knn(d, {4, Measure::Euclidean}); }) == ErrorCode::InvalidHyperparameter);
}

TEST_CASE("hinge objective at the origin is one") {
  const auto d = toy();
  std::vector<int> y(d.n());
  for (std::size_t i = 0; i < d.n(); ++i) y[i] = d.labels[i] == 0 ? 1 : -1;
  CHECK(hinge_objective(d.features, y, V(d.p(), 0.0), 0.0, 0.1) == 1.0);
  const auto one = make_data({{2}, {-2}}, {0, 1}, 2);
  CHECK(hinge_objective(one.features, std::vector<int>{1, -1}, V{1}, 0.0, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("svm separates a two-point set") {
  const auto d = make_data({{2}, {-2}}, {0, 1}, 2);
  for (double lambda : {1e-3, 1e-2, 1e-1}) {
    const Model m = train_svm(d, SvmParams{lambda, 20}, 42);
    CHECK(training_accuracy(m, d) == 1.0);
  }
}

TEST_CASE("svm objective trace on the toy corpus") {
  // Twelve chapters give few steps per epoch; with lambda = 0.1 the running
  // average has settled after the first epoch.
  const auto d = toy();
  const auto m = train_svm(d, SvmParams{0.1, 30}, 42);
  REQUIRE(m.objective_trace.size() == d.num_classes());
  for (const auto& trace : m.objective_trace) {
    REQUIRE(trace.size() == 30);
    for (std::size_t e = 1; e < trace.size(); ++e) CHECK(trace[e] <= trace[e - 1] * 1.05);
  }
  CHECK(training_accuracy(Model{m}, d) == 1.0);
}

TEST_CASE("svm ends below the objective at the origin") {
  for (auto mode : {FeatureMode::Counts, FeatureMode::Tfidf}) {
    const auto d = toy(mode);
    for (double lambda : {1e-4, 1e-3, 1e-2, 1e-1}) {
      const auto m = train_svm(d, SvmParams{lambda, 20}, 42);
      for (const auto& trace : m.objective_trace) CHECK(trace.back() <= 1.0);
    }
  }
}

TEST_CASE("svm does not depend on input row order") {
  SplitMix64 rng(43);
  const auto d = blobs(rng, 30, 8, 3);
  std::vector<std::size_t> perm(d.n());
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<std::size_t>(perm));
  const auto a = train_svm(d, SvmParams{1e-2, 10}, 7);
  const auto b = train_svm(d.subset(perm), SvmParams{1e-2, 10}, 7);
  CHECK(a.weights == b.weights);
  CHECK(a.biases == b.biases);
}

TEST_CASE("a single fully grown tree fits consistent data") {
  SplitMix64 rng(47);
  const auto d = blobs(rng, 40, 10, 4);
  const auto p = d.p();
  // One tree still sees a bootstrap sample, so check the rows it was grown on
  // by training on a dataset where every row is unique and well separated.
  const Model m = train_rf(d, RfParams{1, std::nullopt, p}, 3);
  const auto& tree = std::get<RfModel>(m).trees.at(0);
  for (const auto& node : tree.nodes) {
    if (node.feature < 0) {
      // Leaves of a fully grown tree are pure.
      std::size_t nonzero = 0;
      for (auto c : node.distribution) nonzero += c > 0;
      CHECK(nonzero == 1);
    }
  }
  const Model forest = train_rf(d, RfParams{50, std::nullopt, std::nullopt}, 3);
  CHECK(training_accuracy(forest, d) == 1.0);
  CHECK(training_accuracy(train_rf(toy(), RfParams{100, std::nullopt, std::nullopt}, 42), toy()) == 1.0);
}

TEST_CASE("forest beats a single tree on held-out toy chapters") {
  const auto d = toy();
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < d.n(); ++i) (i % 3 == 2 ? test_idx : train_idx).push_back(i);
  const auto train_set = d.subset(train_idx), test_set = d.subset(test_idx);
  double tree_acc = 0, forest_acc = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    tree_acc += training_accuracy(train_rf(train_set, RfParams{1, std::nullopt, std::nullopt}, seed), test_set);
    forest_acc += training_accuracy(train_rf(train_set, RfParams{100, std::nullopt, std::nullopt}, seed), test_set);
  }
  CHECK(forest_acc >= tree_acc);
}

TEST_CASE("rf hyperparameter checks") {
  const auto d = make_data({{1, 0}, {0, 1}}, {0, 1}, 2);
  CHECK(code_of([&] { train_rf(d, RfParams{0, std::nullopt, std::nullopt}, 1); }) == ErrorCode::InvalidHyperparameter);
  CHECK(code_of([&] { train_rf(d, RfParams{5, std::nullopt, 3}, 1); }) == ErrorCode::InvalidHyperparameter);
  CHECK(code_of([&] { train_rf(d, RfParams{5, std::nullopt, 0}, 1); }) == ErrorCode::InvalidHyperparameter);
  const auto stump = train_rf(toy(), RfParams{10, 1, std::nullopt}, 1);
  for (const auto& t : stump.trees) CHECK(t.nodes.size() <= 3);
}

TEST_CASE("training is deterministic and models round-trip exactly") {
  const auto counts = toy();
  const auto weights = toy(FeatureMode::Tfidf);
  const std::vector<std::pair<Params, const LabeledDataset*>> cases = {
      {MnbParams{0.5}, &counts},
      {KnnParams{3, Measure::Cosine}, &weights},
      {SvmParams{1e-3, 20}, &weights},
      {RfParams{30, 5, std::nullopt}, &weights},
  };
  const auto dir = test::temp_dir("models");
  for (const auto& [params, data] : cases) {
    CAPTURE(describe(params));
    const auto a = train(*data, params, 42);
    const auto b = train(*data, params, 42);
    CHECK(a == b);
    const auto text = serialize_model(a);
    CHECK(deserialize_model(text) == a);
    CHECK(serialize_model(deserialize_model(text)) == text);
    const auto path = dir / (std::string(model_name(params)) + ".model");
    save_model(a, path);
    CHECK(load_model(path) == a);
    for (std::size_t i = 0; i < data->n(); ++i) {
      const auto pa = classify(a, data->features.row(i));
      const auto pb = classify(load_model(path), data->features.row(i));
      CHECK(pa.label == pb.label);
      CHECK(pa.scores == pb.scores);
    }
  }
  CHECK(train(weights, RfParams{30, 5, std::nullopt}, 1) != train(weights, RfParams{30, 5, std::nullopt}, 2));
}

TEST_CASE("malformed models are rejected") {
  CHECK(code_of([] { deserialize_model(""); }) == ErrorCode::MalformedModel);
  CHECK(code_of([] { deserialize_model("canon-model v9\n"); }) == ErrorCode::MalformedModel);
  const auto text = serialize_model(Model{train_mnb(toy(), {})});
  CHECK(code_of([&] { deserialize_model(text.substr(0, text.size() / 2)); }) == ErrorCode::MalformedModel);
}

TEST_CASE("dense and sparse classification agree") {
  const auto d = toy(FeatureMode::Tfidf);
  for (const Params& params : std::vector<Params>{MnbParams{}, KnnParams{3, Measure::Euclidean}, SvmParams{}, RfParams{20, std::nullopt, std::nullopt}}) {
    const auto m = train(d, params, 9);
    for (std::size_t i = 0; i < d.n(); ++i) {
      CHECK(classify(m, d.features.row(i)).scores == classify(m, d.features.dense_row(i)).scores);
    }
  }
}

TEST_CASE("kernel") {
  SplitMix64 rng(53);
  for (int t = 0; t < 100; ++t) {
    const auto x = test::random_vector(rng, 7), y = test::random_vector(rng, 7);
    double sq = 0;
    for (auto v : x) sq += v * v;
    CHECK(kernel(x, x, KernelKind::Linear) == doctest::Approx(sq));
    CHECK(kernel(x, x, KernelKind::Rbf, 0.3) == 1.0);
    const double k = kernel(x, y, KernelKind::Rbf, 0.01);
    CHECK(k > 0.0);
    CHECK(k == kernel(y, x, KernelKind::Rbf, 0.01));
  }
}

TEST_CASE("argmax takes the smallest index on ties") {
  CHECK(argmax(V{1, 3, 3}) == 1);
  CHECK(argmax(V{2, 2, 2}) == 0);
  CHECK(argmax(V{-1, -0.5}) == 1);
}

TEST_CASE("describe and scores export") {
  CHECK(describe(MnbParams{1.0}) == "alpha=1");
  CHECK(describe(KnnParams{1, Measure::Euclidean}) == "k=1;measure=euclidean");
  const auto d = toy();
  const auto m = train(d, MnbParams{}, 0);
  const auto preds = classify_all(m, d.features);
  const auto csv = scores_csv(d, preds);
  CHECK(csv.rfind("doc_label,true,predicted,score_0,score_1,score_2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(d.n() + 1));
}
