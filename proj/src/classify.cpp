#include "canon/classify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>

#include "canon/io.hpp"
#include "canon/random.hpp"

namespace canon {

// ---- datasets -------------------------------------------------------------

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.features = RealMatrix(p());
  out.books = books;
  out.vocab = vocab;
  for (auto i : indices) {
    const auto r = features.row(i);
    out.features.push_row(r.columns, r.values);
    out.labels.push_back(labels.at(i));
    out.rows.push_back(rows.at(i));
  }
  return out;
}

std::string_view to_string(FeatureMode f) noexcept { return f == FeatureMode::Counts ? "counts" : "tfidf"; }

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "counts") return FeatureMode::Counts;
  if (name == "tfidf") return FeatureMode::Tfidf;
  throw Error(ErrorCode::InvalidArgument, "unknown feature mode '" + std::string(name) + "'");
}

namespace {

LabeledDataset assemble(RealMatrix features, const std::vector<RowLabel>& rows, const std::vector<BookLabel>& books,
                        const Vocabulary& vocab) {
  LabeledDataset d;
  d.features = std::move(features);
  d.rows = rows;
  d.books = books;
  d.vocab = vocab;
  for (const auto& r : rows) d.labels.push_back(r.book.id);
  return d;
}

}  // namespace

LabeledDataset make_dataset(const DocTermMatrix& dtm) {
  return assemble(to_real(dtm.counts), dtm.rows, dtm.books, dtm.vocab);
}

LabeledDataset make_dataset(const WeightMatrix& w) { return assemble(w.weights, w.rows, w.books, w.vocab); }

LabeledDataset make_dataset(const DocTermMatrix& dtm, FeatureMode mode) {
  return mode == FeatureMode::Counts ? make_dataset(dtm) : make_dataset(tfidf(dtm));
}

// ---- params ---------------------------------------------------------------

std::string_view model_name(const Params& params) noexcept {
  static constexpr std::string_view kNames[] = {"mnb", "knn", "svm", "rf"};
  return kNames[params.index()];
}

std::string describe(const Params& params) {
  struct Visitor {
    std::string operator()(const MnbParams& p) const { return "alpha=" + io::format_double(p.alpha); }
    std::string operator()(const KnnParams& p) const {
      return "k=" + std::to_string(p.k) + ";measure=" + std::string(to_string(p.measure));
    }
    std::string operator()(const SvmParams& p) const {
      return "lambda=" + io::format_double(p.lambda) + ";epochs=" + std::to_string(p.epochs);
    }
    std::string operator()(const RfParams& p) const {
      return "trees=" + std::to_string(p.trees) +
             ";depth=" + (p.max_depth ? std::to_string(*p.max_depth) : std::string("none")) +
             ";mtry=" + (p.features_per_split ? std::to_string(*p.features_per_split) : std::string("sqrt"));
    }
  };
  return std::visit(Visitor{}, params);
}

std::size_t num_classes(const Model& model) noexcept {
  struct Visitor {
    std::size_t operator()(const MnbModel& m) const { return m.log_priors.size(); }
    std::size_t operator()(const KnnModel& m) const { return m.classes; }
    std::size_t operator()(const SvmModel& m) const { return m.biases.size(); }
    std::size_t operator()(const RfModel& m) const { return m.classes; }
  };
  return std::visit(Visitor{}, model);
}

std::size_t num_features(const Model& model) noexcept {
  struct Visitor {
    std::size_t operator()(const MnbModel& m) const { return m.p; }
    std::size_t operator()(const KnnModel& m) const { return m.features.cols(); }
    std::size_t operator()(const SvmModel& m) const { return m.p; }
    std::size_t operator()(const RfModel& m) const { return m.p; }
  };
  return std::visit(Visitor{}, model);
}

BookId argmax(std::span<const double> scores) noexcept {
  std::size_t best = 0;
  for (std::size_t t = 1; t < scores.size(); ++t) {
    if (scores[t] > scores[best]) best = t;
  }
  return static_cast<BookId>(best);
}

namespace {

void require_trainable(const LabeledDataset& data) {
  if (data.n() == 0) throw Error(ErrorCode::EmptyClass, "training set has no rows");
  if (data.labels.size() != data.n()) throw Error(ErrorCode::InvariantViolation, "one label per row required");
  for (auto y : data.labels) {
    if (y >= data.num_classes()) throw Error(ErrorCode::InvariantViolation, "label outside the class list");
  }
}

void invalid(const std::string& what) { throw Error(ErrorCode::InvalidHyperparameter, what); }

double sparse_dot(const RealMatrix::RowView& x, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.columns.size(); ++k) s += x.values[k] * w[x.columns[k]];
  return s;
}

// Row indices sorted by (label, row content). Seeded shuffles start from
// this order, so training does not depend on how the input rows are ordered.
std::vector<std::size_t> canonical_order(const LabeledDataset& data) {
  std::vector<std::size_t> order(data.n());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (data.labels[i] != data.labels[j]) return data.labels[i] < data.labels[j];
    const auto a = data.features.row(i), b = data.features.row(j);
    for (std::size_t k = 0; k < a.columns.size() && k < b.columns.size(); ++k) {
      if (a.columns[k] != b.columns[k]) return a.columns[k] < b.columns[k];
      if (a.values[k] != b.values[k]) return a.values[k] < b.values[k];
    }
    return a.columns.size() < b.columns.size();
  });
  return order;
}

// Feature value lookup shared by sparse and dense inputs.
struct FeatureAccess {
  const RealMatrix::RowView* sparse = nullptr;
  std::span<const double> dense;

  double operator()(std::size_t j) const {
    if (sparse == nullptr) return dense[j];
    auto it = std::lower_bound(sparse->columns.begin(), sparse->columns.end(), static_cast<std::uint32_t>(j));
    if (it == sparse->columns.end() || *it != j) return 0.0;
    return sparse->values[static_cast<std::size_t>(it - sparse->columns.begin())];
  }
};

}  // namespace

// ---- multinomial naive Bayes ----------------------------------------------

MnbModel train_mnb(const LabeledDataset& data, const MnbParams& params) {
  if (!(params.alpha > 0.0) || !std::isfinite(params.alpha)) invalid("alpha must be positive");
  require_trainable(data);
  const auto T = data.num_classes(), p = data.p();
  MnbModel m;
  m.params = params;
  m.p = p;
  std::vector<double> counts(T * p, 0.0), totals(T, 0.0), docs(T, 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto t = data.labels[i];
    docs[t] += 1.0;
    const auto r = data.features.row(i);
    for (std::size_t k = 0; k < r.columns.size(); ++k) {
      counts[t * p + r.columns[k]] += r.values[k];
      totals[t] += r.values[k];
    }
  }
  const auto n = static_cast<double>(data.n());
  m.log_priors.resize(T);
  m.log_likelihoods.resize(T * p);
  for (std::size_t t = 0; t < T; ++t) {
    m.log_priors[t] = docs[t] > 0.0 ? std::log(docs[t] / n) : -std::numeric_limits<double>::infinity();
    const double denom = totals[t] + params.alpha * static_cast<double>(p);
    for (std::size_t j = 0; j < p; ++j) m.log_likelihoods[t * p + j] = std::log((counts[t * p + j] + params.alpha) / denom);
  }
  return m;
}

namespace {

Prediction classify_mnb(const MnbModel& m, const FeatureAccess& x, const RealMatrix::RowView* sparse) {
  const auto T = m.log_priors.size();
  std::vector<double> joint(m.log_priors);
  for (std::size_t t = 0; t < T; ++t) {
    if (!std::isfinite(joint[t])) continue;
    const double* ll = m.log_likelihoods.data() + t * m.p;
    if (sparse != nullptr) {
      for (std::size_t k = 0; k < sparse->columns.size(); ++k) joint[t] += sparse->values[k] * ll[sparse->columns[k]];
    } else {
      for (std::size_t j = 0; j < m.p; ++j) {
        if (x.dense[j] != 0.0) joint[t] += x.dense[j] * ll[j];
      }
    }
  }
  Prediction out;
  out.label = argmax(joint);
  const double top = joint[out.label];
  out.scores.resize(T);
  double z = 0.0;
  for (std::size_t t = 0; t < T; ++t) z += (out.scores[t] = std::exp(joint[t] - top));
  for (auto& s : out.scores) s /= z;
  return out;
}

}  // namespace

// ---- k nearest neighbours -------------------------------------------------

KnnModel train_knn(const LabeledDataset& data, const KnnParams& params) {
  require_trainable(data);
  if (params.k == 0 || params.k > data.n()) {
    invalid("k=" + std::to_string(params.k) + " must lie in 1.." + std::to_string(data.n()));
  }
  return KnnModel{params, data.num_classes(), data.features, data.labels};
}

namespace {

Prediction classify_knn(const KnnModel& m, const RealMatrix::RowView& x) {
  const auto n = m.features.rows();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = {distance(m.params.measure, m.features.row(i), x), i};
  const auto k = std::min(m.params.k, n);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  Prediction out;
  out.scores.assign(m.classes, 0.0);
  for (std::size_t r = 0; r < k; ++r) out.scores[m.labels[dist[r].second]] += 1.0;
  for (auto& s : out.scores) s /= static_cast<double>(k);
  out.label = argmax(out.scores);
  return out;
}

}  // namespace

// ---- linear SVM -----------------------------------------------------------

double hinge_objective(const RealMatrix& x, std::span<const int> y, std::span<const double> w, double b,
                       double lambda) {
  if (y.size() != x.rows() || w.size() != x.cols()) throw Error(ErrorCode::DimensionMismatch, "hinge objective shapes");
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    loss += std::max(0.0, 1.0 - y[i] * (sparse_dot(x.row(i), w) - b));
  }
  double norm = b * b;
  for (double v : w) norm += v * v;
  return loss / static_cast<double>(x.rows()) + lambda * norm;
}

SvmModel train_svm(const LabeledDataset& data, const SvmParams& params, std::uint64_t seed) {
  if (!(params.lambda > 0.0) || !std::isfinite(params.lambda)) invalid("lambda must be positive");
  if (params.epochs == 0) invalid("epochs must be at least 1");
  require_trainable(data);
  const auto T = data.num_classes(), p = data.p(), n = data.n();
  SvmModel model;
  model.params = params;
  model.p = p;
  model.weights.assign(T * p, 0.0);
  model.biases.assign(T, 0.0);
  model.objective_trace.resize(T);
  const SplitMix64 root = SplitMix64(seed).split("svm");
  const double lambda = params.lambda;

  // The bias is the last coordinate of an augmented weight vector with a
  // constant feature of 1, so f(x) = w.x + v_p and b = -v_p.
  // The iterate is kept as w = a * v so the shrink and projection steps are
  // O(1), and the running sum of iterates as B * v - u so averaging stays
  // sparse. vsq tracks |v|^2. Each epoch records the objective of the
  // average of every iterate so far; the last one is the model.
  std::vector<double> v(p + 1), u(p + 1), avg(p + 1);
  std::vector<int> y(n);
  const auto canonical = canonical_order(data);
  std::vector<std::size_t> order;
  const double radius_sq = 1.0 / lambda;  // the optimum has lambda |w|^2 <= L(0) = 1
  for (std::size_t c = 0; c < T; ++c) {
    for (std::size_t i = 0; i < n; ++i) y[i] = data.labels[i] == c ? 1 : -1;
    SplitMix64 rng = root.split(static_cast<std::uint64_t>(c));
    order = canonical;
    std::fill(v.begin(), v.end(), 0.0);
    std::fill(u.begin(), u.end(), 0.0);
    double a = 1.0, vsq = 0.0, B = 0.0;
    std::uint64_t t = 0;
    // Folds the scale into v and the running sum into u (B = 0).
    auto renormalize = [&] {
      vsq = 0.0;
      for (std::size_t j = 0; j <= p; ++j) {
        u[j] -= B * v[j];
        v[j] *= a;
        vsq += v[j] * v[j];
      }
      B = 0.0;
      a = 1.0;
    };
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
      rng.shuffle(std::span<std::size_t>(order));
      for (auto i : order) {
        ++t;
        const double eta = 1.0 / (2.0 * lambda * static_cast<double>(t));
        const auto xi = data.features.row(i);
        const double margin = y[i] * a * (sparse_dot(xi, v) + v[p]);
        if (t == 1) {
          std::fill(v.begin(), v.end(), 0.0);
          a = 1.0;
          vsq = 0.0;
        } else {
          a *= 1.0 - 1.0 / static_cast<double>(t);
        }
        if (margin < 1.0) {
          const double step = eta * y[i] / a;
          auto bump = [&](std::size_t j, double d) {
            vsq += d * (2.0 * v[j] + d);
            v[j] += d;
            u[j] += B * d;
          };
          for (std::size_t k = 0; k < xi.columns.size(); ++k) bump(xi.columns[k], step * xi.values[k]);
          bump(p, step);
        }
        const double wsq = a * a * std::max(vsq, 0.0);
        if (wsq > radius_sq) a *= std::sqrt(radius_sq / wsq);
        B += a;
        if (a < 1e-8) renormalize();
      }
      renormalize();
      for (std::size_t j = 0; j <= p; ++j) avg[j] = -u[j] / static_cast<double>(t);
      const double obj = hinge_objective(data.features, y, std::span<const double>(avg).first(p), -avg[p], lambda);
      if (!std::isfinite(obj)) {
        throw Error(ErrorCode::NonFiniteObjective, "objective diverged for class " + std::to_string(c));
      }
      model.objective_trace[c].push_back(obj);
    }
    std::copy(avg.begin(), avg.begin() + static_cast<std::ptrdiff_t>(p), model.weights.begin() + static_cast<std::ptrdiff_t>(c * p));
    model.biases[c] = -avg[p];
  }
  return model;
}

namespace {

Prediction classify_svm(const SvmModel& m, const FeatureAccess& x, const RealMatrix::RowView* sparse) {
  const auto T = m.biases.size();
  Prediction out;
  out.scores.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    const auto w = std::span<const double>(m.weights).subspan(t * m.p, m.p);
    double s = 0.0;
    if (sparse != nullptr) {
      s = sparse_dot(*sparse, w);
    } else {
      for (std::size_t j = 0; j < m.p; ++j) s += w[j] * x.dense[j];
    }
    out.scores[t] = s - m.biases[t];
  }
  out.label = argmax(out.scores);
  return out;
}

}  // namespace

// ---- random forest --------------------------------------------------------

namespace {

// Column-major copy of the training features for split search.
struct ColumnIndex {
  std::vector<std::size_t> ptr;
  std::vector<std::uint32_t> rows;
  std::vector<double> values;

  explicit ColumnIndex(const RealMatrix& x) : ptr(x.cols() + 1, 0) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (auto j : x.row(i).columns) ++ptr[j + 1];
    }
    std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
    rows.resize(x.nnz());
    values.resize(x.nnz());
    auto fill = ptr;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto r = x.row(i);
      for (std::size_t k = 0; k < r.columns.size(); ++k) {
        const auto at = fill[r.columns[k]]++;
        rows[at] = static_cast<std::uint32_t>(i);
        values[at] = r.values[k];
      }
    }
  }

  std::size_t count(std::size_t j) const { return ptr[j + 1] - ptr[j]; }
};

double gini_sum(const std::vector<double>& counts, double total) {
  // total * gini = total - sum c^2 / total
  if (total <= 0.0) return 0.0;
  double sq = 0.0;
  for (double c : counts) sq += c * c;
  return total - sq / total;
}

class TreeBuilder {
 public:
  TreeBuilder(const LabeledDataset& data, const ColumnIndex& cols, std::size_t mtry, std::optional<std::size_t> max_depth,
              SplitMix64 rng)
      : data_(data), cols_(cols), mtry_(mtry), max_depth_(max_depth), rng_(rng), T_(data.num_classes()),
        node_of_(data.n(), kNone), weight_(data.n(), 0) {
    perm_.resize(data.p());
    std::iota(perm_.begin(), perm_.end(), 0u);
  }

  DecisionTree build() {
    const auto n = data_.n();
    for (std::size_t draw = 0; draw < n; ++draw) ++weight_[rng_.below(n)];
    std::vector<std::uint32_t> root;
    for (std::size_t i = 0; i < n; ++i) {
      if (weight_[i] > 0) root.push_back(static_cast<std::uint32_t>(i));
    }
    DecisionTree tree;
    grow(tree, std::move(root), 0);
    return tree;
  }

 private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
  };

  double value(std::uint32_t row, std::size_t j) const { return data_.features.at(row, j); }

  bool identical_rows(const std::vector<std::uint32_t>& samples) const {
    const auto first = data_.features.row(samples.front());
    for (std::size_t s = 1; s < samples.size(); ++s) {
      const auto r = data_.features.row(samples[s]);
      if (!std::ranges::equal(r.columns, first.columns) || !std::ranges::equal(r.values, first.values)) return false;
    }
    return true;
  }

  // Best threshold on feature j, or nothing if the feature is constant here.
  std::optional<Split> evaluate(std::size_t j, const std::vector<std::uint32_t>& samples, std::uint32_t node,
                                const std::vector<double>& counts, double total) {
    entries_.clear();
    if (cols_.count(j) <= 4 * samples.size()) {
      for (auto k = cols_.ptr[j]; k < cols_.ptr[j + 1]; ++k) {
        if (node_of_[cols_.rows[k]] == node) entries_.emplace_back(cols_.values[k], cols_.rows[k]);
      }
    } else {
      for (auto r : samples) {
        const double x = value(r, j);
        if (x != 0.0) entries_.emplace_back(x, r);
      }
    }
    // Rows not listed hold zero; they enter as one weighted group.
    std::vector<double> zero_counts = counts;
    double zero_total = total;
    for (const auto& [x, r] : entries_) {
      zero_counts[data_.labels[r]] -= weight_[r];
      zero_total -= weight_[r];
    }
    if (zero_total > 0.0) entries_.emplace_back(0.0, kNone);
    if (entries_.size() < 2) return std::nullopt;
    std::sort(entries_.begin(), entries_.end());
    if (entries_.front().first == entries_.back().first) return std::nullopt;

    std::vector<double> left(T_, 0.0), right;
    double left_total = 0.0;
    Split best;
    best.feature = j;
    for (std::size_t e = 0; e + 1 < entries_.size(); ++e) {
      const auto [x, r] = entries_[e];
      if (r == kNone) {
        for (std::size_t t = 0; t < T_; ++t) left[t] += zero_counts[t];
        left_total += zero_total;
      } else {
        left[data_.labels[r]] += weight_[r];
        left_total += weight_[r];
      }
      const double next = entries_[e + 1].first;
      if (next == x) continue;
      right.resize(T_);
      for (std::size_t t = 0; t < T_; ++t) right[t] = counts[t] - left[t];
      const double imp = gini_sum(left, left_total) + gini_sum(right, total - left_total);
      if (imp < best.impurity) {
        best.impurity = imp;
        double thr = x + (next - x) / 2.0;
        if (!(thr < next)) thr = x;
        best.threshold = thr;
      }
    }
    return best;
  }

  std::uint32_t grow(DecisionTree& tree, std::vector<std::uint32_t> samples, std::size_t depth) {
    const auto id = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::vector<double> counts(T_, 0.0);
    double total = 0.0;
    for (auto r : samples) {
      counts[data_.labels[r]] += weight_[r];
      total += weight_[r];
      node_of_[r] = id;
    }
    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1;
    const bool depth_limited = max_depth_ && depth >= *max_depth_;
    std::optional<Split> best;
    if (!pure && !depth_limited && !identical_rows(samples)) {
      // Partial Fisher-Yates over the persistent permutation: the first mtry
      // positions are the sampled features; keep drawing past mtry only if
      // none of them can split this node.
      const auto p = perm_.size();
      for (std::size_t s = 0; s < p; ++s) {
        const auto pick = s + static_cast<std::size_t>(rng_.below(p - s));
        std::swap(perm_[s], perm_[pick]);
        if (auto cand = evaluate(perm_[s], samples, id, counts, total)) {
          if (!best || cand->impurity < best->impurity) best = cand;
        }
        if (s + 1 >= mtry_ && best) break;
      }
    }
    if (!best) {
      auto& leaf = tree.nodes[id];
      leaf.distribution.resize(T_);
      for (std::size_t t = 0; t < T_; ++t) leaf.distribution[t] = static_cast<std::uint32_t>(counts[t]);
      return id;
    }
    std::vector<std::uint32_t> left, right;
    for (auto r : samples) (value(r, best->feature) <= best->threshold ? left : right).push_back(r);
    samples.clear();
    samples.shrink_to_fit();
    tree.nodes[id].feature = static_cast<std::int32_t>(best->feature);
    tree.nodes[id].threshold = best->threshold;
    const auto l = grow(tree, std::move(left), depth + 1);
    const auto r = grow(tree, std::move(right), depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }

  const LabeledDataset& data_;
  const ColumnIndex& cols_;
  std::size_t mtry_;
  std::optional<std::size_t> max_depth_;
  SplitMix64 rng_;
  std::size_t T_;
  std::vector<std::uint32_t> node_of_;
  std::vector<std::uint32_t> weight_;
  std::vector<std::uint32_t> perm_;
  std::vector<std::pair<double, std::uint32_t>> entries_;
};

std::size_t default_mtry(std::size_t p) {
  auto m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p))));
  while (m * m < p) ++m;
  while (m > 1 && (m - 1) * (m - 1) >= p) --m;
  return std::max<std::size_t>(1, m);
}

BookId tree_vote(const DecisionTree& tree, const FeatureAccess& x) {
  std::uint32_t at = 0;
  while (tree.nodes[at].feature >= 0) {
    const auto& node = tree.nodes[at];
    at = x(static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left : node.right;
  }
  const auto& dist = tree.nodes[at].distribution;
  return static_cast<BookId>(std::max_element(dist.begin(), dist.end()) - dist.begin());
}

Prediction classify_rf(const RfModel& m, const FeatureAccess& x) {
  Prediction out;
  out.scores.assign(m.classes, 0.0);
  for (const auto& tree : m.trees) out.scores[tree_vote(tree, x)] += 1.0;
  for (auto& s : out.scores) s /= static_cast<double>(m.trees.size());
  out.label = argmax(out.scores);
  return out;
}

}  // namespace

RfModel train_rf(const LabeledDataset& data, const RfParams& params, std::uint64_t seed) {
  require_trainable(data);
  if (params.trees == 0) invalid("forest needs at least one tree");
  if (params.max_depth && *params.max_depth == 0) invalid("max_depth must be positive");
  const auto p = data.p();
  const auto mtry = params.features_per_split.value_or(default_mtry(p));
  if (mtry == 0 || mtry > p) invalid("features_per_split=" + std::to_string(mtry) + " must lie in 1.." + std::to_string(p));
  RfModel m;
  m.params = params;
  m.params.features_per_split = mtry;
  m.seed = seed;
  m.classes = data.num_classes();
  m.p = p;
  const ColumnIndex cols(data.features);
  const SplitMix64 root = SplitMix64(seed).split("rf");
  m.trees.reserve(params.trees);
  for (std::size_t t = 0; t < params.trees; ++t) {
    TreeBuilder builder(data, cols, mtry, params.max_depth, root.split(static_cast<std::uint64_t>(t)));
    m.trees.push_back(builder.build());
  }
  return m;
}

Model train(const LabeledDataset& data, const Params& params, std::uint64_t seed) {
  struct Visitor {
    const LabeledDataset& data;
    std::uint64_t seed;
    Model operator()(const MnbParams& p) const { return train_mnb(data, p); }
    Model operator()(const KnnParams& p) const { return train_knn(data, p); }
    Model operator()(const SvmParams& p) const { return train_svm(data, p, seed); }
    Model operator()(const RfParams& p) const { return train_rf(data, p, seed); }
  };
  return std::visit(Visitor{data, seed}, params);
}

// ---- prediction -----------------------------------------------------------

Prediction classify(const Model& model, const RealMatrix::RowView& x) {
  const auto p = num_features(model);
  if (!x.columns.empty() && x.columns.back() >= p) {
    throw Error(ErrorCode::DimensionMismatch, "feature index " + std::to_string(x.columns.back()) +
                                                  " outside the model's " + std::to_string(p) + " features");
  }
  const FeatureAccess access{&x, {}};
  struct Visitor {
    const RealMatrix::RowView& x;
    const FeatureAccess& access;
    Prediction operator()(const MnbModel& m) const { return classify_mnb(m, access, &x); }
    Prediction operator()(const KnnModel& m) const { return classify_knn(m, x); }
    Prediction operator()(const SvmModel& m) const { return classify_svm(m, access, &x); }
    Prediction operator()(const RfModel& m) const { return classify_rf(m, access); }
  };
  return std::visit(Visitor{x, access}, model);
}

Prediction classify(const Model& model, std::span<const double> dense_x) {
  const auto p = num_features(model);
  if (dense_x.size() != p) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector of length " + std::to_string(dense_x.size()) + " for a model with " + std::to_string(p) + " features");
  }
  if (std::holds_alternative<KnnModel>(model)) {
    RealMatrix one(p);
    one.push_dense_row(dense_x);
    return classify(model, one.row(0));
  }
  const FeatureAccess access{nullptr, dense_x};
  struct Visitor {
    const FeatureAccess& access;
    Prediction operator()(const MnbModel& m) const { return classify_mnb(m, access, nullptr); }
    Prediction operator()(const KnnModel&) const { return {}; }
    Prediction operator()(const SvmModel& m) const { return classify_svm(m, access, nullptr); }
    Prediction operator()(const RfModel& m) const { return classify_rf(m, access); }
  };
  return std::visit(Visitor{access}, model);
}

std::vector<Prediction> classify_all(const Model& model, const RealMatrix& rows) {
  std::vector<Prediction> out;
  out.reserve(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) out.push_back(classify(model, rows.row(i)));
  return out;
}

double kernel(std::span<const double> x, std::span<const double> y, KernelKind kind, double gamma) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "kernel arguments differ in length");
  if (kind == KernelKind::Linear) return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
  if (!(gamma > 0.0)) invalid("rbf gamma must be positive");
  const double d = euclidean(x, y);
  return std::exp(-gamma * d * d);
}

// ---- serialization --------------------------------------------------------

namespace {

constexpr std::string_view kModelHeader = "canon-model v1";

std::string hexf(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

void put_values(std::string& out, std::span<const double> values) {
  for (double v : values) {
    out += ' ';
    out += hexf(v);
  }
  out += '\n';
}

class Reader {
 public:
  explicit Reader(std::string_view text) : lines_(io::split_lines(text)) {}

  std::vector<std::string> next(std::string_view expect) {
    while (at_ < lines_.size() && io::trim(lines_[at_]).empty()) ++at_;
    if (at_ >= lines_.size()) fail("unexpected end, wanted '" + std::string(expect) + "'");
    std::istringstream in{std::string(lines_[at_++])};
    std::vector<std::string> words;
    for (std::string w; in >> w;) words.push_back(w);
    if (!expect.empty() && words.front() != expect) {
      fail("line " + std::to_string(at_) + ": expected '" + std::string(expect) + "', found '" + words.front() + "'");
    }
    return words;
  }

  [[noreturn]] static void fail(const std::string& what) { throw Error(ErrorCode::MalformedModel, what); }

  static double real(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') fail("bad number '" + s + "'");
    return v;
  }

  static std::size_t count(const std::string& s) {
    std::size_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail("bad integer '" + s + "'");
    return v;
  }

  std::string value(std::string_view key) {
    auto w = next(key);
    if (w.size() != 2) fail("'" + std::string(key) + "' takes one value");
    return w[1];
  }

  std::vector<double> reals(std::string_view key, std::size_t expected, std::size_t skip = 1) {
    auto w = next(key);
    if (w.size() != expected + skip) fail("'" + std::string(key) + "' has the wrong number of values");
    std::vector<double> out;
    for (std::size_t k = skip; k < w.size(); ++k) out.push_back(real(w[k]));
    return out;
  }

 private:
  std::vector<std::string_view> lines_;
  std::size_t at_ = 0;
};

std::string opt(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string("none"); }

std::optional<std::size_t> parse_opt(const std::string& s) {
  if (s == "none") return std::nullopt;
  return Reader::count(s);
}

}  // namespace

std::string serialize_model(const Model& model) {
  std::string out(kModelHeader);
  out += '\n';
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, MnbModel>) {
          const auto T = m.log_priors.size();
          out += "kind mnb\nclasses " + std::to_string(T) + "\nfeatures " + std::to_string(m.p) + "\n";
          out += "alpha " + hexf(m.params.alpha) + "\nlog_priors";
          put_values(out, m.log_priors);
          for (std::size_t t = 0; t < T; ++t) {
            out += "log_likelihood";
            put_values(out, std::span<const double>(m.log_likelihoods).subspan(t * m.p, m.p));
          }
        } else if constexpr (std::is_same_v<M, KnnModel>) {
          out += "kind knn\nclasses " + std::to_string(m.classes) + "\nfeatures " + std::to_string(m.features.cols()) + "\n";
          out += "k " + std::to_string(m.params.k) + "\nmeasure " + std::string(to_string(m.params.measure)) + "\n";
          out += "rows " + std::to_string(m.features.rows()) + "\n";
          for (std::size_t i = 0; i < m.features.rows(); ++i) {
            const auto r = m.features.row(i);
            out += "row " + std::to_string(m.labels[i]) + " " + std::to_string(r.columns.size());
            for (std::size_t k = 0; k < r.columns.size(); ++k) out += " " + std::to_string(r.columns[k]) + ":" + hexf(r.values[k]);
            out += '\n';
          }
        } else if constexpr (std::is_same_v<M, SvmModel>) {
          const auto T = m.biases.size();
          out += "kind svm\nclasses " + std::to_string(T) + "\nfeatures " + std::to_string(m.p) + "\n";
          out += "lambda " + hexf(m.params.lambda) + "\nepochs " + std::to_string(m.params.epochs) + "\n";
          for (std::size_t t = 0; t < T; ++t) {
            out += "bias " + hexf(m.biases[t]) + "\nweights";
            put_values(out, std::span<const double>(m.weights).subspan(t * m.p, m.p));
            out += "trace " + std::to_string(m.objective_trace[t].size());
            put_values(out, m.objective_trace[t]);
          }
        } else {
          out += "kind rf\nclasses " + std::to_string(m.classes) + "\nfeatures " + std::to_string(m.p) + "\n";
          out += "trees " + std::to_string(m.params.trees) + "\nmax_depth " + opt(m.params.max_depth) +
                 "\nfeatures_per_split " + opt(m.params.features_per_split) + "\nseed " + std::to_string(m.seed) + "\n";
          for (const auto& tree : m.trees) {
            out += "tree " + std::to_string(tree.nodes.size()) + "\n";
            for (const auto& node : tree.nodes) {
              if (node.feature < 0) {
                out += "leaf";
                for (auto c : node.distribution) out += " " + std::to_string(c);
              } else {
                out += "split " + std::to_string(node.feature) + " " + hexf(node.threshold) + " " +
                       std::to_string(node.left) + " " + std::to_string(node.right);
              }
              out += '\n';
            }
          }
        }
      },
      model);
  out += "end\n";
  return out;
}

Model deserialize_model(std::string_view text) {
  Reader in(text);
  {
    auto w = in.next("");
    if (w.size() != 2 || w[0] + " " + w[1] != kModelHeader) Reader::fail("missing model header");
  }
  const auto kind = in.value("kind");
  const auto T = Reader::count(in.value("classes"));
  const auto p = Reader::count(in.value("features"));
  Model result;
  if (kind == "mnb") {
    MnbModel m;
    m.p = p;
    m.params.alpha = Reader::real(in.value("alpha"));
    m.log_priors = in.reals("log_priors", T);
    for (std::size_t t = 0; t < T; ++t) {
      auto row = in.reals("log_likelihood", p);
      m.log_likelihoods.insert(m.log_likelihoods.end(), row.begin(), row.end());
    }
    result = std::move(m);
  } else if (kind == "knn") {
    KnnModel m;
    m.classes = T;
    m.params.k = Reader::count(in.value("k"));
    try {
      m.params.measure = parse_measure(in.value("measure"));
    } catch (const Error& e) {
      Reader::fail(e.what());
    }
    const auto rows = Reader::count(in.value("rows"));
    m.features = RealMatrix(p);
    for (std::size_t i = 0; i < rows; ++i) {
      auto w = in.next("row");
      if (w.size() < 3) Reader::fail("short knn row");
      m.labels.push_back(static_cast<BookId>(Reader::count(w[1])));
      const auto nnz = Reader::count(w[2]);
      if (w.size() != nnz + 3) Reader::fail("knn row entry count mismatch");
      std::vector<std::uint32_t> cols;
      std::vector<double> vals;
      for (std::size_t k = 3; k < w.size(); ++k) {
        const auto colon = w[k].find(':');
        if (colon == std::string::npos) Reader::fail("bad knn entry '" + w[k] + "'");
        cols.push_back(static_cast<std::uint32_t>(Reader::count(w[k].substr(0, colon))));
        vals.push_back(Reader::real(w[k].substr(colon + 1)));
      }
      try {
        m.features.push_row(cols, vals);
      } catch (const Error& e) {
        Reader::fail(e.what());
      }
    }
    result = std::move(m);
  } else if (kind == "svm") {
    SvmModel m;
    m.p = p;
    m.params.lambda = Reader::real(in.value("lambda"));
    m.params.epochs = Reader::count(in.value("epochs"));
    for (std::size_t t = 0; t < T; ++t) {
      m.biases.push_back(Reader::real(in.value("bias")));
      auto w = in.reals("weights", p);
      m.weights.insert(m.weights.end(), w.begin(), w.end());
      auto head = in.next("trace");
      if (head.size() < 2) Reader::fail("short trace line");
      const auto len = Reader::count(head[1]);
      if (head.size() != len + 2) Reader::fail("trace length mismatch");
      std::vector<double> trace;
      for (std::size_t k = 2; k < head.size(); ++k) trace.push_back(Reader::real(head[k]));
      m.objective_trace.push_back(std::move(trace));
    }
    result = std::move(m);
  } else if (kind == "rf") {
    RfModel m;
    m.classes = T;
    m.p = p;
    m.params.trees = Reader::count(in.value("trees"));
    m.params.max_depth = parse_opt(in.value("max_depth"));
    m.params.features_per_split = parse_opt(in.value("features_per_split"));
    m.seed = Reader::count(in.value("seed"));
    for (std::size_t t = 0; t < m.params.trees; ++t) {
      const auto size = Reader::count(in.value("tree"));
      DecisionTree tree;
      for (std::size_t k = 0; k < size; ++k) {
        auto w = in.next("");
        TreeNode node;
        if (w[0] == "leaf" && w.size() == T + 1) {
          for (std::size_t c = 1; c < w.size(); ++c) node.distribution.push_back(static_cast<std::uint32_t>(Reader::count(w[c])));
        } else if (w[0] == "split" && w.size() == 5) {
          node.feature = static_cast<std::int32_t>(Reader::count(w[1]));
          node.threshold = Reader::real(w[2]);
          node.left = static_cast<std::uint32_t>(Reader::count(w[3]));
          node.right = static_cast<std::uint32_t>(Reader::count(w[4]));
          if (node.left >= size || node.right >= size || static_cast<std::size_t>(node.feature) >= p) {
            Reader::fail("split node out of range");
          }
        } else {
          Reader::fail("bad tree node");
        }
        tree.nodes.push_back(std::move(node));
      }
      m.trees.push_back(std::move(tree));
    }
    result = std::move(m);
  } else {
    Reader::fail("unknown model kind '" + kind + "'");
  }
  in.next("end");
  return result;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize_model(model));
}

Model load_model(const std::filesystem::path& path) { return deserialize_model(io::read_file(path)); }

std::string scores_csv(const LabeledDataset& data, std::span<const Prediction> predictions) {
  if (predictions.size() != data.n()) throw Error(ErrorCode::DimensionMismatch, "one prediction per row required");
  std::string out = "doc_label,true,predicted";
  for (std::size_t t = 0; t < data.num_classes(); ++t) out += ",score_" + std::to_string(t);
  out += '\n';
  for (std::size_t i = 0; i < data.n(); ++i) {
    out += io::csv_field(row_label_name(data.rows[i])) + "," + io::csv_field(data.books[data.labels[i]].name) + "," +
           io::csv_field(data.books[predictions[i].label].name);
    for (double s : predictions[i].scores) out += "," + io::format_double17(s);
    out += '\n';
  }
  return out;
}

}  // namespace canon
