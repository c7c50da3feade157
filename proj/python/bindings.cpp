// Python bindings for the canon core library.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "canon/classify.hpp"
#include "canon/corpus.hpp"
#include "canon/distance.hpp"
#include "canon/dtm.hpp"
#include "canon/evaluate.hpp"
#include "canon/preprocess.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace canon;

namespace {

template <typename T>
py::array_t<double> dense(const SparseMatrix<T>& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) a(i, j) = 0.0;
    const auto r = m.row(i);
    for (std::size_t k = 0; k < r.columns.size(); ++k) a(i, r.columns[k]) = static_cast<double>(r.values[k]);
  }
  return out;
}

py::array_t<double> square(const std::vector<double>& values, std::size_t n) {
  py::array_t<double> out({n, n});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

RealMatrix from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
  if (x.ndim() != 2) throw Error(ErrorCode::DimensionMismatch, "expected a 2-d array");
  const auto n = static_cast<std::size_t>(x.shape(0)), p = static_cast<std::size_t>(x.shape(1));
  RealMatrix m(p);
  for (std::size_t i = 0; i < n; ++i) m.push_dense_row(std::span<const double>(x.data() + i * p, p));
  return m;
}

// Opaque holder; pybind11's stl casters would otherwise unpack the variant.
struct ModelHandle {
  Model model;
};

// Classes are 0..max(y); their names are the ids.
LabeledDataset dataset(const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
                       const std::vector<BookId>& y) {
  LabeledDataset d;
  d.features = from_numpy(x);
  d.labels = y;
  if (y.size() != d.n()) throw Error(ErrorCode::DimensionMismatch, "one label per row required");
  const BookId classes = y.empty() ? 0 : *std::max_element(y.begin(), y.end()) + 1;
  for (BookId t = 0; t < classes; ++t) d.books.push_back({t, std::to_string(t)});
  d.rows.resize(d.n());
  return d;
}

// Hyperparameters from keyword arguments, e.g. params("knn", k=3).
Params make_params(const std::string& model, const py::kwargs& kw) {
  auto get = [&](const char* key, auto fallback) {
    return kw.contains(key) ? kw[key].cast<decltype(fallback)>() : fallback;
  };
  auto optional_size = [&](const char* key) -> std::optional<std::size_t> {
    if (!kw.contains(key) || kw[key].is_none()) return std::nullopt;
    return kw[key].cast<std::size_t>();
  };
  if (model == "mnb") return MnbParams{get("alpha", 1.0)};
  if (model == "knn") return KnnParams{get("k", std::size_t{5}), parse_measure(get("measure", std::string("euclidean")))};
  if (model == "svm") return SvmParams{get("lambda_", 1e-3), get("epochs", std::size_t{20})};
  if (model == "rf") return RfParams{get("trees", std::size_t{100}), optional_size("max_depth"), optional_size("mtry")};
  throw Error(ErrorCode::InvalidArgument, "unknown model '" + model + "'");
}

}  // namespace

PYBIND11_MODULE(_canon, m) {
  m.doc() = "Text mining and classification of multi-book corpora";

  static py::exception<Error> error(m, "CanonError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::enum_<Measure>(m, "Measure")
      .value("EUCLIDEAN", Measure::Euclidean)
      .value("MANHATTAN", Measure::Manhattan)
      .value("JACCARD", Measure::Jaccard)
      .value("COSINE", Measure::Cosine);
  py::enum_<Linkage>(m, "Linkage")
      .value("MIN", Linkage::Min)
      .value("MAX", Linkage::Max)
      .value("MEAN", Linkage::Mean)
      .value("MEDIAN", Linkage::Median);

  // ---- corpus and preprocessing ----

  py::class_<BookLabel>(m, "Book")
      .def_readonly("id", &BookLabel::id)
      .def_readonly("name", &BookLabel::name)
      .def("__repr__", [](const BookLabel& b) { return "Book(" + std::to_string(b.id) + ", '" + b.name + "')"; });
  py::class_<RawDocument>(m, "Document")
      .def_readonly("book", &RawDocument::book)
      .def_readonly("chapter", &RawDocument::chapter_index)
      .def_readonly("text", &RawDocument::text);
  py::class_<Corpus>(m, "Corpus")
      .def_property_readonly("books", &Corpus::books)
      .def_property_readonly("documents", &Corpus::documents)
      .def("__len__", &Corpus::size)
      .def("to_cache", &write_corpus_cache)
      .def_static("from_cache", &read_corpus_cache, "text"_a);

  m.def(
      "load_corpus",
      [](const std::filesystem::path& manifest) { return load_corpus(manifest.parent_path(), read_manifest(manifest)); },
      "manifest"_a, "Load every book listed in a manifest file.");
  m.def("tokenize", &tokenize_words, "text"_a, "lowercase"_a = true);
  m.def("sentences", &tokenize_sentences, "text"_a);
  m.def("stem", &stem, "token"_a, "Porter stem of one lowercase token.");
  m.def(
      "preprocess",
      [](std::string_view text, bool stem_tokens) {
        PreprocessConfig c;
        c.stem = stem_tokens;
        return pipeline(text, c);
      },
      "text"_a, "stem"_a = true, "Tokenize, drop stopwords, punctuation and digits, then stem.");
  m.def(
      "frequencies",
      [](const TokenList& tokens, std::size_t top_k) {
        std::vector<std::pair<std::string, std::size_t>> out;
        for (const auto& e : frequency_report(tokens, top_k).entries) out.emplace_back(e.token, e.count);
        return out;
      },
      "tokens"_a, "top_k"_a = 20);

  // ---- matrices ----

  py::class_<DocTermMatrix>(m, "DocTermMatrix")
      .def_property_readonly("shape", [](const DocTermMatrix& d) { return py::make_tuple(d.n(), d.p()); })
      .def_property_readonly("vocab", [](const DocTermMatrix& d) { return d.vocab.terms(); })
      .def_property_readonly("books", [](const DocTermMatrix& d) { return d.books; })
      .def_property_readonly("labels", &DocTermMatrix::labels)
      .def_property_readonly("row_names", [](const DocTermMatrix& d) {
        std::vector<std::string> out;
        for (const auto& r : d.rows) out.push_back(row_label_name(r));
        return out;
      })
      .def("counts", [](const DocTermMatrix& d) { return dense(d.counts); })
      .def("tfidf", [](const DocTermMatrix& d) { return dense(tfidf(d).weights); })
      .def("to_matrix_market", [](const DocTermMatrix& d) { return to_matrix_market(d.counts); })
      .def("save", &write_dtm, "stem"_a)
      .def_static("load", &read_dtm, "stem"_a)
      .def("__eq__", [](const DocTermMatrix& a, const DocTermMatrix& b) { return a == b; });

  m.def(
      "build_dtm", [](const Corpus& c, bool stem_tokens) {
        PreprocessConfig cfg;
        cfg.stem = stem_tokens;
        return build_dtm(c, cfg);
      },
      "corpus"_a, "stem"_a = true);

  // ---- distances ----

  m.def(
      "pairwise",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, const std::string& measure) {
        const auto rows = from_numpy(x);
        std::vector<RowLabel> labels(rows.rows());
        const auto d = pairwise(rows, labels, parse_measure(measure));
        return square(d.values, d.n);
      },
      "x"_a, "measure"_a = "euclidean", "Distance between every pair of rows of a 2-d array.");
  m.def(
      "book_linkage",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, const std::vector<BookId>& books,
         const std::string& measure, const std::string& linkage) {
        const auto rows = from_numpy(x);
        if (books.size() != rows.rows()) throw Error(ErrorCode::DimensionMismatch, "one book id per row required");
        std::vector<RowLabel> labels;
        BookId top = 0;
        for (auto b : books) {
          labels.push_back({BookLabel{b, std::to_string(b)}, 1});
          top = std::max(top, b);
        }
        std::vector<BookLabel> names;
        for (BookId b = 0; b <= top; ++b) names.push_back({b, std::to_string(b)});
        const auto d = pairwise(rows, labels, parse_measure(measure));
        const auto bd = book_linkage(d, names, parse_linkage(linkage));
        return square(bd.values, names.size());
      },
      "x"_a, "books"_a, "measure"_a = "euclidean", "linkage"_a = "mean");
  m.def(
      "measure_correlation",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, const std::vector<std::string>& names,
         bool spearman) {
        std::vector<Measure> measures;
        for (const auto& n : names) measures.push_back(parse_measure(n));
        const auto c = measure_correlation(from_numpy(x), measures,
                                           spearman ? CorrelationKind::Spearman : CorrelationKind::Pearson);
        return square(c.values, measures.size());
      },
      "x"_a, "measures"_a = std::vector<std::string>{"euclidean", "manhattan", "jaccard", "cosine"},
      "spearman"_a = false);
  m.def(
      "metric_violations",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, const std::string& measure,
         std::size_t samples, std::uint64_t seed) {
        const auto rows = from_numpy(x);
        const auto d = pairwise(rows, std::vector<RowLabel>(rows.rows()), parse_measure(measure));
        const auto r = metric_check(d, samples, seed, &rows);
        py::dict out;
        out["nonnegativity"] = r.nonnegativity;
        out["symmetry"] = r.symmetry;
        out["identity"] = r.identity;
        out["triangle"] = r.triangle;
        return out;
      },
      "x"_a, "measure"_a, "samples"_a = 10000, "seed"_a = 42);

  // ---- classifiers ----

  py::class_<ModelHandle>(m, "Model")
      .def_property_readonly("kind", [](const ModelHandle& h) {
        return std::visit([](const auto& v) { return std::string(model_name(Params{v.params})); }, h.model);
      })
      .def("serialize", [](const ModelHandle& h) { return serialize_model(h.model); })
      .def_static("deserialize", [](std::string_view text) { return ModelHandle{deserialize_model(text)}; }, "text"_a)
      .def("save", [](const ModelHandle& h, const std::filesystem::path& p) { save_model(h.model, p); }, "path"_a)
      .def_static("load", [](const std::filesystem::path& p) { return ModelHandle{load_model(p)}; }, "path"_a)
      .def("__eq__", [](const ModelHandle& a, const ModelHandle& b) { return a.model == b.model; });

  m.def(
      "train",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, const std::vector<BookId>& y,
         const std::string& model, std::uint64_t seed, const py::kwargs& kw) {
        const auto d = dataset(x, y);
        return ModelHandle{train(d, make_params(model, kw), seed)};
      },
      "x"_a, "y"_a, "model"_a = "mnb", "seed"_a = 42,
      "Train a classifier. Hyperparameters as keywords: alpha (mnb); k, measure (knn); lambda_, epochs (svm); "
      "trees, max_depth, mtry (rf).");
  m.def(
      "predict",
      [](const ModelHandle& h, const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
        std::vector<BookId> out;
        for (const auto& p : classify_all(h.model, from_numpy(x))) out.push_back(p.label);
        return out;
      },
      "model"_a, "x"_a);
  m.def(
      "scores",
      [](const ModelHandle& h, const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
        const auto preds = classify_all(h.model, from_numpy(x));
        const auto T = num_classes(h.model);
        py::array_t<double> out({preds.size(), T});
        auto a = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < preds.size(); ++i) {
          for (std::size_t t = 0; t < T; ++t) a(i, t) = preds[i].scores[t];
        }
        return out;
      },
      "model"_a, "x"_a);

  // ---- evaluation ----

  m.def(
      "make_folds", [](std::size_t n, std::size_t folds, std::uint64_t seed) { return make_folds(n, folds, seed).fold_of; },
      "n"_a, "folds"_a = 10, "seed"_a = 42);
  m.def(
      "cross_validate",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, const std::vector<BookId>& y,
         const std::string& model, std::size_t folds, std::uint64_t seed, const py::kwargs& kw) {
        const auto d = dataset(x, y);
        const auto classes = d.num_classes();
        const auto cv = cross_validate(make_trainer(make_params(model, kw)), d, make_folds(d.n(), folds, seed), seed);
        py::dict out;
        out["pooled_accuracy"] = cv.pooled_accuracy;
        out["mean_fold_accuracy"] = cv.mean_fold_accuracy;
        out["fold_accuracy"] = cv.fold_accuracy;
        out["predictions"] = cv.predictions;
        std::vector<std::vector<std::uint64_t>> cm(classes, std::vector<std::uint64_t>(classes));
        for (std::size_t t = 0; t < classes; ++t) {
          for (std::size_t p = 0; p < classes; ++p) cm[t][p] = cv.confusion(t, p);
        }
        out["confusion"] = cm;
        return out;
      },
      "x"_a, "y"_a, "model"_a = "mnb", "folds"_a = 10, "seed"_a = 42);
}
