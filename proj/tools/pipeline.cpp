#include "pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "canon/io.hpp"

namespace canon::cli {

namespace fs = std::filesystem;

// ---- config ---------------------------------------------------------------

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  throw Error(ErrorCode::InvalidArgument, "config " + key + " = '" + value + "': " + why);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    const auto t = io::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad_value(key, v, "expected a non-negative integer");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad_value(key, v, "expected an unsigned 64-bit integer");
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || !std::isfinite(out)) bad_value(key, v, "expected a finite number");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  bad_value(key, v, "expected true or false");
}

std::optional<std::size_t> parse_optional(const std::string& key, const std::string& v, std::string_view none) {
  if (v == none) return std::nullopt;
  return parse_size(key, v);
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& key, const std::string& v, F&& one) {
  std::vector<T> out;
  for (const auto& item : split_list(v)) out.push_back(one(key, item));
  if (out.empty()) bad_value(key, v, "expected a comma-separated list");
  return out;
}

template <typename E, typename F>
E parse_enum(const std::string& key, const std::string& v, F&& parse) {
  try {
    return parse(v);
  } catch (const Error& e) {
    bad_value(key, v, e.what());
  }
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = {
      "corpus.manifest",   "corpus.root",        "preprocess.stopwords", "preprocess.lowercase", "preprocess.stem",
      "preprocess.pos",    "preprocess.top_k",   "features.mode",        "distance.measures",    "distance.linkages",
      "distance.correlation", "distance.metric_samples", "classify.model", "mnb.alpha",         "knn.k",
      "knn.measure",       "svm.lambda",         "svm.epochs",           "rf.trees",             "rf.depth",
      "rf.mtry",           "grid.mnb.alpha",     "grid.knn.k",           "grid.svm.lambda",      "grid.svm.epochs",
      "grid.rf.trees",     "grid.rf.depth",      "grid.rf.mtry",         "eval.folds",           "eval.stratified",
      "run.seed",          "run.out"};
  return k;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& v = value;
  if (key == "corpus.manifest") manifest = v;
  else if (key == "corpus.root") corpus_root = v;
  else if (key == "preprocess.stopwords") stopwords = v;
  else if (key == "preprocess.lowercase") lowercase = parse_bool(key, v);
  else if (key == "preprocess.stem") stem = parse_bool(key, v);
  else if (key == "preprocess.pos") pos = parse_bool(key, v);
  else if (key == "preprocess.top_k") top_k = parse_size(key, v);
  else if (key == "features.mode") features = parse_enum<FeatureMode>(key, v, parse_feature_mode);
  else if (key == "distance.measures") {
    measures = parse_list<Measure>(key, v, [](const std::string& k, const std::string& s) {
      return parse_enum<Measure>(k, s, parse_measure);
    });
  } else if (key == "distance.linkages") {
    linkages = parse_list<Linkage>(key, v, [](const std::string& k, const std::string& s) {
      return parse_enum<Linkage>(k, s, parse_linkage);
    });
  } else if (key == "distance.correlation") {
    if (v == "pearson") correlation = CorrelationKind::Pearson;
    else if (v == "spearman") correlation = CorrelationKind::Spearman;
    else bad_value(key, v, "expected pearson or spearman");
  } else if (key == "distance.metric_samples") metric_samples = parse_size(key, v);
  else if (key == "classify.model") {
    if (v != "mnb" && v != "knn" && v != "svm" && v != "rf" && v != "all") bad_value(key, v, "expected mnb, knn, svm, rf or all");
    model = v;
  } else if (key == "mnb.alpha") mnb.alpha = parse_real(key, v);
  else if (key == "knn.k") knn.k = parse_size(key, v);
  else if (key == "knn.measure") knn.measure = parse_enum<Measure>(key, v, parse_measure);
  else if (key == "svm.lambda") svm.lambda = parse_real(key, v);
  else if (key == "svm.epochs") svm.epochs = parse_size(key, v);
  else if (key == "rf.trees") rf.trees = parse_size(key, v);
  else if (key == "rf.depth") rf.max_depth = parse_optional(key, v, "none");
  else if (key == "rf.mtry") rf.features_per_split = parse_optional(key, v, "sqrt");
  else if (key == "grid.mnb.alpha") grid_mnb_alpha = parse_list<double>(key, v, parse_real);
  else if (key == "grid.knn.k") grid_knn_k = parse_list<std::size_t>(key, v, parse_size);
  else if (key == "grid.svm.lambda") grid_svm_lambda = parse_list<double>(key, v, parse_real);
  else if (key == "grid.svm.epochs") grid_svm_epochs = parse_list<std::size_t>(key, v, parse_size);
  else if (key == "grid.rf.trees") grid_rf_trees = parse_list<std::size_t>(key, v, parse_size);
  else if (key == "grid.rf.depth") {
    grid_rf_depth = parse_list<std::optional<std::size_t>>(
        key, v, [](const std::string& k, const std::string& s) { return parse_optional(k, s, "none"); });
  } else if (key == "grid.rf.mtry") {
    grid_rf_mtry = parse_list<std::optional<std::size_t>>(
        key, v, [](const std::string& k, const std::string& s) { return parse_optional(k, s, "sqrt"); });
  } else if (key == "eval.folds") folds = parse_size(key, v);
  else if (key == "eval.stratified") stratified = parse_bool(key, v);
  else if (key == "run.seed") seed = parse_u64(key, v);
  else if (key == "run.out") out = v;
  else throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
}

void RunConfig::load_file(const fs::path& path) {
  const auto text = io::read_file(path);
  std::size_t line_no = 0;
  for (auto line : io::split_lines(text)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = io::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidArgument, path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(io::trim(line.substr(0, eq)));
    std::string value(io::trim(line.substr(eq + 1)));
    // Relative paths in a config file resolve against the file's directory.
    if ((key == "corpus.manifest" || key == "corpus.root" || key == "preprocess.stopwords") && !value.empty() &&
        fs::path(value).is_relative()) {
      value = (path.parent_path() / value).lexically_normal().string();
    }
    set(key, value);
  }
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (!manifest.empty() && !fs::is_regular_file(manifest)) fail("manifest not found: " + manifest.string());
  if (!corpus_root.empty() && !fs::is_directory(corpus_root)) fail("corpus root not found: " + corpus_root.string());
  if (!stopwords.empty() && !fs::is_regular_file(stopwords)) fail("stopword file not found: " + stopwords.string());
  if (top_k == 0) fail("preprocess.top_k must be positive");
  if (folds < 2) fail("eval.folds must be at least 2");
  if (measures.empty() || linkages.empty()) fail("measure and linkage lists must be nonempty");
  if (out.empty()) fail("run.out must not be empty");
}

PreprocessConfig RunConfig::preprocess() const {
  PreprocessConfig p;
  if (!stopwords.empty()) p.stopwords = std::make_shared<const StopwordSet>(read_stopwords(stopwords));
  p.lowercase = lowercase;
  p.stem = stem;
  return p;
}

Grids RunConfig::grids() const {
  Grids g;
  for (double a : grid_mnb_alpha) g.mnb.emplace_back(MnbParams{a});
  for (auto k : grid_knn_k) g.knn.emplace_back(KnnParams{k, knn.measure});
  for (double l : grid_svm_lambda) {
    for (auto e : grid_svm_epochs) g.svm.emplace_back(SvmParams{l, e});
  }
  for (auto t : grid_rf_trees) {
    for (const auto& d : grid_rf_depth) {
      for (const auto& m : grid_rf_mtry) g.rf.emplace_back(RfParams{t, d, m});
    }
  }
  return g;
}

Params RunConfig::single_params(const std::string& name) const {
  if (name == "mnb") return mnb;
  if (name == "knn") return knn;
  if (name == "svm") return svm;
  if (name == "rf") return rf;
  throw Error(ErrorCode::InvalidArgument, "a single model is required here (mnb, knn, svm or rf), got '" + name + "'");
}

// ---- workspace ------------------------------------------------------------

Workspace::Workspace(RunConfig config) : config_(std::move(config)) { config_.validate(); }

fs::path Workspace::dir(const std::string& name) const {
  const auto d = config_.out / name;
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + d.string() + ": " + ec.message());
  return d;
}

void Workspace::write(const fs::path& path, std::string_view contents) const { io::write_file_atomic(path, contents); }

std::string Workspace::cache_key(const std::string& stage) const {
  return io::hex64(io::fnv1a(corpus_hash_ + "|" + stage + "|" + config_.preprocess().fingerprint()));
}

const Corpus& Workspace::corpus() {
  if (corpus_) return *corpus_;
  const auto cached = config_.out / "corpus.tsv";
  std::string record;
  if (!config_.manifest.empty()) {
    const auto manifest = read_manifest(config_.manifest);
    const auto root = config_.corpus_root.empty() ? config_.manifest.parent_path() : config_.corpus_root;
    corpus_ = load_corpus(root, manifest);
    record = write_corpus_cache(*corpus_);
  } else if (fs::is_regular_file(cached)) {
    record = io::read_file(cached);
    corpus_ = read_corpus_cache(record);
  } else {
    throw Error(ErrorCode::InvalidArgument, "no corpus: pass --manifest or run `canon ingest` into " + config_.out.string());
  }
  corpus_hash_ = io::hex64(io::fnv1a(record));
  return *corpus_;
}

const std::vector<TokenList>& Workspace::tokens() {
  if (tokens_) return *tokens_;
  const auto& c = corpus();
  const auto cfg = config_.preprocess();
  std::vector<TokenList> out;
  out.reserve(c.size());
  for (const auto& doc : c.documents()) out.push_back(pipeline(doc, cfg));
  tokens_ = std::move(out);
  return *tokens_;
}

const DocTermMatrix& Workspace::dtm() {
  if (dtm_) return *dtm_;
  corpus();
  const auto stem = dir("cache") / ("dtm-" + cache_key("dtm"));
  if (fs::exists(stem.string() + ".mtx")) {
    dtm_ = read_dtm(stem);
    return *dtm_;
  }
  const auto& c = corpus();
  std::vector<RowLabel> rows;
  for (const auto& doc : c.documents()) rows.push_back(RowLabel{doc.book, doc.chapter_index});
  dtm_ = build_dtm(c.books(), rows, tokens());
  write_dtm(*dtm_, stem);
  return *dtm_;
}

const WeightMatrix& Workspace::weights() {
  if (!weights_) weights_ = tfidf(dtm());
  return *weights_;
}

const RealMatrix& Workspace::feature_rows() {
  if (!feature_rows_) {
    feature_rows_ = config_.features == FeatureMode::Counts ? to_real(dtm().counts) : weights().weights;
  }
  return *feature_rows_;
}

LabeledDataset Workspace::counts_dataset() { return make_dataset(dtm()); }

LabeledDataset Workspace::feature_dataset() {
  return config_.features == FeatureMode::Counts ? make_dataset(dtm()) : make_dataset(weights());
}

int exit_code(const Error& e) noexcept {
  switch (e.category()) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Internal: return 4;
  }
  return 4;
}

// ---- commands -------------------------------------------------------------

namespace {

std::string slug(std::string_view name) {
  std::string out;
  for (unsigned char c : name) out += std::isalnum(c) ? static_cast<char>(std::tolower(c)) : '_';
  return out;
}

void write_pruned(Workspace& ws, const fs::path& d) {
  std::string out = "book,chapter_index\n";
  for (const auto& r : ws.dtm().pruned) out += io::csv_field(r.book.name) + "," + std::to_string(r.chapter_index) + "\n";
  ws.write(d / "pruned.csv", out);
}

void preprocess_outputs(Workspace& ws, const fs::path& d) {
  const auto& c = ws.corpus();
  const auto& tokens = ws.tokens();
  const auto& cfg = ws.config();
  std::vector<TokenList> per_book(c.book_count());
  std::vector<std::size_t> raw(c.book_count(), 0), docs(c.book_count(), 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto b = c.documents()[i].book.id;
    per_book[b].insert(per_book[b].end(), tokens[i].begin(), tokens[i].end());
    raw[b] += tokenize_words(c.documents()[i].text, cfg.lowercase).size();
    ++docs[b];
  }
  TokenList all;
  std::string counts = "book,chapters,raw_tokens,clean_tokens,distinct_stems\n";
  for (const auto& b : c.books()) {
    const auto& t = per_book[b.id];
    all.insert(all.end(), t.begin(), t.end());
    const auto distinct = std::set<std::string>(t.begin(), t.end()).size();
    counts += io::csv_field(b.name) + "," + std::to_string(docs[b.id]) + "," + std::to_string(raw[b.id]) + "," +
              std::to_string(t.size()) + "," + std::to_string(distinct) + "\n";
    if (!t.empty()) ws.write(d / ("frequency_" + slug(b.name) + ".csv"), frequency_csv(frequency_report(t, cfg.top_k)));
  }
  ws.write(d / "token_counts.csv", counts);
  if (all.empty()) throw Error(ErrorCode::AllDocumentsEmpty, "preprocessing removed every token");
  ws.write(d / "frequency.csv", frequency_csv(frequency_report(all, cfg.top_k)));
  if (cfg.pos) ws.write(d / "pos_counts.csv", pos_counts_csv(pos_counts(pos_tag(all))));
}

void dtm_outputs(Workspace& ws, const fs::path& d) {
  const auto& m = ws.dtm();
  write_dtm(m, d / "dtm");
  if (ws.config().features == FeatureMode::Tfidf) write_weights(ws.weights(), d / "tfidf");
  std::string shapes = "book,chapters,terms\n";
  for (const auto& b : m.books) {
    bool any = std::any_of(m.rows.begin(), m.rows.end(), [&](const RowLabel& r) { return r.book == b; });
    if (!any) {
      shapes += io::csv_field(b.name) + ",0,0\n";
      continue;
    }
    const auto s = slice_book(m, b, SliceVocab::Pruned);
    shapes += io::csv_field(b.name) + "," + std::to_string(s.n()) + "," + std::to_string(s.p()) + "\n";
  }
  shapes += "all," + std::to_string(m.n()) + "," + std::to_string(m.p()) + "\n";
  ws.write(d / "shapes.csv", shapes);
  write_pruned(ws, d);
}

std::vector<DistanceMatrix> distance_outputs(Workspace& ws, const fs::path& d, bool metric_reports) {
  const auto& cfg = ws.config();
  std::vector<DistanceMatrix> out;
  for (auto m : cfg.measures) {
    auto dm = pairwise(ws.feature_rows(), ws.dtm().rows, m);
    const std::string name(to_string(m));
    ws.write(d / (name + ".csv"), distance_csv(dm));
    ws.write(d / (name + ".svg"), heatmap_svg(dm));
    if (metric_reports) {
      const auto report = metric_check(dm, cfg.metric_samples, cfg.seed, &ws.feature_rows());
      ws.write(d / ("metric_" + name + ".csv"), metric_report_text(report));
    }
    out.push_back(std::move(dm));
  }
  return out;
}

void linkage_outputs(Workspace& ws, const fs::path& d, const std::vector<DistanceMatrix>& mats) {
  for (const auto& dm : mats) {
    for (auto l : ws.config().linkages) {
      const auto b = book_linkage(dm, ws.dtm().books, l);
      const auto name = std::string(to_string(dm.measure)) + "_" + std::string(to_string(l));
      ws.write(d / (name + ".csv"), book_distance_csv(b));
      ws.write(d / (name + ".svg"), heatmap_svg(b));
    }
  }
}

void corr_outputs(Workspace& ws, const fs::path& d, const std::vector<DistanceMatrix>& mats) {
  const auto c = measure_correlation(mats, ws.config().correlation);
  ws.write(d / "correlation.csv", correlation_csv(c));
  std::vector<std::string> labels;
  for (auto m : c.measures) labels.emplace_back(to_string(m));
  ws.write(d / "correlation.svg", heatmap_svg(c.values, labels, "correlation between distance measures"));
}

FoldAssignment folds_for(Workspace& ws) {
  const auto& cfg = ws.config();
  const auto n = ws.dtm().n();
  return cfg.stratified ? make_stratified_folds(ws.dtm().labels(), cfg.folds, cfg.seed)
                        : make_folds(n, cfg.folds, cfg.seed);
}

void write_search(Workspace& ws, const fs::path& d, const std::string& model, const GridSearchResult& g) {
  const auto& books = ws.dtm().books;
  const auto& best = g.results[g.best];
  ws.write(d / (model + "_grid.csv"), grid_csv(model, g));
  ws.write(d / (model + "_confusion.csv"), confusion_csv(best.confusion, books));
  ws.write(d / (model + "_confusion.svg"), confusion_svg(best.confusion, books, model + " confusion matrix"));
  ws.write(d / (model + "_folds.csv"), fold_accuracy_csv(best));
  std::string ovr = "book,one_vs_rest_accuracy\n";
  const auto acc = one_vs_rest_accuracy(best.confusion);
  for (std::size_t t = 0; t < acc.size(); ++t) ovr += io::csv_field(books[t].name) + "," + io::format_double17(acc[t]) + "\n";
  ws.write(d / (model + "_per_class.csv"), ovr);
  save_model(g.best_model, d / (model + ".model"));
}

Benchmark eval_outputs(Workspace& ws, const fs::path& d) {
  const auto& cfg = ws.config();
  const auto folds = folds_for(ws);
  ws.write(d / "folds.csv", folds_csv(folds));
  for (auto f : folds.sizes()) {
    if (f == 0) throw Error(ErrorCode::InvariantViolation, "empty fold");
  }
  const auto counts = ws.counts_dataset();
  const auto features = ws.feature_dataset();
  const auto grids = cfg.grids();
  Benchmark bench;
  if (cfg.model == "all") {
    bench = benchmark_all(counts, features, folds, grids, cfg.seed);
  } else {
    bench.folds = folds;
    const auto& data = cfg.model == "mnb" ? counts : features;
    const auto& grid = cfg.model == "mnb" ? grids.mnb : cfg.model == "svm" ? grids.svm : cfg.model == "rf" ? grids.rf : grids.knn;
    bench.rows.push_back({cfg.model, grid_search(grid, data, folds, cfg.seed)});
  }
  for (const auto& row : bench.rows) write_search(ws, d, row.model, row.search);
  ws.write(d / "comparison.csv", comparison_csv(bench));
  return bench;
}

}  // namespace

int cmd_ingest(Workspace& ws) {
  const auto& c = ws.corpus();
  const auto d = ws.dir("ingest");
  ws.write(ws.config().out / "corpus.tsv", write_corpus_cache(c));
  std::string summary = "book_id,book,chapters\n";
  const auto per = c.chapters_per_book();
  for (const auto& b : c.books()) summary += std::to_string(b.id) + "," + io::csv_field(b.name) + "," + std::to_string(per[b.id]) + "\n";
  ws.write(d / "chapters.csv", summary);
  std::cout << c.book_count() << " books, " << c.size() << " chapters\n";
  return 0;
}

int cmd_preprocess(Workspace& ws) {
  preprocess_outputs(ws, ws.dir("preprocess"));
  std::size_t total = 0;
  for (const auto& t : ws.tokens()) total += t.size();
  std::cout << total << " tokens after preprocessing\n";
  return 0;
}

int cmd_dtm(Workspace& ws) {
  dtm_outputs(ws, ws.dir("dtm"));
  const auto& m = ws.dtm();
  std::cout << m.n() << " x " << m.p() << "\n";
  if (!m.pruned.empty()) std::cerr << "note: " << m.pruned.size() << " empty chapters pruned (see pruned.csv)\n";
  return 0;
}

int cmd_dist(Workspace& ws) {
  const auto mats = distance_outputs(ws, ws.dir("dist"), true);
  std::cout << mats.size() << " distance matrices of " << ws.dtm().n() << " chapters\n";
  return 0;
}

int cmd_linkage(Workspace& ws) {
  const auto d = ws.dir("linkage");
  std::vector<DistanceMatrix> mats;
  for (auto m : ws.config().measures) mats.push_back(pairwise(ws.feature_rows(), ws.dtm().rows, m));
  linkage_outputs(ws, d, mats);
  std::cout << mats.size() * ws.config().linkages.size() << " book distance matrices\n";
  return 0;
}

int cmd_corr(Workspace& ws) {
  std::vector<DistanceMatrix> mats;
  for (auto m : ws.config().measures) mats.push_back(pairwise(ws.feature_rows(), ws.dtm().rows, m));
  corr_outputs(ws, ws.dir("corr"), mats);
  std::cout << io::read_file(ws.config().out / "corr" / "correlation.csv");
  return 0;
}

int cmd_train(Workspace& ws) {
  const auto& cfg = ws.config();
  const auto model_name = cfg.model == "all" ? std::string("mnb") : cfg.model;
  const auto data = model_name == "mnb" ? ws.counts_dataset() : ws.feature_dataset();
  const auto model = train(data, cfg.single_params(model_name), cfg.seed);
  const auto d = ws.dir("train");
  save_model(model, d / (model_name + ".model"));
  const auto preds = classify_all(model, data.features);
  ws.write(d / (model_name + "_scores.csv"), scores_csv(data, preds));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) correct += preds[i].label == data.labels[i];
  std::cout << model_name << " training accuracy " << io::format_double(static_cast<double>(correct) / static_cast<double>(preds.size()))
            << "\n";
  return 0;
}

int cmd_eval(Workspace& ws) {
  const auto bench = eval_outputs(ws, ws.dir("eval"));
  std::cout << comparison_csv(bench);
  return 0;
}

int cmd_report(Workspace& ws) {
  const auto d = ws.dir("report");
  const auto& c = ws.corpus();
  ws.write(d / "corpus.tsv", write_corpus_cache(c));
  preprocess_outputs(ws, d);
  dtm_outputs(ws, d);
  const auto mats = distance_outputs(ws, d, true);
  linkage_outputs(ws, d, mats);
  corr_outputs(ws, d, mats);
  const auto bench = eval_outputs(ws, d);

  const auto& m = ws.dtm();
  std::string summary = "# Corpus analysis report\n\n";
  summary += "- books: " + std::to_string(c.book_count()) + "\n- chapters: " + std::to_string(c.size()) +
             "\n- document-term matrix: " + std::to_string(m.n()) + " x " + std::to_string(m.p()) +
             "\n- pruned empty chapters: " + std::to_string(m.pruned.size()) +
             "\n- features: " + std::string(to_string(ws.config().features)) +
             "\n- folds: " + std::to_string(ws.config().folds) + ", seed " + std::to_string(ws.config().seed) + "\n\n";
  summary += "## Classifier comparison\n\n| model | best params | CV accuracy |\n|---|---|---|\n";
  for (const auto& row : bench.rows) {
    summary += "| " + row.model + " | " + describe(row.search.best_params()) + " | " +
               io::format_double(row.search.best_accuracy()) + " |\n";
  }
  summary += "\n## Files\n\n";
  summary += "- frequency.csv, frequency_<book>.csv, token_counts.csv, pos_counts.csv: token statistics\n";
  summary += "- dtm.mtx with dtm_rows.csv, dtm_vocab.txt, dtm_books.csv; shapes.csv: matrix shapes per book\n";
  summary += "- <measure>.csv/.svg: chapter distance matrices and heatmaps; metric_<measure>.csv: axiom checks\n";
  summary += "- <measure>_<linkage>.csv/.svg: book distance matrices\n";
  summary += "- correlation.csv/.svg: correlation between measures\n";
  summary += "- comparison.csv, <model>_grid.csv, <model>_confusion.csv/.svg, folds.csv: classifier evaluation\n";
  ws.write(d / "README.md", summary);
  std::cout << comparison_csv(bench);
  return 0;
}

}  // namespace canon::cli
