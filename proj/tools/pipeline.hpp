#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "canon/classify.hpp"
#include "canon/corpus.hpp"
#include "canon/distance.hpp"
#include "canon/dtm.hpp"
#include "canon/evaluate.hpp"
#include "canon/preprocess.hpp"

namespace canon::cli {

/// Everything a command needs. Keys mirror the config file
/// (`section.key = value`); see RunConfig::set for the list.
struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path corpus_root;  ///< defaults to the manifest's directory
  std::filesystem::path stopwords;    ///< empty means the built-in list
  bool lowercase = true;
  bool stem = true;
  bool pos = true;
  std::size_t top_k = 20;

  FeatureMode features = FeatureMode::Counts;
  std::vector<Measure> measures{std::begin(kAllMeasures), std::end(kAllMeasures)};
  std::vector<Linkage> linkages{std::begin(kAllLinkages), std::end(kAllLinkages)};
  CorrelationKind correlation = CorrelationKind::Pearson;
  std::size_t metric_samples = 10000;

  std::string model = "all";  ///< mnb | knn | svm | rf | all
  MnbParams mnb;
  KnnParams knn;
  SvmParams svm;
  RfParams rf;

  std::vector<double> grid_mnb_alpha{0.1, 0.5, 1.0, 2.0};
  std::vector<std::size_t> grid_knn_k{1, 3, 5, 7, 11, 21};
  std::vector<double> grid_svm_lambda{1e-4, 1e-3, 1e-2, 1e-1};
  std::vector<std::size_t> grid_svm_epochs{20, 50};
  std::vector<std::size_t> grid_rf_trees{50, 200};
  std::vector<std::optional<std::size_t>> grid_rf_depth{std::nullopt, 20};
  std::vector<std::optional<std::size_t>> grid_rf_mtry{std::nullopt};

  std::size_t folds = 10;
  bool stratified = false;
  std::uint64_t seed = 42;
  std::filesystem::path out = "canon_out";

  /// Applies one `key = value` setting. Throws InvalidArgument for an
  /// unknown key or a malformed value.
  void set(const std::string& key, const std::string& value);
  /// Reads `section.key = value` lines; `#` starts a comment.
  void load_file(const std::filesystem::path& path);
  /// Checks referenced paths and value ranges.
  void validate() const;

  PreprocessConfig preprocess() const;
  Grids grids() const;
  Params single_params(const std::string& model_name) const;
  static const std::vector<std::string>& keys();
};

/// Lazily loads and caches pipeline stages for one run.
class Workspace {
 public:
  explicit Workspace(RunConfig config);

  const RunConfig& config() const noexcept { return config_; }
  const Corpus& corpus();
  const std::vector<TokenList>& tokens();
  const DocTermMatrix& dtm();
  const WeightMatrix& weights();
  /// Rows used for distances and for the KNN/SVM/RF classifiers.
  const RealMatrix& feature_rows();
  LabeledDataset counts_dataset();
  LabeledDataset feature_dataset();

  std::filesystem::path dir(const std::string& name) const;
  void write(const std::filesystem::path& path, std::string_view contents) const;

 private:
  std::string cache_key(const std::string& stage) const;

  RunConfig config_;
  std::optional<Corpus> corpus_;
  std::string corpus_hash_;
  std::optional<std::vector<TokenList>> tokens_;
  std::optional<DocTermMatrix> dtm_;
  std::optional<WeightMatrix> weights_;
  std::optional<RealMatrix> feature_rows_;
};

int cmd_ingest(Workspace& ws);
int cmd_preprocess(Workspace& ws);
int cmd_dtm(Workspace& ws);
int cmd_dist(Workspace& ws);
int cmd_linkage(Workspace& ws);
int cmd_corr(Workspace& ws);
int cmd_train(Workspace& ws);
int cmd_eval(Workspace& ws);
int cmd_report(Workspace& ws);

/// Maps an error category to the process exit code (2, 3 or 4).
int exit_code(const Error& e) noexcept;

}  // namespace canon::cli
