// canon: corpus analysis command-line tool.

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include "pipeline.hpp"

namespace {

using canon::cli::RunConfig;
using canon::cli::Workspace;

struct Flags {
  std::optional<std::string> config, manifest, out, features, measure, linkage, model, stopwords;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> folds;
  std::vector<std::string> sets;
  bool no_stem = false, no_pos = false, stratified = false;
};

void add_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config, "config file of `section.key = value` lines");
  cmd.add_option("--manifest", f.manifest, "corpus manifest (defaults to the cached corpus in --out)");
  cmd.add_option("--seed", f.seed, "random seed (default 42)");
  cmd.add_option("--out", f.out, "output directory (default canon_out)");
  cmd.add_option("--features", f.features, "counts | tfidf")->check(CLI::IsMember({"counts", "tfidf"}));
  cmd.add_option("--measure", f.measure, "euclidean | manhattan | jaccard | cosine, or a comma list");
  cmd.add_option("--linkage", f.linkage, "min | max | mean | median, or a comma list");
  cmd.add_option("--folds", f.folds, "number of cross-validation folds (default 10)");
  cmd.add_option("--model", f.model, "mnb | knn | svm | rf | all")->check(CLI::IsMember({"mnb", "knn", "svm", "rf", "all"}));
  cmd.add_option("--stopwords", f.stopwords, "stopword file, one token per line");
  cmd.add_flag("--no-stem", f.no_stem, "skip stemming");
  cmd.add_flag("--no-pos", f.no_pos, "skip part-of-speech counts");
  cmd.add_flag("--stratified", f.stratified, "stratify folds by book");
  cmd.add_option("--set", f.sets, "override any config key: --set section.key=value (repeatable)");
}

RunConfig resolve(const Flags& f) {
  RunConfig cfg;
  if (f.config) cfg.load_file(*f.config);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw canon::Error(canon::ErrorCode::InvalidArgument, "--set expects key=value, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.manifest) cfg.set("corpus.manifest", *f.manifest);
  if (f.stopwords) cfg.set("preprocess.stopwords", *f.stopwords);
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.set("run.out", *f.out);
  if (f.features) cfg.set("features.mode", *f.features);
  if (f.measure) cfg.set("distance.measures", *f.measure);
  if (f.linkage) cfg.set("distance.linkages", *f.linkage);
  if (f.folds) cfg.folds = *f.folds;
  if (f.model) cfg.set("classify.model", *f.model);
  if (f.no_stem) cfg.stem = false;
  if (f.no_pos) cfg.pos = false;
  if (f.stratified) cfg.stratified = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"canon: text mining and classification of a multi-book corpus"};
  app.require_subcommand(1);

  using Command = int (*)(Workspace&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"ingest", "load the manifest and write the corpus cache", canon::cli::cmd_ingest},
      {"preprocess", "token frequencies and part-of-speech counts", canon::cli::cmd_preprocess},
      {"dtm", "build the document-term matrix", canon::cli::cmd_dtm},
      {"dist", "chapter distance matrices, heatmaps and metric checks", canon::cli::cmd_dist},
      {"linkage", "book distance matrices for each linkage", canon::cli::cmd_linkage},
      {"corr", "correlation between distance measures", canon::cli::cmd_corr},
      {"train", "train one classifier on all chapters", canon::cli::cmd_train},
      {"eval", "cross-validated grid search", canon::cli::cmd_eval},
      {"report", "run every stage into <out>/report", canon::cli::cmd_report},
  };
  Flags flags;
  std::map<CLI::App*, Command> dispatch;
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_flags(*sub, flags);
    dispatch[sub] = fn;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    Workspace ws(resolve(flags));
    for (auto* sub : app.get_subcommands()) return dispatch.at(sub)(ws);
    return 2;
  } catch (const canon::Error& e) {
    std::cerr << "canon: " << e.what() << "\n";
    return canon::cli::exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "canon: internal error: " << e.what() << "\n";
    return 4;
  }
}
