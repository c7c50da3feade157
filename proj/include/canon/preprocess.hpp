#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "canon/corpus.hpp"

namespace canon {

using TokenList = std::vector<std::string>;
using StopwordSet = std::unordered_set<std::string>;

// ---- tokenization ---------------------------------------------------------

/// Maximal runs of letters, with apostrophes allowed between letters, in
/// input order. ASCII letters and Latin-1/Latin Extended letters count as
/// alphabetic; U+2019 is normalized to an ASCII apostrophe.
TokenList tokenize_words(std::string_view text, bool lowercase = true);

/// Splits after `.`, `!` or `?` (plus closing quotes/brackets) when followed
/// by whitespace or end of input. A period after a known abbreviation does
/// not end a sentence. Returned sentences are whitespace-trimmed.
std::vector<std::string> tokenize_sentences(std::string_view text);

// ---- noise removal --------------------------------------------------------

/// Bundled English stopword list (data/stopwords_en.txt, version 1).
const StopwordSet& default_stopwords();
std::string_view default_stopwords_text();

/// One token per line; `#` starts a comment. Tokens are lowercased.
StopwordSet parse_stopwords(std::string_view text);
StopwordSet read_stopwords(const std::filesystem::path& file);

bool is_punctuation_token(std::string_view token);
bool is_digit_token(std::string_view token);

/// Drops stopwords, punctuation-only tokens and digit-only tokens; keeps order.
TokenList remove_noise(const TokenList& tokens, const StopwordSet& stopwords);

// ---- stemming -------------------------------------------------------------

/// Porter (1980) suffix stripping, steps 1a through 5b as published.
std::string stem(std::string_view token);

// ---- POS tagging ----------------------------------------------------------

struct PosTaggedToken {
  std::string token;
  std::string tag;

  friend bool operator==(const PosTaggedToken&, const PosTaggedToken&) = default;
};

/// The 36 Penn Treebank word-level tags.
const std::vector<std::string>& penn_tagset();

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::string tag(std::string_view token) const = 0;
};

/// Closed-class lexicon, then suffix rules (-ed VBD, -ing VBG, -ly RB,
/// -s NNS), then NN.
class RuleTagger final : public PosTagger {
 public:
  std::string tag(std::string_view token) const override;
};

std::vector<PosTaggedToken> pos_tag(const TokenList& tokens, const PosTagger& tagger = RuleTagger{});

/// Tag -> count, sorted by tag.
std::map<std::string, std::size_t> pos_counts(const std::vector<PosTaggedToken>& tagged);
std::string pos_counts_csv(const std::map<std::string, std::size_t>& counts);

// ---- frequency ------------------------------------------------------------

struct FrequencyEntry {
  std::string token;
  std::size_t count = 0;
  double ratio = 0.0;
};

/// Entries sorted by count descending, ties lexicographic. `total` counts all
/// tokens, not just the reported top_k.
struct FrequencyReport {
  std::vector<FrequencyEntry> entries;
  std::size_t total = 0;
};

FrequencyReport frequency_report(const TokenList& tokens, std::size_t top_k);
std::string frequency_csv(const FrequencyReport& report);

// ---- pipeline -------------------------------------------------------------

struct PreprocessConfig {
  std::shared_ptr<const StopwordSet> stopwords;  ///< null means default_stopwords()
  bool lowercase = true;
  bool remove_noise = true;
  bool stem = true;

  const StopwordSet& stopword_set() const { return stopwords ? *stopwords : default_stopwords(); }
  /// Stable text identifying the config, used in cache keys.
  std::string fingerprint() const;
};

/// tokenize -> lowercase -> remove noise -> stem.
///
/// Stemming is iterated to a fixed point and stems that land on a stopword
/// are dropped, so the pipeline is idempotent on its own (space-joined)
/// output.
TokenList pipeline(std::string_view text, const PreprocessConfig& config = {});
TokenList pipeline(const RawDocument& doc, const PreprocessConfig& config = {});

}  // namespace canon
