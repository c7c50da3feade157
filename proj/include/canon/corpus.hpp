#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace canon {

using BookId = std::uint32_t;

struct BookLabel {
  BookId id = 0;
  std::string name;

  friend bool operator==(const BookLabel&, const BookLabel&) = default;
};

/// One chapter of one book. chapter_index is 1-based within the book.
struct RawDocument {
  BookLabel book;
  std::uint32_t chapter_index = 1;
  std::string text;

  friend bool operator==(const RawDocument&, const RawDocument&) = default;
};

/// Labeled chapter collection, book-major and chapter-ascending.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<BookLabel> books, std::vector<RawDocument> documents);

  const std::vector<BookLabel>& books() const noexcept { return books_; }
  const std::vector<RawDocument>& documents() const noexcept { return documents_; }
  std::size_t size() const noexcept { return documents_.size(); }
  std::size_t book_count() const noexcept { return books_.size(); }

  /// Number of chapters in each book, indexed by book id.
  std::vector<std::size_t> chapters_per_book() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  void validate() const;

  std::vector<BookLabel> books_;
  std::vector<RawDocument> documents_;
};

// ---- chapter segmentation -------------------------------------------------

/// Every file in a directory is one chapter (or a single file is one chapter).
struct PerFileRule {};

/// Chapter header lines. A line is a header if the pattern matches anywhere in
/// it (regex) or if the line starts with the literal text.
struct DelimiterRule {
  std::string pattern;
  bool is_regex = true;
};

using ChapterRule = std::variant<PerFileRule, DelimiterRule>;

/// Parses `per_file`, `regex:<pattern>` or `literal:<text>`.
ChapterRule parse_chapter_rule(std::string_view text);
std::string format_chapter_rule(const ChapterRule& rule);

struct Chapter {
  std::string header;  ///< header line including its newline; empty for per-file
  std::string body;
};

/// Result of segmenting one text. preamble + header_1 + body_1 + ... == input.
struct ChapterSplit {
  std::string preamble;
  std::vector<Chapter> chapters;

  std::string reconstruct() const;
  std::vector<std::string> bodies() const;
};

/// Splits `text` into chapters. Per-file rule yields the whole text as one
/// chapter. Throws Error{NoChaptersFound} if a delimiter never matches.
ChapterSplit split_chapters(std::string_view text, const ChapterRule& rule);

// ---- manifest + loading ---------------------------------------------------

struct ManifestEntry {
  std::string name;
  std::filesystem::path path;
  ChapterRule rule;
};

struct CorpusManifest {
  std::vector<ManifestEntry> books;
};

/// Parses the manifest format:
///
///     # comment
///     [book]
///     name = Quran
///     path = quran.txt
///     chapter_rule = regex:^Surah [0-9]+
///
/// Entries are introduced by `[book]` or separated by blank lines.
CorpusManifest parse_manifest(std::string_view text);
CorpusManifest read_manifest(const std::filesystem::path& file);

/// Loads every book listed in the manifest; relative paths resolve against
/// `root`. Book ids follow manifest order.
Corpus load_corpus(const std::filesystem::path& root, const CorpusManifest& manifest);

// ---- corpus cache ---------------------------------------------------------

/// Tab-separated record file: `book_id \t chapter_index \t escaped text`,
/// preceded by `#book \t id \t name` lines.
std::string write_corpus_cache(const Corpus& corpus);
Corpus read_corpus_cache(std::string_view contents);

std::string escape_text(std::string_view text);
std::string unescape_text(std::string_view text);

}  // namespace canon
