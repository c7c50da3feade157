#include "canon/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <regex>
#include <set>
#include <utility>

#include "canon/error.hpp"
#include "canon/io.hpp"

namespace canon {

namespace fs = std::filesystem;

Corpus::Corpus(std::vector<BookLabel> books, std::vector<RawDocument> documents)
    : books_(std::move(books)), documents_(std::move(documents)) {
  validate();
}

std::vector<std::size_t> Corpus::chapters_per_book() const {
  std::vector<std::size_t> counts(books_.size(), 0);
  for (const auto& doc : documents_) ++counts[doc.book.id];
  return counts;
}

void Corpus::validate() const {
  std::set<std::string> names;
  for (std::size_t i = 0; i < books_.size(); ++i) {
    if (books_[i].id != i) {
      throw Error(ErrorCode::InvalidManifest, "book ids must be contiguous from 0");
    }
    if (books_[i].name.empty()) throw Error(ErrorCode::InvalidManifest, "empty book name");
    if (!names.insert(books_[i].name).second) {
      throw Error(ErrorCode::InvalidManifest, "duplicate book name '" + books_[i].name + "'");
    }
  }
  const RawDocument* prev = nullptr;
  for (const auto& doc : documents_) {
    if (doc.book.id >= books_.size() || books_[doc.book.id] != doc.book) {
      throw Error(ErrorCode::InvalidManifest, "document references unknown book '" + doc.book.name + "'");
    }
    if (doc.chapter_index == 0) throw Error(ErrorCode::InvalidArgument, "chapter index must be >= 1");
    if (io::trim(doc.text).empty()) {
      throw Error(ErrorCode::EmptyChapter,
                  doc.book.name + " chapter " + std::to_string(doc.chapter_index) + " is empty");
    }
    if (prev != nullptr) {
      const bool ordered = prev->book.id < doc.book.id ||
                           (prev->book.id == doc.book.id && prev->chapter_index < doc.chapter_index);
      if (!ordered) {
        throw Error(ErrorCode::DuplicateDocument,
                    "documents must be book-major, chapter-ascending and unique (" + doc.book.name + " " +
                        std::to_string(doc.chapter_index) + ")");
      }
    }
    prev = &doc;
  }
}

// ---- chapter rules --------------------------------------------------------

ChapterRule parse_chapter_rule(std::string_view text) {
  text = io::trim(text);
  if (text == "per_file") return PerFileRule{};
  if (text.starts_with("regex:")) {
    std::string pattern(text.substr(6));
    if (pattern.empty()) throw Error(ErrorCode::InvalidManifest, "empty regex chapter rule");
    try {
      std::regex probe(pattern);
    } catch (const std::regex_error& e) {
      throw Error(ErrorCode::InvalidManifest, "bad chapter regex '" + pattern + "': " + e.what());
    }
    return DelimiterRule{std::move(pattern), true};
  }
  if (text.starts_with("literal:")) {
    std::string literal(text.substr(8));
    if (literal.empty()) throw Error(ErrorCode::InvalidManifest, "empty literal chapter rule");
    return DelimiterRule{std::move(literal), false};
  }
  throw Error(ErrorCode::InvalidManifest, "unknown chapter_rule '" + std::string(text) + "'");
}

std::string format_chapter_rule(const ChapterRule& rule) {
  if (std::holds_alternative<PerFileRule>(rule)) return "per_file";
  const auto& d = std::get<DelimiterRule>(rule);
  return (d.is_regex ? "regex:" : "literal:") + d.pattern;
}

std::string ChapterSplit::reconstruct() const {
  std::string out = preamble;
  for (const auto& ch : chapters) {
    out += ch.header;
    out += ch.body;
  }
  return out;
}

std::vector<std::string> ChapterSplit::bodies() const {
  std::vector<std::string> out;
  out.reserve(chapters.size());
  for (const auto& ch : chapters) out.push_back(ch.body);
  return out;
}

ChapterSplit split_chapters(std::string_view text, const ChapterRule& rule) {
  ChapterSplit split;
  if (std::holds_alternative<PerFileRule>(rule)) {
    split.chapters.push_back(Chapter{"", std::string(text)});
    return split;
  }
  const auto& delim = std::get<DelimiterRule>(rule);
  std::optional<std::regex> re;
  if (delim.is_regex) re.emplace(delim.pattern);

  auto is_header = [&](std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (re) return std::regex_search(line.begin(), line.end(), *re);
    return line.starts_with(delim.pattern);
  };

  // Walk line by line, keeping exact byte offsets so the split is lossless.
  std::size_t pos = 0;
  Chapter* current = nullptr;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl + 1;
    std::string_view line = text.substr(pos, end - pos);
    std::string_view content = line;
    if (!content.empty() && content.back() == '\n') content.remove_suffix(1);
    if (is_header(content)) {
      split.chapters.push_back(Chapter{std::string(line), ""});
      current = &split.chapters.back();
    } else if (current != nullptr) {
      current->body.append(line);
    } else {
      split.preamble.append(line);
    }
    pos = end;
  }
  if (split.chapters.empty()) {
    throw Error(ErrorCode::NoChaptersFound, "chapter delimiter '" + delim.pattern + "' never matched");
  }
  return split;
}

// ---- manifest -------------------------------------------------------------

CorpusManifest parse_manifest(std::string_view text) {
  CorpusManifest manifest;
  struct Pending {
    std::string name, path, rule;
    bool any = false;
  } pending;

  std::size_t line_no = 0;
  auto flush = [&] {
    if (!pending.any) return;
    if (pending.name.empty() || pending.path.empty() || pending.rule.empty()) {
      throw Error(ErrorCode::InvalidManifest,
                  "book entry ending near line " + std::to_string(line_no) + " needs name, path and chapter_rule");
    }
    manifest.books.push_back(ManifestEntry{pending.name, fs::path(pending.path), parse_chapter_rule(pending.rule)});
    pending = Pending{};
  };

  for (auto raw : io::split_lines(text)) {
    ++line_no;
    auto line = io::trim(raw);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;
    if (line == "[book]") {
      flush();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidManifest, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = io::trim(line.substr(0, eq));
    const std::string value(io::trim(line.substr(eq + 1)));
    if (key == "name") {
      pending.name = value;
    } else if (key == "path") {
      pending.path = value;
    } else if (key == "chapter_rule") {
      pending.rule = value;
    } else {
      throw Error(ErrorCode::InvalidManifest, "line " + std::to_string(line_no) + ": unknown key '" +
                                                  std::string(key) + "'");
    }
    pending.any = true;
  }
  flush();
  if (manifest.books.empty()) throw Error(ErrorCode::InvalidManifest, "manifest lists no books");
  return manifest;
}

CorpusManifest read_manifest(const fs::path& file) { return parse_manifest(io::read_file(file)); }

namespace {

// "ch10.txt" sorts after "ch9.txt".
bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
    const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
    if (da && db) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      auto na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      na.erase(0, std::min(na.find_first_not_of('0'), na.size()));
      nb.erase(0, std::min(nb.find_first_not_of('0'), nb.size()));
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

std::string read_utf8(const fs::path& path) {
  std::string bytes = io::read_file(path);
  if (!io::is_valid_utf8(bytes)) throw Error(ErrorCode::EncodingError, path.string() + " is not valid UTF-8");
  if (bytes.starts_with("\xEF\xBB\xBF")) bytes.erase(0, 3);
  return bytes;
}

}  // namespace

Corpus load_corpus(const fs::path& root, const CorpusManifest& manifest) {
  if (manifest.books.empty()) throw Error(ErrorCode::InvalidManifest, "manifest lists no books");
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::MissingFile, "corpus root " + root.string());

  std::vector<BookLabel> books;
  std::vector<RawDocument> docs;
  for (const auto& entry : manifest.books) {
    const BookLabel label{static_cast<BookId>(books.size()), entry.name};
    books.push_back(label);
    const fs::path source = entry.path.is_absolute() ? entry.path : root / entry.path;
    if (!fs::exists(source, ec)) throw Error(ErrorCode::MissingFile, source.string());

    std::vector<std::string> chapters;
    if (std::holds_alternative<PerFileRule>(entry.rule) && fs::is_directory(source, ec)) {
      std::vector<std::string> names;
      for (const auto& f : fs::directory_iterator(source)) {
        const auto fname = f.path().filename().string();
        if (f.is_regular_file() && !fname.starts_with(".")) names.push_back(fname);
      }
      std::sort(names.begin(), names.end(), natural_less);
      for (const auto& name : names) chapters.push_back(read_utf8(source / name));
    } else {
      chapters = split_chapters(read_utf8(source), entry.rule).bodies();
    }
    if (chapters.empty()) throw Error(ErrorCode::EmptyBook, entry.name + " yields no chapters");

    std::uint32_t index = 0;
    for (auto& text : chapters) {
      ++index;
      if (io::trim(text).empty()) {
        throw Error(ErrorCode::EmptyChapter, entry.name + " chapter " + std::to_string(index) + " is empty");
      }
      docs.push_back(RawDocument{label, index, std::move(text)});
    }
  }
  return Corpus(std::move(books), std::move(docs));
}

// ---- cache ----------------------------------------------------------------

std::string escape_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\') {
      out += text[i];
      continue;
    }
    if (++i == text.size()) throw Error(ErrorCode::MalformedMatrix, "dangling escape in corpus cache");
    switch (text[i]) {
      case '\\': out += '\\'; break;
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      default: throw Error(ErrorCode::MalformedMatrix, std::string("unknown escape \\") + text[i]);
    }
  }
  return out;
}

std::string write_corpus_cache(const Corpus& corpus) {
  std::string out = "# canon-corpus v1\n";
  for (const auto& b : corpus.books()) {
    out += "#book\t" + std::to_string(b.id) + "\t" + escape_text(b.name) + "\n";
  }
  for (const auto& d : corpus.documents()) {
    out += std::to_string(d.book.id) + "\t" + std::to_string(d.chapter_index) + "\t" + escape_text(d.text) + "\n";
  }
  return out;
}

namespace {

template <typename Int>
Int parse_uint(std::string_view s, std::string_view what) {
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw Error(ErrorCode::MalformedMatrix, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Corpus read_corpus_cache(std::string_view contents) {
  const auto lines = io::split_lines(contents);
  if (lines.empty() || lines.front() != "# canon-corpus v1") {
    throw Error(ErrorCode::MalformedMatrix, "missing corpus cache header");
  }
  std::vector<BookLabel> books;
  std::vector<RawDocument> docs;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) throw Error(ErrorCode::MalformedMatrix, "bad cache line " + std::to_string(i + 1));
    const auto a = line.substr(0, t1);
    const auto b = line.substr(t1 + 1, t2 - t1 - 1);
    const auto c = line.substr(t2 + 1);
    if (a == "#book") {
      books.push_back(BookLabel{parse_uint<BookId>(b, "book id"), unescape_text(c)});
    } else {
      const auto id = parse_uint<BookId>(a, "book id");
      if (id >= books.size()) throw Error(ErrorCode::MalformedMatrix, "record references undeclared book");
      docs.push_back(RawDocument{books[id], parse_uint<std::uint32_t>(b, "chapter index"), unescape_text(c)});
    }
  }
  return Corpus(std::move(books), std::move(docs));
}

}  // namespace canon
