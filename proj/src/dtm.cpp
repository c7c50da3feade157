#include "canon/dtm.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "canon/io.hpp"

namespace canon {

namespace fs = std::filesystem;

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  std::sort(terms_.begin(), terms_.end());
  terms_.erase(std::unique(terms_.begin(), terms_.end()), terms_.end());
  index_.reserve(terms_.size());
  for (std::size_t j = 0; j < terms_.size(); ++j) index_.emplace(terms_[j], j);
}

std::optional<std::size_t> Vocabulary::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

RealMatrix to_real(const CountMatrix& counts) {
  RealMatrix out(counts.cols());
  std::vector<double> values;
  for (std::size_t i = 0; i < counts.rows(); ++i) {
    const auto r = counts.row(i);
    values.assign(r.values.begin(), r.values.end());
    out.push_row(r.columns, values);
  }
  return out;
}

std::vector<BookId> DocTermMatrix::labels() const {
  std::vector<BookId> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.book.id);
  return out;
}

DocTermMatrix build_dtm(std::vector<BookLabel> books, std::vector<RowLabel> rows,
                        const std::vector<TokenList>& documents) {
  if (rows.size() != documents.size()) throw Error(ErrorCode::InvalidArgument, "one row label per document required");
  if (documents.empty()) throw Error(ErrorCode::AllDocumentsEmpty, "no documents");

  DocTermMatrix dtm;
  dtm.books = std::move(books);
  std::vector<std::string> terms;
  for (const auto& doc : documents) terms.insert(terms.end(), doc.begin(), doc.end());
  dtm.vocab = Vocabulary(std::move(terms));
  dtm.counts = CountMatrix(dtm.vocab.size());

  std::vector<std::uint32_t> cols;
  std::vector<std::uint32_t> vals;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    if (documents[i].empty()) {
      dtm.pruned.push_back(rows[i]);
      continue;
    }
    std::map<std::uint32_t, std::uint32_t> row;
    for (const auto& t : documents[i]) ++row[static_cast<std::uint32_t>(*dtm.vocab.find(t))];
    cols.clear();
    vals.clear();
    for (auto [c, v] : row) {
      cols.push_back(c);
      vals.push_back(v);
    }
    dtm.counts.push_row(cols, vals);
    dtm.rows.push_back(rows[i]);
  }
  if (dtm.rows.empty()) throw Error(ErrorCode::AllDocumentsEmpty, "preprocessing removed every token");
  return dtm;
}

DocTermMatrix build_dtm(const Corpus& corpus, const PreprocessConfig& config) {
  if (corpus.size() == 0) throw Error(ErrorCode::AllDocumentsEmpty, "empty corpus");
  std::vector<RowLabel> rows;
  std::vector<TokenList> docs;
  rows.reserve(corpus.size());
  docs.reserve(corpus.size());
  for (const auto& d : corpus.documents()) {
    rows.push_back(RowLabel{d.book, d.chapter_index});
    docs.push_back(pipeline(d, config));
  }
  return build_dtm(corpus.books(), std::move(rows), docs);
}

DocTermMatrix slice_book(const DocTermMatrix& dtm, const BookLabel& book, SliceVocab mode) {
  if (std::find(dtm.books.begin(), dtm.books.end(), book) == dtm.books.end()) {
    throw Error(ErrorCode::UnknownBook, "book '" + book.name + "' is not in the matrix");
  }
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < dtm.n(); ++i) {
    if (dtm.rows[i].book == book) picked.push_back(i);
  }
  if (picked.empty()) throw Error(ErrorCode::UnknownBook, "book '" + book.name + "' has no rows");

  DocTermMatrix out;
  out.books = dtm.books;
  for (const auto& r : dtm.pruned) {
    if (r.book == book) out.pruned.push_back(r);
  }

  // old column -> new column
  std::vector<std::int64_t> remap(dtm.p(), -1);
  if (mode == SliceVocab::Global) {
    out.vocab = dtm.vocab;
    for (std::size_t j = 0; j < dtm.p(); ++j) remap[j] = static_cast<std::int64_t>(j);
  } else {
    std::vector<bool> used(dtm.p(), false);
    for (auto i : picked) {
      for (auto c : dtm.counts.row(i).columns) used[c] = true;
    }
    std::vector<std::string> terms;
    for (std::size_t j = 0; j < dtm.p(); ++j) {
      if (used[j]) {
        remap[j] = static_cast<std::int64_t>(terms.size());
        terms.push_back(dtm.vocab.term(j));
      }
    }
    out.vocab = Vocabulary(std::move(terms));
  }
  out.counts = CountMatrix(out.vocab.size());
  std::vector<std::uint32_t> cols;
  for (auto i : picked) {
    const auto r = dtm.counts.row(i);
    cols.clear();
    for (auto c : r.columns) cols.push_back(static_cast<std::uint32_t>(remap[c]));
    out.counts.push_row(cols, r.values);
    out.rows.push_back(dtm.rows[i]);
  }
  return out;
}

DocTermMatrix stack_rows(std::span<const DocTermMatrix> parts) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to stack");
  DocTermMatrix out;
  out.vocab = parts.front().vocab;
  out.books = parts.front().books;
  out.counts = CountMatrix(out.vocab.size());
  for (const auto& part : parts) {
    if (!(part.vocab == out.vocab)) throw Error(ErrorCode::DimensionMismatch, "stacked parts need one vocabulary");
    for (std::size_t i = 0; i < part.n(); ++i) {
      const auto r = part.counts.row(i);
      out.counts.push_row(r.columns, r.values);
      out.rows.push_back(part.rows[i]);
    }
    out.pruned.insert(out.pruned.end(), part.pruned.begin(), part.pruned.end());
  }
  return out;
}

std::vector<double> tf(std::span<const std::uint32_t> counts_row) {
  std::uint32_t max = 0;
  for (auto c : counts_row) max = std::max(max, c);
  if (max == 0) throw Error(ErrorCode::ZeroRow, "term frequency of an all-zero row");
  std::vector<double> out(counts_row.size());
  for (std::size_t j = 0; j < counts_row.size(); ++j) {
    out[j] = static_cast<double>(counts_row[j]) / static_cast<double>(max);
  }
  return out;
}

std::vector<double> idf(const DocTermMatrix& dtm) {
  std::vector<std::size_t> df(dtm.p(), 0);
  for (std::size_t i = 0; i < dtm.n(); ++i) {
    for (auto c : dtm.counts.row(i).columns) ++df[c];
  }
  const auto m = static_cast<double>(dtm.n());
  std::vector<double> out(dtm.p());
  for (std::size_t j = 0; j < df.size(); ++j) {
    if (df[j] == 0) throw Error(ErrorCode::MalformedMatrix, "term '" + dtm.vocab.term(j) + "' occurs in no document");
    out[j] = std::log(m / static_cast<double>(df[j]));
  }
  return out;
}

WeightMatrix tfidf(const DocTermMatrix& dtm) {
  const auto inv = idf(dtm);
  WeightMatrix w;
  w.rows = dtm.rows;
  w.vocab = dtm.vocab;
  w.books = dtm.books;
  w.weights = RealMatrix(dtm.p());
  std::vector<double> vals;
  for (std::size_t i = 0; i < dtm.n(); ++i) {
    const auto r = dtm.counts.row(i);
    const auto freq = tf(r.values);
    vals.resize(freq.size());
    for (std::size_t k = 0; k < freq.size(); ++k) vals[k] = freq[k] * inv[r.columns[k]];
    w.weights.push_row(r.columns, vals);
  }
  return w;
}

// ---- MatrixMarket ---------------------------------------------------------

namespace {

template <typename T>
std::string matrix_market(const SparseMatrix<T>& m, bool integer) {
  std::string out = integer ? "%%MatrixMarket matrix coordinate integer general\n"
                            : "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(m.rows()) + " " + std::to_string(m.cols()) + " " + std::to_string(m.nnz()) + "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t k = 0; k < r.columns.size(); ++k) {
      out += std::to_string(i + 1) + " " + std::to_string(r.columns[k] + 1) + " ";
      if constexpr (std::is_integral_v<T>) {
        out += std::to_string(r.values[k]);
      } else {
        out += io::format_double17(r.values[k]);
      }
      out += "\n";
    }
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s) {
  T v{};
  if constexpr (std::is_integral_v<T>) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw Error(ErrorCode::MalformedMatrix, "bad number '" + std::string(s) + "'");
  } else {
    // strtod handles every %.17g rendering, including inf/nan spellings
    std::string tmp(s);
    char* end = nullptr;
    v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size()) throw Error(ErrorCode::MalformedMatrix, "bad number '" + tmp + "'");
  }
  return v;
}

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const auto b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > b) out.push_back(line.substr(b, i - b));
  }
  return out;
}

template <typename T>
SparseMatrix<T> parse_matrix_market(std::string_view text) {
  const auto lines = io::split_lines(text);
  if (lines.empty() || !lines[0].starts_with("%%MatrixMarket matrix coordinate")) {
    throw Error(ErrorCode::MalformedMatrix, "missing MatrixMarket coordinate header");
  }
  std::size_t li = 1;
  while (li < lines.size() && (lines[li].empty() || lines[li].front() == '%')) ++li;
  if (li == lines.size()) throw Error(ErrorCode::MalformedMatrix, "missing size line");
  const auto size = fields(lines[li++]);
  if (size.size() != 3) throw Error(ErrorCode::MalformedMatrix, "size line needs rows cols nnz");
  const auto rows = parse_number<std::size_t>(size[0]);
  const auto cols = parse_number<std::size_t>(size[1]);
  const auto nnz = parse_number<std::size_t>(size[2]);

  std::vector<std::map<std::uint32_t, T>> data(rows);
  std::size_t seen = 0;
  for (; li < lines.size(); ++li) {
    if (io::trim(lines[li]).empty()) continue;
    const auto f = fields(lines[li]);
    if (f.size() != 3) throw Error(ErrorCode::MalformedMatrix, "entry line needs row col value");
    const auto i = parse_number<std::size_t>(f[0]);
    const auto j = parse_number<std::size_t>(f[1]);
    if (i == 0 || j == 0 || i > rows || j > cols) throw Error(ErrorCode::MalformedMatrix, "entry outside matrix");
    if (!data[i - 1].emplace(static_cast<std::uint32_t>(j - 1), parse_number<T>(f[2])).second) {
      throw Error(ErrorCode::MalformedMatrix, "duplicate entry");
    }
    ++seen;
  }
  if (seen != nnz) throw Error(ErrorCode::MalformedMatrix, "entry count differs from header");

  SparseMatrix<T> m(cols);
  std::vector<std::uint32_t> c;
  std::vector<T> v;
  for (const auto& row : data) {
    c.clear();
    v.clear();
    for (const auto& [col, val] : row) {
      c.push_back(col);
      v.push_back(val);
    }
    m.push_row(c, v);
  }
  return m;
}

}  // namespace

std::string to_matrix_market(const CountMatrix& m) { return matrix_market(m, true); }
std::string to_matrix_market(const RealMatrix& m) { return matrix_market(m, false); }
CountMatrix count_matrix_from_matrix_market(std::string_view text) { return parse_matrix_market<std::uint32_t>(text); }
RealMatrix real_matrix_from_matrix_market(std::string_view text) { return parse_matrix_market<double>(text); }

std::string rows_csv(const std::vector<RowLabel>& rows) {
  std::string out = "book_id,chapter_index\n";
  for (const auto& r : rows) out += std::to_string(r.book.id) + "," + std::to_string(r.chapter_index) + "\n";
  return out;
}

std::string books_csv(const std::vector<BookLabel>& books) {
  std::string out = "book_id,name\n";
  for (const auto& b : books) out += std::to_string(b.id) + "," + io::csv_field(b.name) + "\n";
  return out;
}

std::string vocab_text(const Vocabulary& vocab) {
  std::string out;
  for (const auto& t : vocab.terms()) out += t + "\n";
  return out;
}

namespace {

fs::path with_suffix(const fs::path& stem, std::string_view suffix) {
  fs::path p = stem;
  p += std::string(suffix);
  return p;
}

std::vector<BookLabel> parse_books(std::string_view text) {
  std::vector<BookLabel> books;
  const auto lines = io::split_lines(text);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = io::split_csv_line(lines[i]);
    if (f.size() != 2) throw Error(ErrorCode::MalformedMatrix, "books csv needs book_id,name");
    books.push_back(BookLabel{parse_number<BookId>(f[0]), f[1]});
  }
  return books;
}

std::vector<RowLabel> parse_rows(std::string_view text, const std::vector<BookLabel>& books) {
  std::vector<RowLabel> rows;
  const auto lines = io::split_lines(text);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = io::split_csv_line(lines[i]);
    if (f.size() != 2) throw Error(ErrorCode::MalformedMatrix, "rows csv needs book_id,chapter_index");
    const auto id = parse_number<BookId>(f[0]);
    if (id >= books.size()) throw Error(ErrorCode::UnknownBook, "row references book " + f[0]);
    rows.push_back(RowLabel{books[id], parse_number<std::uint32_t>(f[1])});
  }
  return rows;
}

Vocabulary parse_vocab(std::string_view text) {
  std::vector<std::string> terms;
  for (auto line : io::split_lines(text)) terms.emplace_back(line);
  Vocabulary v(terms);
  if (v.terms() != terms) throw Error(ErrorCode::MalformedMatrix, "vocabulary file must be sorted and distinct");
  return v;
}

}  // namespace

void write_dtm(const DocTermMatrix& dtm, const fs::path& stem) {
  io::write_file_atomic(with_suffix(stem, ".mtx"), to_matrix_market(dtm.counts));
  io::write_file_atomic(with_suffix(stem, "_rows.csv"), rows_csv(dtm.rows));
  io::write_file_atomic(with_suffix(stem, "_vocab.txt"), vocab_text(dtm.vocab));
  io::write_file_atomic(with_suffix(stem, "_books.csv"), books_csv(dtm.books));
}

DocTermMatrix read_dtm(const fs::path& stem) {
  DocTermMatrix dtm;
  dtm.books = parse_books(io::read_file(with_suffix(stem, "_books.csv")));
  dtm.rows = parse_rows(io::read_file(with_suffix(stem, "_rows.csv")), dtm.books);
  dtm.vocab = parse_vocab(io::read_file(with_suffix(stem, "_vocab.txt")));
  dtm.counts = count_matrix_from_matrix_market(io::read_file(with_suffix(stem, ".mtx")));
  if (dtm.counts.rows() != dtm.rows.size() || dtm.counts.cols() != dtm.vocab.size()) {
    throw Error(ErrorCode::MalformedMatrix, "matrix shape disagrees with row labels or vocabulary");
  }
  return dtm;
}

void write_weights(const WeightMatrix& w, const fs::path& stem) {
  io::write_file_atomic(with_suffix(stem, ".mtx"), to_matrix_market(w.weights));
  io::write_file_atomic(with_suffix(stem, "_rows.csv"), rows_csv(w.rows));
  io::write_file_atomic(with_suffix(stem, "_vocab.txt"), vocab_text(w.vocab));
  io::write_file_atomic(with_suffix(stem, "_books.csv"), books_csv(w.books));
}

WeightMatrix read_weights(const fs::path& stem) {
  WeightMatrix w;
  w.books = parse_books(io::read_file(with_suffix(stem, "_books.csv")));
  w.rows = parse_rows(io::read_file(with_suffix(stem, "_rows.csv")), w.books);
  w.vocab = parse_vocab(io::read_file(with_suffix(stem, "_vocab.txt")));
  w.weights = real_matrix_from_matrix_market(io::read_file(with_suffix(stem, ".mtx")));
  if (w.weights.rows() != w.rows.size() || w.weights.cols() != w.vocab.size()) {
    throw Error(ErrorCode::MalformedMatrix, "matrix shape disagrees with row labels or vocabulary");
  }
  return w;
}

}  // namespace canon
