#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "canon/corpus.hpp"
#include "canon/error.hpp"
#include "canon/preprocess.hpp"

namespace canon {

/// Sorted, distinct terms with a term -> column index.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Terms are sorted and deduplicated.
  explicit Vocabulary(std::vector<std::string> terms);

  std::size_t size() const noexcept { return terms_.size(); }
  const std::string& term(std::size_t column) const { return terms_.at(column); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  std::optional<std::size_t> find(std::string_view term) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.terms_ == b.terms_; }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Row-compressed sparse matrix. Column indices ascend within each row and
/// only nonzero values are stored.
template <typename T>
class SparseMatrix {
 public:
  struct RowView {
    std::span<const std::uint32_t> columns;
    std::span<const T> values;
  };

  SparseMatrix() = default;
  explicit SparseMatrix(std::size_t cols) : cols_(cols), row_ptr_{0} {}

  /// Appends a row given as (column, value) pairs sorted by column; zero
  /// values are skipped.
  void push_row(std::span<const std::uint32_t> columns, std::span<const T> values) {
    if (columns.size() != values.size()) throw Error(ErrorCode::MalformedMatrix, "row column/value length mismatch");
    std::int64_t prev = -1;
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (columns[k] >= cols_ || static_cast<std::int64_t>(columns[k]) <= prev) {
        throw Error(ErrorCode::MalformedMatrix, "row columns must ascend and lie inside the matrix");
      }
      prev = columns[k];
      if (values[k] == T{}) continue;
      col_idx_.push_back(columns[k]);
      values_.push_back(values[k]);
    }
    row_ptr_.push_back(col_idx_.size());
  }

  void push_dense_row(std::span<const T> dense) {
    if (dense.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "dense row length differs from column count");
    for (std::size_t j = 0; j < dense.size(); ++j) {
      if (dense[j] != T{}) {
        col_idx_.push_back(static_cast<std::uint32_t>(j));
        values_.push_back(dense[j]);
      }
    }
    row_ptr_.push_back(col_idx_.size());
  }

  std::size_t rows() const noexcept { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  RowView row(std::size_t i) const {
    const auto b = row_ptr_.at(i), e = row_ptr_.at(i + 1);
    return {std::span<const std::uint32_t>(col_idx_).subspan(b, e - b), std::span<const T>(values_).subspan(b, e - b)};
  }

  std::vector<T> dense_row(std::size_t i) const {
    std::vector<T> out(cols_, T{});
    const auto r = row(i);
    for (std::size_t k = 0; k < r.columns.size(); ++k) out[r.columns[k]] = r.values[k];
    return out;
  }

  T at(std::size_t i, std::size_t j) const {
    const auto r = row(i);
    auto it = std::lower_bound(r.columns.begin(), r.columns.end(), static_cast<std::uint32_t>(j));
    if (it == r.columns.end() || *it != j) return T{};
    return r.values[static_cast<std::size_t>(it - r.columns.begin())];
  }

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<T> values_;
};

using CountMatrix = SparseMatrix<std::uint32_t>;
using RealMatrix = SparseMatrix<double>;

RealMatrix to_real(const CountMatrix& counts);

struct RowLabel {
  BookLabel book;
  std::uint32_t chapter_index = 1;

  friend bool operator==(const RowLabel&, const RowLabel&) = default;
};

/// Labeled document-term matrix. Rows follow corpus order.
struct DocTermMatrix {
  CountMatrix counts;
  std::vector<RowLabel> rows;
  Vocabulary vocab;
  std::vector<BookLabel> books;
  /// Documents dropped because preprocessing left no tokens.
  std::vector<RowLabel> pruned;

  std::size_t n() const noexcept { return counts.rows(); }
  std::size_t p() const noexcept { return counts.cols(); }
  std::vector<BookId> labels() const;

  /// Compares the matrix content; the pruned list is build-time metadata.
  friend bool operator==(const DocTermMatrix& a, const DocTermMatrix& b) {
    return a.counts == b.counts && a.rows == b.rows && a.vocab == b.vocab && a.books == b.books;
  }
};

/// TF-IDF weights sharing rows and vocabulary with the source matrix.
struct WeightMatrix {
  RealMatrix weights;
  std::vector<RowLabel> rows;
  Vocabulary vocab;
  std::vector<BookLabel> books;

  friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;
};

/// Builds the corpus-wide matrix. Documents emptied by preprocessing are
/// pruned (listed in `pruned`); throws AllDocumentsEmpty if none remain.
DocTermMatrix build_dtm(const Corpus& corpus, const PreprocessConfig& config = {});

/// Same, from already-preprocessed token lists (one per row label).
DocTermMatrix build_dtm(std::vector<BookLabel> books, std::vector<RowLabel> rows,
                        const std::vector<TokenList>& documents);

enum class SliceVocab {
  Pruned,  ///< only terms with a nonzero count inside the book (per-book p_t)
  Global,  ///< keep the corpus vocabulary
};

/// Rows of one book. Throws UnknownBook.
DocTermMatrix slice_book(const DocTermMatrix& dtm, const BookLabel& book, SliceVocab mode = SliceVocab::Pruned);

/// Stacks matrices that share a vocabulary, in argument order.
DocTermMatrix stack_rows(std::span<const DocTermMatrix> parts);

/// tf_j = freq_j / max_j freq_j. Throws ZeroRow for an all-zero row.
std::vector<double> tf(std::span<const std::uint32_t> counts_row);

/// idf_j = ln(m / m_j) with m documents and m_j documents containing term j.
std::vector<double> idf(const DocTermMatrix& dtm);

/// W = tf * idf, elementwise over rows.
WeightMatrix tfidf(const DocTermMatrix& dtm);

// ---- serialization --------------------------------------------------------

std::string to_matrix_market(const CountMatrix& m);
std::string to_matrix_market(const RealMatrix& m);
CountMatrix count_matrix_from_matrix_market(std::string_view text);
RealMatrix real_matrix_from_matrix_market(std::string_view text);

std::string rows_csv(const std::vector<RowLabel>& rows);
std::string books_csv(const std::vector<BookLabel>& books);
std::string vocab_text(const Vocabulary& vocab);

/// Writes `<stem>.mtx`, `<stem>_rows.csv`, `<stem>_vocab.txt` and
/// `<stem>_books.csv`.
void write_dtm(const DocTermMatrix& dtm, const std::filesystem::path& stem);
DocTermMatrix read_dtm(const std::filesystem::path& stem);
void write_weights(const WeightMatrix& w, const std::filesystem::path& stem);
WeightMatrix read_weights(const std::filesystem::path& stem);

}  // namespace canon
