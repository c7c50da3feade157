#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "canon/dtm.hpp"

namespace canon {

enum class Measure { Euclidean, Manhattan, Jaccard, Cosine };

std::string_view to_string(Measure m) noexcept;
Measure parse_measure(std::string_view name);
inline constexpr Measure kAllMeasures[] = {Measure::Euclidean, Measure::Manhattan, Measure::Jaccard, Measure::Cosine};

// ---- vector measures ------------------------------------------------------
// All throw LengthMismatch when the lengths differ.

double euclidean(std::span<const double> x, std::span<const double> y);
double manhattan(std::span<const double> x, std::span<const double> y);
/// sum_j min(x_j, y_j) / sum_j max(x_j, y_j). Throws BothZero.
double jaccard_similarity(std::span<const double> x, std::span<const double> y);
double jaccard_distance(std::span<const double> x, std::span<const double> y);
/// x.y / (|x| |y|). Throws ZeroVector.
double cosine_similarity(std::span<const double> x, std::span<const double> y);
/// 1 - cosine_similarity, clamped at 0 against rounding.
double cosine_distance(std::span<const double> x, std::span<const double> y);

double distance(Measure m, std::span<const double> x, std::span<const double> y);
/// Same measures evaluated on sparse rows of equal width.
double distance(Measure m, const RealMatrix::RowView& x, const RealMatrix::RowView& y);

// ---- chapter distance matrices --------------------------------------------

struct DistanceMatrix {
  std::size_t n = 0;
  std::vector<double> values;  ///< row-major n x n
  std::vector<RowLabel> labels;
  Measure measure = Measure::Euclidean;

  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

/// All pairwise distances between rows. Each unordered pair is computed once
/// and mirrored; the diagonal is exactly zero. Requires >= 2 rows.
DistanceMatrix pairwise(const RealMatrix& rows, std::vector<RowLabel> labels, Measure measure);
DistanceMatrix pairwise(const DocTermMatrix& dtm, Measure measure);
DistanceMatrix pairwise(const WeightMatrix& w, Measure measure);

/// Sub-matrix for one book, rows in original order.
DistanceMatrix within_book(const DistanceMatrix& d, const BookLabel& book);

// ---- book linkage ---------------------------------------------------------

enum class Linkage { Min, Max, Mean, Median };

std::string_view to_string(Linkage l) noexcept;
Linkage parse_linkage(std::string_view name);
inline constexpr Linkage kAllLinkages[] = {Linkage::Min, Linkage::Max, Linkage::Mean, Linkage::Median};

struct BookDistanceMatrix {
  std::vector<BookLabel> books;
  std::vector<double> values;  ///< row-major B x B
  Measure measure = Measure::Euclidean;
  Linkage linkage = Linkage::Mean;

  double operator()(std::size_t a, std::size_t b) const { return values[a * books.size() + b]; }
};

/// Aggregates every chapter pair (l in book a, m in book b) into one value.
/// Diagonal blocks include the self-pairs l == m. The even-count median is
/// the mean of the two central values.
BookDistanceMatrix book_linkage(const DistanceMatrix& d, const std::vector<BookLabel>& books, Linkage linkage);

// ---- correlation between measures -----------------------------------------

enum class CorrelationKind { Pearson, Spearman };

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

struct MeasureCorrelation {
  std::vector<Measure> measures;
  std::vector<double> values;  ///< row-major k x k
  CorrelationKind kind = CorrelationKind::Pearson;

  double operator()(std::size_t a, std::size_t b) const { return values[a * measures.size() + b]; }
};

/// Correlation between the strict upper triangles of each measure's matrix.
/// Throws DegenerateMeasure when a triangle has zero variance.
MeasureCorrelation measure_correlation(std::span<const DistanceMatrix> matrices,
                                       CorrelationKind kind = CorrelationKind::Pearson);
MeasureCorrelation measure_correlation(const RealMatrix& rows, std::span<const Measure> measures,
                                       CorrelationKind kind = CorrelationKind::Pearson);

// ---- metric axioms --------------------------------------------------------

struct MetricViolation {
  std::string axiom;  ///< nonnegativity | symmetry | identity | triangle
  std::size_t i = 0, j = 0, k = 0;
  double lhs = 0.0, rhs = 0.0;
};

struct MetricReport {
  std::size_t nonnegativity = 0;
  std::size_t symmetry = 0;
  std::size_t identity = 0;
  std::size_t triangle = 0;
  std::size_t triples_checked = 0;
  std::vector<MetricViolation> examples;  ///< first violations, capped

  std::size_t total() const noexcept { return nonnegativity + symmetry + identity + triangle; }
};

/// Nonnegativity and symmetry are checked on every pair. Identity checks the
/// zero diagonal and, when `features` is given, that d(i,j) == 0 exactly
/// when rows i and j are equal. The triangle inequality is checked on
/// `samples` seeded random triples with relative slack `tolerance`.
MetricReport metric_check(const DistanceMatrix& d, std::size_t samples, std::uint64_t seed,
                          const RealMatrix* features = nullptr, double tolerance = 1e-12);

// ---- export ---------------------------------------------------------------

std::string row_label_name(const RowLabel& label);
std::string distance_csv(const DistanceMatrix& d);
std::string book_distance_csv(const BookDistanceMatrix& b);
std::string correlation_csv(const MeasureCorrelation& c);
std::string metric_report_text(const MetricReport& r);

/// Square heatmap as SVG: linear ramp from the minimum to the maximum finite
/// entry, labels on both axes and a color legend.
std::string heatmap_svg(std::span<const double> values, const std::vector<std::string>& labels,
                        std::string_view title);
std::string heatmap_svg(const DistanceMatrix& d);
std::string heatmap_svg(const BookDistanceMatrix& b);

}  // namespace canon
