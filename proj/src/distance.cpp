#include "canon/distance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "canon/io.hpp"
#include "canon/random.hpp"

namespace canon {

std::string_view to_string(Measure m) noexcept {
  switch (m) {
    case Measure::Euclidean: return "euclidean";
    case Measure::Manhattan: return "manhattan";
    case Measure::Jaccard: return "jaccard";
    case Measure::Cosine: return "cosine";
  }
  return "?";
}

Measure parse_measure(std::string_view name) {
  for (auto m : kAllMeasures) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown measure '" + std::string(name) + "'");
}

std::string_view to_string(Linkage l) noexcept {
  switch (l) {
    case Linkage::Min: return "min";
    case Linkage::Max: return "max";
    case Linkage::Mean: return "mean";
    case Linkage::Median: return "median";
  }
  return "?";
}

Linkage parse_linkage(std::string_view name) {
  for (auto l : kAllLinkages) {
    if (to_string(l) == name) return l;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown linkage '" + std::string(name) + "'");
}

// ---- dense measures -------------------------------------------------------

namespace {

void require_same_length(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "vectors of length " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  }
}

}  // namespace

double euclidean(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y);
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - y[j];
    s += d * d;
  }
  return std::sqrt(s);
}

double manhattan(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y);
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += std::abs(x[j] - y[j]);
  return s;
}

double jaccard_similarity(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y);
  double lo = 0.0, hi = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    lo += std::min(x[j], y[j]);
    hi += std::max(x[j], y[j]);
  }
  if (hi == 0.0) throw Error(ErrorCode::BothZero, "jaccard of two zero vectors");
  return lo / hi;
}

double jaccard_distance(std::span<const double> x, std::span<const double> y) {
  return 1.0 - jaccard_similarity(x, y);
}

double cosine_similarity(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y);
  double dot = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    dot += x[j] * y[j];
    xx += x[j] * x[j];
    yy += y[j] * y[j];
  }
  if (xx == 0.0 || yy == 0.0) throw Error(ErrorCode::ZeroVector, "cosine with a zero vector");
  return dot / (std::sqrt(xx) * std::sqrt(yy));
}

double cosine_distance(std::span<const double> x, std::span<const double> y) {
  const double s = cosine_similarity(x, y);
  // Rounding can leave 1 - cos(x, x) a few ulps above zero.
  if (std::equal(x.begin(), x.end(), y.begin())) return 0.0;
  return std::max(0.0, 1.0 - s);
}

double distance(Measure m, std::span<const double> x, std::span<const double> y) {
  switch (m) {
    case Measure::Euclidean: return euclidean(x, y);
    case Measure::Manhattan: return manhattan(x, y);
    case Measure::Jaccard: return jaccard_distance(x, y);
    case Measure::Cosine: return cosine_distance(x, y);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown measure");
}

// ---- sparse measures ------------------------------------------------------

namespace {

// Visits the union of both supports in column order: f(x_j, y_j).
template <typename F>
void merge_rows(const RealMatrix::RowView& x, const RealMatrix::RowView& y, F&& f) {
  std::size_t a = 0, b = 0;
  while (a < x.columns.size() || b < y.columns.size()) {
    if (b == y.columns.size() || (a < x.columns.size() && x.columns[a] < y.columns[b])) {
      f(x.values[a++], 0.0);
    } else if (a == x.columns.size() || y.columns[b] < x.columns[a]) {
      f(0.0, y.values[b++]);
    } else {
      f(x.values[a++], y.values[b++]);
    }
  }
}

}  // namespace

double distance(Measure m, const RealMatrix::RowView& x, const RealMatrix::RowView& y) {
  switch (m) {
    case Measure::Euclidean: {
      double s = 0.0;
      merge_rows(x, y, [&](double u, double v) { s += (u - v) * (u - v); });
      return std::sqrt(s);
    }
    case Measure::Manhattan: {
      double s = 0.0;
      merge_rows(x, y, [&](double u, double v) { s += std::abs(u - v); });
      return s;
    }
    case Measure::Jaccard: {
      double lo = 0.0, hi = 0.0;
      merge_rows(x, y, [&](double u, double v) {
        lo += std::min(u, v);
        hi += std::max(u, v);
      });
      if (hi == 0.0) throw Error(ErrorCode::BothZero, "jaccard of two zero rows");
      return 1.0 - lo / hi;
    }
    case Measure::Cosine: {
      double dot = 0.0, xx = 0.0, yy = 0.0;
      merge_rows(x, y, [&](double u, double v) {
        dot += u * v;
        xx += u * u;
        yy += v * v;
      });
      if (xx == 0.0 || yy == 0.0) throw Error(ErrorCode::ZeroVector, "cosine with a zero row");
      if (std::ranges::equal(x.columns, y.columns) && std::ranges::equal(x.values, y.values)) return 0.0;
      return std::max(0.0, 1.0 - dot / (std::sqrt(xx) * std::sqrt(yy)));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown measure");
}

DistanceMatrix pairwise(const RealMatrix& rows, std::vector<RowLabel> labels, Measure measure) {
  const auto n = rows.rows();
  if (n < 2) throw Error(ErrorCode::TooFewRows, "pairwise distances need at least 2 rows");
  if (labels.size() != n) throw Error(ErrorCode::InvalidArgument, "one label per row required");
  DistanceMatrix d;
  d.n = n;
  d.labels = std::move(labels);
  d.measure = measure;
  d.values.assign(n * n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    const auto rl = rows.row(l);
    for (std::size_t m = l + 1; m < n; ++m) {
      double v;
      try {
        v = distance(measure, rl, rows.row(m));
      } catch (const Error& e) {
        throw Error(e.code(), "rows " + std::to_string(l) + " and " + std::to_string(m) + ": " + e.what());
      }
      d.values[l * n + m] = v;
      d.values[m * n + l] = v;
    }
  }
  return d;
}

DistanceMatrix pairwise(const DocTermMatrix& dtm, Measure measure) {
  return pairwise(to_real(dtm.counts), dtm.rows, measure);
}

DistanceMatrix pairwise(const WeightMatrix& w, Measure measure) { return pairwise(w.weights, w.rows, measure); }

DistanceMatrix within_book(const DistanceMatrix& d, const BookLabel& book) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < d.n; ++i) {
    if (d.labels[i].book == book) idx.push_back(i);
  }
  if (idx.empty()) throw Error(ErrorCode::UnknownBook, "book '" + book.name + "' has no rows");
  DistanceMatrix out;
  out.n = idx.size();
  out.measure = d.measure;
  out.values.resize(out.n * out.n);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    out.labels.push_back(d.labels[idx[a]]);
    for (std::size_t b = 0; b < idx.size(); ++b) out.values[a * out.n + b] = d(idx[a], idx[b]);
  }
  return out;
}

// ---- linkage --------------------------------------------------------------

namespace {

double aggregate(std::vector<double>& block, Linkage linkage) {
  switch (linkage) {
    case Linkage::Min: return *std::min_element(block.begin(), block.end());
    case Linkage::Max: return *std::max_element(block.begin(), block.end());
    case Linkage::Mean: return std::accumulate(block.begin(), block.end(), 0.0) / static_cast<double>(block.size());
    case Linkage::Median: {
      const auto n = block.size();
      const auto mid = block.begin() + static_cast<std::ptrdiff_t>(n / 2);
      std::nth_element(block.begin(), mid, block.end());
      const double upper = *mid;
      if (n % 2 == 1) return upper;
      const double lower = *std::max_element(block.begin(), mid);
      return 0.5 * (lower + upper);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown linkage");
}

}  // namespace

BookDistanceMatrix book_linkage(const DistanceMatrix& d, const std::vector<BookLabel>& books, Linkage linkage) {
  const auto B = books.size();
  std::vector<std::vector<std::size_t>> members(B);
  for (std::size_t i = 0; i < d.n; ++i) {
    const auto id = d.labels[i].book.id;
    if (id >= B || books[id] != d.labels[i].book) {
      throw Error(ErrorCode::UnknownBook, "row " + std::to_string(i) + " has a book outside the book list");
    }
    members[id].push_back(i);
  }
  BookDistanceMatrix out;
  out.books = books;
  out.measure = d.measure;
  out.linkage = linkage;
  out.values.assign(B * B, std::nan(""));
  std::vector<double> block;
  for (std::size_t a = 0; a < B; ++a) {
    for (std::size_t b = a; b < B; ++b) {
      if (members[a].empty() || members[b].empty()) continue;
      block.clear();
      for (auto l : members[a]) {
        for (auto m : members[b]) block.push_back(d(l, m));
      }
      const double v = aggregate(block, linkage);
      out.values[a * B + b] = v;
      out.values[b * B + a] = v;
    }
  }
  return out;
}

// ---- correlation ----------------------------------------------------------

double pearson(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y);
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) throw Error(ErrorCode::DegenerateMeasure, "correlation needs at least 2 values");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::DegenerateMeasure, "zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

std::vector<double> upper_triangle(const DistanceMatrix& d) {
  std::vector<double> out;
  out.reserve(d.n * (d.n - 1) / 2);
  for (std::size_t i = 0; i < d.n; ++i) {
    for (std::size_t j = i + 1; j < d.n; ++j) out.push_back(d(i, j));
  }
  return out;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y);
  const auto rx = ranks(x), ry = ranks(y);
  return pearson(rx, ry);
}

MeasureCorrelation measure_correlation(std::span<const DistanceMatrix> matrices, CorrelationKind kind) {
  if (matrices.empty()) throw Error(ErrorCode::InvalidArgument, "no measures to correlate");
  const auto n = matrices.front().n;
  if (n < 2) throw Error(ErrorCode::TooFewRows, "correlation needs at least 2 documents");
  std::vector<std::vector<double>> tri;
  MeasureCorrelation out;
  out.kind = kind;
  for (const auto& d : matrices) {
    if (d.n != n) throw Error(ErrorCode::DimensionMismatch, "distance matrices differ in size");
    out.measures.push_back(d.measure);
    tri.push_back(upper_triangle(d));
  }
  const auto k = matrices.size();
  out.values.assign(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      double r;
      try {
        r = a == b ? (pearson(tri[a], tri[a]), 1.0)
                   : (kind == CorrelationKind::Pearson ? pearson(tri[a], tri[b]) : spearman(tri[a], tri[b]));
      } catch (const Error& e) {
        throw Error(ErrorCode::DegenerateMeasure, std::string(to_string(out.measures[a])) + " vs " +
                                                      std::string(to_string(out.measures[b])) + ": " + e.what());
      }
      out.values[a * k + b] = r;
      out.values[b * k + a] = r;
    }
  }
  return out;
}

MeasureCorrelation measure_correlation(const RealMatrix& rows, std::span<const Measure> measures,
                                       CorrelationKind kind) {
  std::vector<RowLabel> labels(rows.rows());
  std::vector<DistanceMatrix> mats;
  for (auto m : measures) mats.push_back(pairwise(rows, labels, m));
  return measure_correlation(mats, kind);
}

// ---- metric check ---------------------------------------------------------

MetricReport metric_check(const DistanceMatrix& d, std::size_t samples, std::uint64_t seed, const RealMatrix* features,
                          double tolerance) {
  constexpr std::size_t kMaxExamples = 50;
  MetricReport r;
  auto note = [&](std::string axiom, std::size_t i, std::size_t j, std::size_t k, double lhs, double rhs) {
    if (r.examples.size() < kMaxExamples) r.examples.push_back(MetricViolation{std::move(axiom), i, j, k, lhs, rhs});
  };
  const auto n = d.n;
  for (std::size_t i = 0; i < n; ++i) {
    if (d(i, i) != 0.0) {
      ++r.identity;
      note("identity", i, i, i, d(i, i), 0.0);
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (d(i, j) < 0.0) {
        ++r.nonnegativity;
        note("nonnegativity", i, j, j, d(i, j), 0.0);
      }
      if (j > i && d(i, j) != d(j, i)) {
        ++r.symmetry;
        note("symmetry", i, j, j, d(i, j), d(j, i));
      }
    }
  }
  if (features != nullptr) {
    if (features->rows() != n) throw Error(ErrorCode::DimensionMismatch, "feature rows differ from matrix size");
    for (std::size_t i = 0; i < n; ++i) {
      const auto ri = features->row(i);
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto rj = features->row(j);
        const bool equal = std::ranges::equal(ri.columns, rj.columns) && std::ranges::equal(ri.values, rj.values);
        if (equal != (d(i, j) == 0.0)) {
          ++r.identity;
          note("identity", i, j, j, d(i, j), 0.0);
        }
      }
    }
  }
  if (n >= 3) {
    SplitMix64 rng = SplitMix64(seed).split("metric_check");
    for (std::size_t s = 0; s < samples; ++s) {
      const auto a = static_cast<std::size_t>(rng.below(n));
      const auto b = static_cast<std::size_t>(rng.below(n));
      const auto c = static_cast<std::size_t>(rng.below(n));
      ++r.triples_checked;
      const double lhs = d(a, c);
      const double rhs = d(a, b) + d(b, c);
      if (lhs > rhs + tolerance * std::max(1.0, rhs)) {
        ++r.triangle;
        note("triangle", a, b, c, lhs, rhs);
      }
    }
  }
  return r;
}

// ---- export ---------------------------------------------------------------

std::string row_label_name(const RowLabel& label) {
  return label.book.name + ":" + std::to_string(label.chapter_index);
}

std::string distance_csv(const DistanceMatrix& d) {
  std::string out = "document";
  for (const auto& l : d.labels) out += "," + io::csv_field(row_label_name(l));
  out += "\n";
  for (std::size_t i = 0; i < d.n; ++i) {
    out += io::csv_field(row_label_name(d.labels[i]));
    for (std::size_t j = 0; j < d.n; ++j) out += "," + io::format_double17(d(i, j));
    out += "\n";
  }
  return out;
}

std::string book_distance_csv(const BookDistanceMatrix& b) {
  std::string out = "book";
  for (const auto& l : b.books) out += "," + io::csv_field(l.name);
  out += "\n";
  for (std::size_t i = 0; i < b.books.size(); ++i) {
    out += io::csv_field(b.books[i].name);
    for (std::size_t j = 0; j < b.books.size(); ++j) out += "," + io::format_double17(b(i, j));
    out += "\n";
  }
  return out;
}

std::string correlation_csv(const MeasureCorrelation& c) {
  std::string out = "measure";
  for (auto m : c.measures) out += "," + std::string(to_string(m));
  out += "\n";
  for (std::size_t i = 0; i < c.measures.size(); ++i) {
    out += std::string(to_string(c.measures[i]));
    for (std::size_t j = 0; j < c.measures.size(); ++j) out += "," + io::format_double17(c(i, j));
    out += "\n";
  }
  return out;
}

std::string metric_report_text(const MetricReport& r) {
  std::string out = "axiom,violations\n";
  out += "nonnegativity," + std::to_string(r.nonnegativity) + "\n";
  out += "symmetry," + std::to_string(r.symmetry) + "\n";
  out += "identity," + std::to_string(r.identity) + "\n";
  out += "triangle," + std::to_string(r.triangle) + "\n";
  out += "triples_checked," + std::to_string(r.triples_checked) + "\n";
  for (const auto& v : r.examples) {
    out += "# " + v.axiom + " i=" + std::to_string(v.i) + " j=" + std::to_string(v.j) + " k=" + std::to_string(v.k) +
           " lhs=" + io::format_double17(v.lhs) + " rhs=" + io::format_double17(v.rhs) + "\n";
  }
  return out;
}

}  // namespace canon

namespace canon {

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// White to dark blue.
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto channel = [&](int from, int to) { return static_cast<int>(std::lround(from + (to - from) * t)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", channel(255, 8), channel(255, 48), channel(255, 107));
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string heatmap_svg(std::span<const double> values, const std::vector<std::string>& labels,
                        std::string_view title) {
  const auto n = labels.size();
  if (values.size() != n * n) throw Error(ErrorCode::DimensionMismatch, "heatmap needs an n x n matrix");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo > hi) lo = hi = 0.0;
  const double span = hi > lo ? hi - lo : 1.0;

  const bool show_labels = n <= 60;
  const double cell = n <= 60 ? 14.0 : std::max(1.0, 840.0 / static_cast<double>(n));
  const double margin = show_labels ? 140.0 : 40.0;
  const double grid = cell * static_cast<double>(n);
  const double legend_x = margin + grid + 30.0;
  const double width = legend_x + 90.0;
  const double height = margin + grid + 20.0;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  out += "<text x=\"" + num(margin) + "\" y=\"20\" font-size=\"14\">" + xml_escape(title) + "</text>\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = values[i * n + j];
      const std::string fill = std::isfinite(v) ? ramp((v - lo) / span) : "#cccccc";
      out += "<rect x=\"" + num(margin + cell * static_cast<double>(j)) + "\" y=\"" +
             num(margin + cell * static_cast<double>(i)) + "\" width=\"" + num(cell) + "\" height=\"" + num(cell) +
             "\" fill=\"" + fill + "\"><title>" + xml_escape(labels[i]) + " / " + xml_escape(labels[j]) + ": " +
             num(v) + "</title></rect>\n";
    }
  }
  if (show_labels) {
    for (std::size_t i = 0; i < n; ++i) {
      const double c = margin + cell * (static_cast<double>(i) + 0.5);
      out += "<text x=\"" + num(margin - 4) + "\" y=\"" + num(c + 3) + "\" text-anchor=\"end\">" +
             xml_escape(labels[i]) + "</text>\n";
      out += "<text transform=\"translate(" + num(c + 3) + "," + num(margin - 4) +
             ") rotate(-90)\" text-anchor=\"start\">" + xml_escape(labels[i]) + "</text>\n";
    }
  } else {
    out += "<text x=\"" + num(margin) + "\" y=\"" + num(margin - 6) + "\">document index 0.." +
           std::to_string(n - 1) + "</text>\n";
  }
  // Legend: vertical ramp, max on top.
  constexpr int kSteps = 20;
  const double step_h = grid / kSteps;
  for (int s = 0; s < kSteps; ++s) {
    const double t = 1.0 - (s + 0.5) / kSteps;
    out += "<rect x=\"" + num(legend_x) + "\" y=\"" + num(margin + step_h * s) + "\" width=\"16\" height=\"" +
           num(step_h + 0.5) + "\" fill=\"" + ramp(t) + "\"/>\n";
  }
  out += "<text x=\"" + num(legend_x + 20) + "\" y=\"" + num(margin + 8) + "\">" + num(hi) + "</text>\n";
  out += "<text x=\"" + num(legend_x + 20) + "\" y=\"" + num(margin + grid) + "\">" + num(lo) + "</text>\n";
  out += "</svg>\n";
  return out;
}

std::string heatmap_svg(const DistanceMatrix& d) {
  std::vector<std::string> labels;
  for (const auto& l : d.labels) labels.push_back(row_label_name(l));
  return heatmap_svg(d.values, labels, std::string(to_string(d.measure)) + " distance");
}

std::string heatmap_svg(const BookDistanceMatrix& b) {
  std::vector<std::string> labels;
  for (const auto& l : b.books) labels.push_back(l.name);
  return heatmap_svg(b.values, labels,
                     std::string(to_string(b.measure)) + " distance, " + std::string(to_string(b.linkage)) + " linkage");
}

}  // namespace canon
