#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <doctest.h>

#include "canon/dtm.hpp"
#include "canon/random.hpp"

namespace canon::test {

inline std::filesystem::path source_dir() { return CANON_SOURCE_DIR; }
inline std::filesystem::path data_dir() { return CANON_TEST_DATA; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("canon_unit_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

/// Nonnegative vector with roughly `density` nonzeros, integer-valued when
/// `integer` is set.
inline std::vector<double> random_vector(SplitMix64& rng, std::size_t p, double density = 0.5, bool integer = false) {
  std::vector<double> v(p, 0.0);
  for (auto& x : v) {
    if (rng.uniform() < density) x = integer ? static_cast<double>(1 + rng.below(9)) : rng.uniform() * 10.0;
  }
  return v;
}

inline RealMatrix random_matrix(SplitMix64& rng, std::size_t n, std::size_t p, double density = 0.5) {
  RealMatrix m(p);
  for (std::size_t i = 0; i < n; ++i) {
    auto v = random_vector(rng, p, density);
    v[rng.below(p)] += 1.0;  // never an all-zero row
    m.push_dense_row(v);
  }
  return m;
}

/// Code of the canon::Error thrown by `fn`; fails the test if none is.
inline ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvariantViolation;
}

inline std::vector<RowLabel> labels_for(std::size_t n, std::size_t per_book = 1) {
  std::vector<RowLabel> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = static_cast<BookId>(i / per_book);
    out.push_back(RowLabel{BookLabel{b, "b" + std::to_string(b)}, static_cast<std::uint32_t>(i % per_book + 1)});
  }
  return out;
}

}  // namespace canon::test
