#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arpf/matrix.hpp"

namespace arpf {

struct Dataset {
  Matrix x;                                // n × d
  std::optional<std::vector<int>> labels;  // length n when present
  std::string source;

  std::size_t n() const noexcept { return x.rows; }
  std::size_t d() const noexcept { return x.cols; }

  /// Rows selected by index, in the given order.
  Dataset subset(const std::vector<std::size_t>& rows) const;
  /// Sorted distinct labels.
  std::vector<int> classes() const;
};

struct CsvOptions {
  char delimiter = ',';
  bool header = true;
  /// Column holding integer labels; negative counts from the end (-1 = last).
  std::optional<int> label_column;
};

/// Throws std::runtime_error naming the offending line for unparsable cells
/// and ragged rows.
Dataset load_csv(const std::string& path, const CsvOptions& options = {});

/// Writes x0..x{d-1}[,label] with round-trip precision.
void save_csv(const Dataset& data, const std::string& path);

struct MixtureSpec {
  int classes = 5;
  int components = 4;  // Gaussian components per class
  std::size_t d = 2;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  double center_range = 4.0;     // centres uniform in [-range, range]^d
  double component_std = 0.45;   // isotropic spread of each component
  double min_separation = 1.6;   // rejection threshold between centres
};

/// Class-balanced Gaussian mixture: point i belongs to class i mod N and to a
/// component drawn uniformly among that class's components.
Dataset synth_gaussian_mixture(const MixtureSpec& spec);

}  // namespace arpf
