#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace rqmcis {

/// One record of a Joe-Kuo style direction-number table: the primitive
/// polynomial of the given degree with interior coefficient code `a`, and
/// the initial direction integers m_1..m_degree.
struct DirectionRecord {
  std::size_t dimension = 0;
  unsigned degree = 0;
  std::uint32_t coefficients = 0;
  std::vector<std::uint32_t> initial;
};

/// Direction-number table. Dimension 1 (van der Corput) is implicit, so a
/// file with records for dimensions 2..D gives capacity D.
class DirectionNumbers {
 public:
  DirectionNumbers() = default;
  explicit DirectionNumbers(std::vector<DirectionRecord> records);

  std::size_t capacity() const noexcept { return records_.size() + 1; }

  /// Record for 1-based dimension 2..capacity().
  const DirectionRecord& record(std::size_t dimension) const;

  /// Throws CapacityError when the table lists fewer than `dimension` dimensions.
  void require(std::size_t dimension) const;

 private:
  std::vector<DirectionRecord> records_;
};

/// Parses whitespace-separated `d s a m_1 ... m_s` records, one per line.
/// A leading non-numeric header line is skipped. Throws ParseError naming
/// the offending line.
DirectionNumbers load_direction_numbers(std::istream& in);
DirectionNumbers load_direction_numbers(const std::filesystem::path& path);

/// $RQMCIS_DIRECTIONS if set, otherwise the table shipped with the sources.
std::filesystem::path default_direction_file();

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Sobol points in [0,1)^s, natural (non-Gray-code) order.
///
/// Point i is the XOR of the generating-matrix columns selected by the bits
/// of i, so point() is random access. With scrambling enabled each dimension's
/// generating matrix is left-multiplied by a random nonsingular lower-triangular
/// bit matrix and the result receives a random digital shift. The shift carries
/// 21 bits beyond the 32-bit net resolution with the last bit set, which keeps
/// every scrambled coordinate strictly inside (0,1).
class SobolGenerator {
 public:
  static constexpr unsigned kBits = 32;

  SobolGenerator(const DirectionNumbers& directions, std::size_t dimension, std::uint64_t seed,
                 bool scrambled);

  std::size_t dimension() const noexcept { return dimension_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool scrambled() const noexcept { return scrambled_; }

  /// Writes point `index` into `out` (size dimension()). Throws RangeError
  /// for index >= 2^32.
  void point(std::uint64_t index, std::span<double> out) const;
  std::vector<double> point(std::uint64_t index) const;

  /// Rows 0..n-1 of the sequence.
  PointMatrix block(std::size_t n) const;

  /// Scrambled generating matrix column `bit` of a dimension (0-based),
  /// with bit 31 holding the leading binary digit.
  std::uint32_t column(std::size_t dim, unsigned bit) const { return columns_[dim * kBits + bit]; }

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
  bool scrambled_;
  std::vector<std::uint32_t> columns_;
  std::vector<std::uint32_t> shift_;
  std::vector<std::uint32_t> tail_;
};

}  // namespace rqmcis
