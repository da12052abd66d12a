#include "rqmcis/lds.hpp"

#include <bit>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "rqmcis/errors.hpp"
#include "rqmcis/rng.hpp"

#ifndef RQMCIS_DATA_DIR
#define RQMCIS_DATA_DIR "data"
#endif

namespace rqmcis {

DirectionNumbers::DirectionNumbers(std::vector<DirectionRecord> records) : records_(std::move(records)) {}

const DirectionRecord& DirectionNumbers::record(std::size_t dimension) const {
  if (dimension < 2 || dimension > capacity())
    throw CapacityError("direction table has no record for dimension " + std::to_string(dimension));
  return records_[dimension - 2];
}

void DirectionNumbers::require(std::size_t dimension) const {
  if (dimension > capacity())
    throw CapacityError("requested dimension " + std::to_string(dimension) + " exceeds table capacity " +
                        std::to_string(capacity()));
}

DirectionNumbers load_direction_numbers(std::istream& in) {
  std::vector<DirectionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (records.empty() && line_no == 1 && !std::isdigit(static_cast<unsigned char>(first[0]))) continue;

    DirectionRecord rec;
    long long d = 0, s = 0, a = 0;
    try {
      std::size_t used = 0;
      d = std::stoll(first, &used);
      if (used != first.size()) throw std::invalid_argument(first);
    } catch (const std::exception&) {
      throw ParseError("expected dimension index, got '" + first + "'", line_no);
    }
    if (!(fields >> s >> a)) throw ParseError("record must contain 'd s a m_1 ... m_s'", line_no);
    const long long coefficient_limit = s == 1 ? 1 : (1LL << (s - 1));
    if (d < 2 || s < 1 || s > 31 || a < 0 || a >= coefficient_limit)
      throw ParseError("invalid degree or coefficient code", line_no);
    if (d != static_cast<long long>(records.size()) + 2)
      throw ParseError("records must list consecutive dimensions starting at 2", line_no);
    rec.dimension = static_cast<std::size_t>(d);
    rec.degree = static_cast<unsigned>(s);
    rec.coefficients = static_cast<std::uint32_t>(a);
    for (long long k = 1; k <= s; ++k) {
      long long m = 0;
      if (!(fields >> m)) throw ParseError("expected " + std::to_string(s) + " direction integers", line_no);
      if (m <= 0 || m % 2 == 0 || m >= (1LL << k))
        throw ParseError("direction integer m_" + std::to_string(k) + " must be odd and below 2^" +
                             std::to_string(k),
                         line_no);
      rec.initial.push_back(static_cast<std::uint32_t>(m));
    }
    std::string extra;
    if (fields >> extra) throw ParseError("trailing token '" + extra + "'", line_no);
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw ParseError("no direction-number records found", line_no);
  return DirectionNumbers(std::move(records));
}

DirectionNumbers load_direction_numbers(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open direction-number file " + path.string());
  return load_direction_numbers(in);
}

std::filesystem::path default_direction_file() {
  if (const char* env = std::getenv("RQMCIS_DIRECTIONS"); env && *env) return env;
  return std::filesystem::path(RQMCIS_DATA_DIR) / "new-joe-kuo-6.1024.txt";
}

namespace {

// Generating-matrix columns for one dimension; v[k] holds column k with the
// leading digit in bit 31.
std::vector<std::uint32_t> direction_columns(const DirectionNumbers& table, std::size_t dim) {
  constexpr unsigned w = SobolGenerator::kBits;
  std::vector<std::uint32_t> v(w);
  if (dim == 1) {
    for (unsigned k = 0; k < w; ++k) v[k] = 1u << (w - 1 - k);
    return v;
  }
  const DirectionRecord& rec = table.record(dim);
  const unsigned s = rec.degree;
  for (unsigned k = 0; k < s && k < w; ++k) v[k] = rec.initial[k] << (w - 1 - k);
  for (unsigned k = s; k < w; ++k) {
    std::uint32_t value = v[k - s] ^ (v[k - s] >> s);
    for (unsigned l = 1; l < s; ++l)
      if ((rec.coefficients >> (s - 1 - l)) & 1u) value ^= v[k - l];
    v[k] = value;
  }
  return v;
}

}  // namespace

SobolGenerator::SobolGenerator(const DirectionNumbers& directions, std::size_t dimension, std::uint64_t seed,
                               bool scrambled)
    : dimension_(dimension), seed_(seed), scrambled_(scrambled) {
  if (dimension == 0) throw DomainError("SobolGenerator: dimension must be at least 1");
  directions.require(dimension);
  columns_.resize(dimension * kBits);
  shift_.assign(dimension, 0);
  tail_.assign(dimension, 0);

  for (std::size_t j = 0; j < dimension; ++j) {
    std::vector<std::uint32_t> v = direction_columns(directions, j + 1);
    if (scrambled) {
      // Row r of the lower-triangular scramble produces output digit r+1
      // (bit 31-r) from input digits 1..r+1; the diagonal is forced to 1.
      const CounterRng rng(hash_words({seed, 0x5c4a3b1eULL, j}));
      std::uint32_t rows[kBits];
      for (unsigned r = 0; r < kBits; ++r) {
        const std::uint32_t diagonal = 1u << (kBits - 1 - r);
        const std::uint32_t above = r == 0 ? 0u : ~((diagonal << 1) - 1u);
        rows[r] = (static_cast<std::uint32_t>(rng.bits(r)) & above) | diagonal;
      }
      for (unsigned k = 0; k < kBits; ++k) {
        std::uint32_t scrambled_col = 0;
        for (unsigned r = 0; r < kBits; ++r)
          scrambled_col |= static_cast<std::uint32_t>(std::popcount(rows[r] & v[k]) & 1) << (kBits - 1 - r);
        v[k] = scrambled_col;
      }
      const std::uint64_t shift_bits = rng.bits(kBits);
      shift_[j] = static_cast<std::uint32_t>(shift_bits >> 32);
      tail_[j] = ((static_cast<std::uint32_t>(shift_bits) & 0xfffffu) << 1) | 1u;
    }
    std::copy(v.begin(), v.end(), columns_.begin() + static_cast<std::ptrdiff_t>(j * kBits));
  }
}

void SobolGenerator::point(std::uint64_t index, std::span<double> out) const {
  if (index >> kBits) throw RangeError("SobolGenerator: index exceeds 2^32 - 1");
  if (out.size() != dimension_) throw DomainError("SobolGenerator: output span has wrong size");
  for (std::size_t j = 0; j < dimension_; ++j) {
    const std::uint32_t* col = columns_.data() + j * kBits;
    std::uint32_t x = 0;
    for (std::uint64_t bits = index; bits; bits &= bits - 1) x ^= col[std::countr_zero(bits)];
    if (scrambled_) {
      const std::uint64_t code = (static_cast<std::uint64_t>(x ^ shift_[j]) << 21) | tail_[j];
      out[j] = static_cast<double>(code) * 0x1p-53;
    } else {
      out[j] = static_cast<double>(x) * 0x1p-32;
    }
  }
}

std::vector<double> SobolGenerator::point(std::uint64_t index) const {
  std::vector<double> out(dimension_);
  point(index, out);
  return out;
}

PointMatrix SobolGenerator::block(std::size_t n) const {
  if (n == 0) throw DomainError("SobolGenerator::block: n must be at least 1");
  PointMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dimension_));
  for (std::size_t i = 0; i < n; ++i)
    point(i, std::span<double>(m.row(static_cast<Eigen::Index>(i)).data(), dimension_));
  return m;
}

}  // namespace rqmcis
