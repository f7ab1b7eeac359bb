#ifndef APC_IO_HPP
#define APC_IO_HPP

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ios>
#include <sstream>
#include <string>
#include <vector>

#include "apc/algebra.hpp"
#include "apc/errors.hpp"
#include "apc/pattern.hpp"

namespace apc {

/// Full-precision (round-trip safe) decimal rendering of a double.
inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

/// FNV-1a over the coordinate bytes plus the geometry; identifies a pattern
/// in serialized-kernel headers.
inline std::uint64_t pattern_hash(const DelonePattern& pattern) {
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  mix(&pattern.geometry.d, sizeof(pattern.geometry.d));
  mix(&pattern.geometry.L, sizeof(pattern.geometry.L));
  for (int i = 0; i < pattern.size(); ++i)
    mix(pattern.points.row(i).data(),
        sizeof(double) * static_cast<std::size_t>(pattern.geometry.d));
  return h;
}

inline void write_pattern(std::ostream& os, const DelonePattern& pattern) {
  os << "# L=" << format_double(pattern.geometry.L)
     << " d=" << pattern.geometry.d
     << " d_min=" << format_double(pattern.d_min)
     << " seed=" << pattern.seed << " kind=" << to_string(pattern.kind)
     << "\n";
  for (int i = 0; i < pattern.size(); ++i) {
    for (int j = 0; j < pattern.geometry.d; ++j) {
      if (j) os << ' ';
      os << format_double(pattern.points(i, j));
    }
    os << "\n";
  }
}

inline void write_pattern(const std::string& path,
                          const DelonePattern& pattern) {
  std::ofstream os(path);
  if (!os) throw Error("write_pattern: cannot open " + path);
  write_pattern(os, pattern);
}

inline DelonePattern read_pattern(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    throw Error("read_pattern: missing '# ' header line");

  DelonePattern pattern;
  std::string kind_tag;
  bool seen_L = false, seen_d = false;
  std::istringstream head(line.substr(2));
  std::string token;
  while (head >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos)
      throw Error("read_pattern: malformed header token '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string val = token.substr(eq + 1);
    if (key == "L") {
      pattern.geometry.L = std::stod(val);
      seen_L = true;
    } else if (key == "d") {
      pattern.geometry.d = std::stoi(val);
      seen_d = true;
    } else if (key == "d_min") {
      pattern.d_min = std::stod(val);
    } else if (key == "d_max") {
      pattern.d_max = std::stod(val);
    } else if (key == "seed") {
      pattern.seed = std::stoull(val);
    } else if (key == "kind") {
      kind_tag = val;
    } else {
      throw Error("read_pattern: unknown header key '" + key + "'");
    }
  }
  if (!seen_L || !seen_d) throw Error("read_pattern: header must set L and d");
  pattern.kind =
      kind_tag.empty() ? PatternKind::custom : pattern_kind_from_string(kind_tag);

  std::vector<double> coords;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    double v;
    int got = 0;
    while (row >> v) {
      coords.push_back(v);
      ++got;
    }
    if (got != pattern.geometry.d)
      throw Error("read_pattern: row with " + std::to_string(got) +
                  " coordinates, expected " +
                  std::to_string(pattern.geometry.d));
  }
  const auto n = coords.size() / static_cast<std::size_t>(pattern.geometry.d);
  pattern.points.resize(static_cast<Eigen::Index>(n), pattern.geometry.d);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < pattern.geometry.d; ++j)
      pattern.points(static_cast<Eigen::Index>(i), j) =
          coords[i * pattern.geometry.d + j];
  return pattern;
}

inline DelonePattern read_pattern(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("read_pattern: cannot open " + path);
  return read_pattern(is);
}

/// Triplet serialization `x_index, y_index, re, im` with a pattern-hash
/// header for integrity.
inline void write_kernel(std::ostream& os, const CovariantKernel& kernel) {
  os << "# pattern_hash=" << pattern_hash(*kernel.pattern())
     << " range=" << format_double(kernel.range())
     << " hermitian=" << (kernel.hermitian_flag() ? 1 : 0) << "\n";
  os << "x_index,y_index,re,im\n";
  kernel.for_each([&os](int i, int j, Complex v) {
    os << i << ',' << j << ',' << format_double(v.real()) << ','
       << format_double(v.imag()) << "\n";
  });
}

inline void write_kernel(const std::string& path,
                         const CovariantKernel& kernel) {
  std::ofstream os(path);
  if (!os) throw Error("write_kernel: cannot open " + path);
  write_kernel(os, kernel);
}

/// Reads a triplet stream back onto its pattern; rejects data written for a
/// different pattern.
inline CovariantKernel read_kernel(std::istream& is,
                                   std::shared_ptr<const DelonePattern> pattern) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    throw Error("read_kernel: missing '# ' header line");
  std::uint64_t expect_hash = 0;
  double range = 0.0;
  bool hermitian = false;
  std::istringstream head(line.substr(2));
  std::string token;
  while (head >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos)
      throw Error("read_kernel: malformed header token '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string val = token.substr(eq + 1);
    if (key == "pattern_hash") {
      expect_hash = std::stoull(val);
    } else if (key == "range") {
      range = std::stod(val);
    } else if (key == "hermitian") {
      hermitian = val == "1";
    } else {
      throw Error("read_kernel: unknown header key '" + key + "'");
    }
  }
  if (expect_hash != pattern_hash(*pattern))
    throw PatternMismatch("read_kernel: pattern hash mismatch");

  CovariantKernel kernel(std::move(pattern), range, hermitian);
  bool saw_columns = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_columns) {
      if (line != "x_index,y_index,re,im")
        throw Error("read_kernel: unexpected column header '" + line + "'");
      saw_columns = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4)
      throw Error("read_kernel: malformed triplet row '" + line + "'");
    kernel.set(std::stoi(cells[0]), std::stoi(cells[1]),
               Complex(std::stod(cells[2]), std::stod(cells[3])));
  }
  return kernel;
}

inline CovariantKernel read_kernel(
    const std::string& path, std::shared_ptr<const DelonePattern> pattern) {
  std::ifstream is(path);
  if (!is) throw Error("read_kernel: cannot open " + path);
  return read_kernel(is, std::move(pattern));
}

/// Minimal deterministic CSV writer: caller supplies header once and rows
/// already formatted via format_double.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header) : os_(path) {
    if (!os_) throw Error("CsvWriter: cannot open " + path);
    os_ << header << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << "\n";
  }

 private:
  std::ofstream os_;
};

}  // namespace apc

#endif  // APC_IO_HPP
