#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "loca/probvec.hpp"

namespace loca::cli {

/// Malformed dump or label file. `line` is 1-based; 0 when the problem is not
/// tied to a single line (e.g. a count mismatch).
class FormatError : public std::runtime_error {
public:
  FormatError(const std::filesystem::path &file, std::size_t line, const std::string &what);

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Rows of C reals under a "class_0,...,class_{C-1}" header.
struct Dump {
  std::size_t classes = 0;
  std::vector<std::vector<double>> rows;
};

/// Digits written per value; enough for an exact double round trip.
inline constexpr int kDumpDigits = 17;

Dump parse_dump(const std::string &text, const std::filesystem::path &origin = "<memory>");
Dump read_dump(const std::filesystem::path &path);

std::string format_dump(const Dump &dump);
void write_dump(const std::filesystem::path &path, const Dump &dump);

/// One base-10 integer per line, each in [0, classes).
std::vector<ClassIndex> parse_labels(const std::string &text, std::size_t classes,
                                     const std::filesystem::path &origin = "<memory>");
std::vector<ClassIndex> read_labels(const std::filesystem::path &path, std::size_t classes);

std::string format_labels(std::span<const ClassIndex> labels);

} // namespace loca::cli
