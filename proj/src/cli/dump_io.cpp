#include "loca/cli/dump_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace loca::cli {

FormatError::FormatError(const std::filesystem::path &file, std::size_t line, const std::string &what)
    : std::runtime_error(file.string() + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
      line_(line) {}

namespace {

std::string slurp(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw FormatError(path, 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Splits on '\n'. A trailing newline does not start an extra line; a
/// trailing '\r' is stripped from each line.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

} // namespace

Dump parse_dump(const std::string &text, const std::filesystem::path &origin) {
  const auto lines = split_lines(text);
  if (lines.empty())
    throw FormatError(origin, 1, "missing header line");

  const auto header = split_fields(lines[0]);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != "class_" + std::to_string(c))
      throw FormatError(origin, 1, "header field " + std::to_string(c) + " should be class_" + std::to_string(c));
  }
  Dump dump;
  dump.classes = header.size();
  if (dump.classes < 2)
    throw FormatError(origin, 1, "header declares fewer than 2 classes");

  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto fields = split_fields(lines[l]);
    if (fields.size() != dump.classes) {
      throw FormatError(origin, l + 1,
                        "expected " + std::to_string(dump.classes) + " values, found " + std::to_string(fields.size()));
    }
    std::vector<double> row(dump.classes);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto field = fields[c];
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), row[c]);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(row[c])) {
        throw FormatError(origin, l + 1, "column " + std::to_string(c) + ": '" + std::string(field) +
                                             "' is not a finite decimal number");
      }
    }
    dump.rows.push_back(std::move(row));
  }
  return dump;
}

Dump read_dump(const std::filesystem::path &path) { return parse_dump(slurp(path), path); }

std::string format_dump(const Dump &dump) {
  std::string out;
  for (std::size_t c = 0; c < dump.classes; ++c) {
    out += c == 0 ? "" : ",";
    out += "class_" + std::to_string(c);
  }
  out += '\n';
  char buf[64];
  for (const auto &row : dump.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0)
        out += ',';
      const auto res = std::to_chars(buf, buf + sizeof buf, row[c], std::chars_format::general, kDumpDigits);
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  return out;
}

void write_dump(const std::filesystem::path &path, const Dump &dump) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw FormatError(path, 0, "cannot open file for writing");
  out << format_dump(dump);
  if (!out)
    throw FormatError(path, 0, "write failed");
}

std::vector<ClassIndex> parse_labels(const std::string &text, std::size_t classes,
                                     const std::filesystem::path &origin) {
  std::vector<ClassIndex> labels;
  const auto lines = split_lines(text);
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const auto line = lines[l];
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    if (line.empty() || ec != std::errc() || ptr != line.data() + line.size())
      throw FormatError(origin, l + 1, "'" + std::string(line) + "' is not a nonnegative base-10 integer");
    if (value >= classes) {
      throw FormatError(origin, l + 1,
                        "label " + std::to_string(value) + " out of range for " + std::to_string(classes) + " classes");
    }
    labels.push_back(ClassIndex{value});
  }
  return labels;
}

std::vector<ClassIndex> read_labels(const std::filesystem::path &path, std::size_t classes) {
  return parse_labels(slurp(path), classes, path);
}

std::string format_labels(std::span<const ClassIndex> labels) {
  std::string out;
  for (const auto label : labels)
    out += std::to_string(label.value) + '\n';
  return out;
}

} // namespace loca::cli
