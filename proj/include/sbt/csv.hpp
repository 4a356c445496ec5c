#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace sbt {

/// Round-trip safe, locale-independent decimal rendering (17 significant
/// digits, '.' decimal point).
std::string format_double(double value);

/// Comma-separated writer with '\n' line endings and a mandatory header.
/// Throws std::runtime_error carrying the path when the file cannot be
/// opened or written.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
  CsvWriter& cell(std::string_view text);
  void end_row();

  std::size_t rows_written() const { return rows_; }
  const std::filesystem::path& path() const { return path_; }

  /// Flushes and checks the stream; throws on I/O failure.
  void close();

 private:
  void separator();

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t current_ = 0;
  std::size_t rows_ = 0;
};

}  // namespace sbt
