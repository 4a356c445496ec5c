#include "sbt/csv.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

#include "sbt/errors.hpp"

namespace sbt {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 17);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  out_.open(path, std::ios::out | std::ios::trunc | std::ios::binary);
  if (!out_) throw Error("cannot open for writing: " + path.string());
  for (const auto& h : header) cell(h);
  current_ = 0;
  out_ << '\n';
}

void CsvWriter::separator() {
  if (current_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::cell(double value) {
  separator();
  out_ << format_double(value);
  return *this;
}

CsvWriter& CsvWriter::cell(long long value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  separator();
  out_ << text;
  return *this;
}

void CsvWriter::end_row() {
  if (current_ != columns_) {
    throw Error("csv row has " + std::to_string(current_) + " cells, expected " +
                std::to_string(columns_) + ": " + path_.string());
  }
  out_ << '\n';
  current_ = 0;
  ++rows_;
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw Error("write failed: " + path_.string());
  out_.close();
}

}  // namespace sbt
