// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hbmlab {

/// Line-oriented container shared by every file format of the library:
///
///   hbmlab-<format> <version>
///   <key> <value...>          (header, one per line, order preserved)
///   ---
///   <record>                  (one per line)
struct RecordFile {
  std::string format;
  int version = 1;
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::string> records;

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
};

void write_record_file(const std::string& path, const RecordFile& file);
RecordFile read_record_file(const std::string& path,
                            const std::string& expected_format,
                            int max_version);

/// 17 significant digits, round-trips every double.
std::string format_double(double value);
double parse_double(const std::string& text);
std::uint64_t parse_u64(const std::string& text);
unsigned parse_unsigned(const std::string& text);

std::vector<std::string> split_whitespace(const std::string& line);

}  // namespace hbmlab
