// Apache License, Version 2.0, refer to LICENSE.txt

#include "hbmlab/textio.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "hbmlab/errors.hpp"

namespace hbmlab {

void RecordFile::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : header) {
    if (k == key) {
      v = value;
      return;
    }
  }
  header.emplace_back(key, value);
}

bool RecordFile::has(const std::string& key) const {
  for (const auto& kv : header)
    if (kv.first == key) return true;
  return false;
}

const std::string& RecordFile::get(const std::string& key) const {
  for (const auto& kv : header)
    if (kv.first == key) return kv.second;
  fail(ErrorKind::kIo, "missing header key '" + key + "' in " + format + " file");
}

void write_record_file(const std::string& path, const RecordFile& file) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out << "hbmlab-" << file.format << ' ' << file.version << '\n';
  for (const auto& [key, value] : file.header) {
    if (key.empty() || key.find_first_of(" \t\n") != std::string::npos ||
        value.find('\n') != std::string::npos)
      fail(ErrorKind::kIo, "unserializable header entry '" + key + "'");
    out << key << ' ' << value << '\n';
  }
  out << "---\n";
  for (const auto& record : file.records) out << record << '\n';
  if (!out) fail(ErrorKind::kIo, "write failed for '" + path + "'");
}

RecordFile read_record_file(const std::string& path,
                            const std::string& expected_format,
                            int max_version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    fail(ErrorKind::kIo, "'" + path + "' is empty");
  const auto magic = split_whitespace(line);
  if (magic.size() != 2 || magic[0] != "hbmlab-" + expected_format)
    fail(ErrorKind::kIo, "'" + path + "' is not an hbmlab-" + expected_format +
                             " file");
  RecordFile file;
  file.format = expected_format;
  file.version = static_cast<int>(parse_unsigned(magic[1]));
  if (file.version < 1 || file.version > max_version)
    fail(ErrorKind::kIo, "'" + path + "' has unsupported version " + magic[1]);

  bool in_header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (in_header) {
      if (line == "---") {
        in_header = false;
        continue;
      }
      if (line.empty()) continue;
      const auto space = line.find(' ');
      if (space == std::string::npos)
        file.header.emplace_back(line, "");
      else
        file.header.emplace_back(line.substr(0, space), line.substr(space + 1));
    } else if (!line.empty()) {
      file.records.push_back(line);
    }
  }
  if (in_header) fail(ErrorKind::kIo, "'" + path + "' has no record section");
  return file;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

double parse_double(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    fail(ErrorKind::kIo, "malformed number '" + text + "'");
  return value;
}

std::uint64_t parse_u64(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  if (text.empty() || text[0] == '-')
    fail(ErrorKind::kIo, "malformed unsigned integer '" + text + "'");
  const unsigned long long value = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE)
    fail(ErrorKind::kIo, "malformed unsigned integer '" + text + "'");
  return value;
}

unsigned parse_unsigned(const std::string& text) {
  const std::uint64_t value = parse_u64(text);
  if (value > std::numeric_limits<unsigned>::max())
    fail(ErrorKind::kIo, "integer out of range '" + text + "'");
  return static_cast<unsigned>(value);
}

std::vector<std::string> split_whitespace(const std::string& line) {
  std::istringstream stream(line);
  std::vector<std::string> tokens;
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

}  // namespace hbmlab
