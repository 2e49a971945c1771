#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace blowup {

// Shortest round-trip decimal form; identical bits give identical text.
std::string format_number(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& add(std::vector<std::string> row);
  const std::vector<std::string>& header() const { return header_; }
  size_t rows() const { return rows_.size(); }
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Fixed column order of every CSV the CLI writes.
struct CsvSchema {
  std::string kind;
  std::vector<std::string> columns;
};

const std::vector<CsvSchema>& csv_schemas();
const CsvSchema& csv_schema(std::string_view kind);

// Checks the header row of CSV text against a schema. Throws schema_mismatch
// naming the first missing column, or when the text has no header.
void validate_csv(std::string_view kind, std::string_view text);

// git hash-object: SHA-1 of "blob <size>\0" followed by the content, in hex.
std::string git_blob_sha1(std::string_view content);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace blowup
