#include "blowup/report.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "blowup/errors.hpp"

namespace blowup {

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw Error(ErrorKind::invalid_argument, "row has " + std::to_string(row.size()) + " cells, header has " +
                                                 std::to_string(header_.size()));
  rows_.push_back(std::move(row));
  return *this;
}

namespace {

void join(std::ostringstream& os, const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
  os << '\n';
}

std::vector<std::string> split_header(std::string_view text) {
  const size_t end = text.find('\n');
  std::string_view line = text.substr(0, end);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  if (line.empty()) return out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string CsvTable::str() const {
  std::ostringstream os;
  join(os, header_);
  for (const auto& r : rows_) join(os, r);
  return os.str();
}

void CsvTable::write(const std::string& path) const { write_file(path, str()); }

const std::vector<CsvSchema>& csv_schemas() {
  static const std::vector<CsvSchema> schemas = {
      {"spectrum", {"index", "re", "im", "accepted", "drift", "tail"}},
      {"evolve", {"tau", "h_norm", "sup_phi1", "a_tau"}},
      {"evolve-states", {"tau", "rho", "phi1", "phi2"}},
      {"state", {"rho", "phi1", "phi2"}},
      {"resolvent", {"rho", "re_u0", "im_u0", "re_u1", "im_u1", "re_G", "im_G"}},
      {"scan-w0", {"eps", "omega", "abs_w0"}},
      {"dalembert", {"member", "tau", "lq_norm"}},
      {"strichartz", {"member", "skipped", "norm0", "value", "tail", "ratio", "slope"}},
      {"kernel", {"rho", "s", "tau", "re_K", "im_K", "envelope", "ratio", "error_bar"}},
      {"stability", {"delta", "member", "T_star", "S", "S_tail", "physical", "trials", "monotone"}},
  };
  return schemas;
}

const CsvSchema& csv_schema(std::string_view kind) {
  for (const CsvSchema& s : csv_schemas())
    if (s.kind == kind) return s;
  throw Error(ErrorKind::invalid_argument, "unknown CSV kind '" + std::string(kind) + "'");
}

void validate_csv(std::string_view kind, std::string_view text) {
  const CsvSchema& schema = csv_schema(kind);
  const std::vector<std::string> header = split_header(text);
  if (header.empty()) throw Error(ErrorKind::schema_mismatch, "empty CSV: missing column '" + schema.columns[0] + "'");
  for (const std::string& c : schema.columns) {
    bool found = false;
    for (const std::string& h : header) found = found || h == c;
    if (!found) throw Error(ErrorKind::schema_mismatch, "missing column '" + c + "'");
  }
}

std::string git_blob_sha1(std::string_view content) {
  const std::string head = "blob " + std::to_string(content.size()) + '\0';
  std::string data = head;
  data.append(content);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw Error(ErrorKind::invalid_argument, "SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    const unsigned char b = md[i];
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 15]);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::invalid_argument, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::invalid_argument, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace blowup
