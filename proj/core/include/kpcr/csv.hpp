#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kpcr {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column_index(const std::string& name) const;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
/// temp-file + rename so readers never see a partial file
void write_csv_atomic(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);
void write_file_atomic(const std::string& path, const std::string& content);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);
/// Strict double parse of a whole cell; nullopt for non-numeric or trailing junk.
std::optional<double> parse_double(const std::string& cell);

}  // namespace kpcr
