#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace quotecross {

// RFC-4180 CSV reader: quoted fields, doubled-quote escapes, embedded
// newlines inside quotes, CRLF or LF line endings.
class CsvReader {
  public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Reads one record. Returns nullopt at end of input. `line` receives
    // the 1-based line number the record started on.
    std::optional<std::vector<std::string>> next(std::size_t& line);

  private:
    std::istream& in_;
    std::size_t line_ = 0;
};

// Quotes a field if it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

std::string csv_join(const std::vector<std::string>& fields);

}  // namespace quotecross
