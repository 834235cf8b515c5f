#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace autospmv::csv {

/// Quotes a field only when it holds a comma, quote, CR or LF.
std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

/// RFC-4180 record reader. Quoted fields may span lines.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// False at end of input. Throws DataError on an unterminated quote.
  bool next(std::vector<std::string>& fields);
  /// Line on which the most recent record started (1-based).
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

}  // namespace autospmv::csv
