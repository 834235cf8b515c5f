#include "autospmv/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "autospmv/numeric_text.hpp"

namespace autospmv {

TripletMatrix::TripletMatrix(index_t n_rows, index_t n_cols,
                             std::vector<Triplet> entries)
    : n_rows_(n_rows), n_cols_(n_cols) {
  if (n_rows < 0 || n_cols < 0) {
    throw std::invalid_argument("TripletMatrix: negative dimension");
  }
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= n_rows || e.col < 0 || e.col >= n_cols) {
      throw std::invalid_argument("TripletMatrix: entry (" +
                                  std::to_string(e.row) + ", " +
                                  std::to_string(e.col) + ") out of bounds");
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  auto dup = std::adjacent_find(entries.begin(), entries.end(),
                                [](const Triplet& a, const Triplet& b) {
                                  return a.row == b.row && a.col == b.col;
                                });
  if (dup != entries.end()) {
    throw std::invalid_argument("TripletMatrix: duplicate coordinate (" +
                                std::to_string(dup->row) + ", " +
                                std::to_string(dup->col) + ")");
  }
  std::erase_if(entries, [](const Triplet& e) { return e.value == 0.0; });
  entries_ = std::move(entries);
}

std::vector<std::size_t> TripletMatrix::row_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_rows_), 0);
  for (const auto& e : entries_) ++counts[static_cast<std::size_t>(e.row)];
  return counts;
}

DenseMatrix make_dense(index_t n_rows, index_t n_cols, std::size_t max_cells) {
  const auto cells = static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols);
  if (cells > max_cells) {
    throw GuardExceeded("dense matrix of " + std::to_string(cells) +
                        " cells exceeds guard of " + std::to_string(max_cells));
  }
  return DenseMatrix{n_rows, n_cols, std::vector<double>(cells, 0.0)};
}

DenseMatrix to_dense(const TripletMatrix& m, std::size_t max_cells) {
  DenseMatrix d = make_dense(m.n_rows(), m.n_cols(), max_cells);
  for (const auto& e : m.entries()) d.at(e.row, e.col) = e.value;
  return d;
}

std::string_view to_string(ParseErrc code) {
  switch (code) {
    case ParseErrc::malformed_banner: return "malformed banner";
    case ParseErrc::unsupported_variant: return "unsupported variant";
    case ParseErrc::malformed_size_line: return "malformed size line";
    case ParseErrc::malformed_entry: return "malformed entry";
    case ParseErrc::index_out_of_bounds: return "index out of bounds";
    case ParseErrc::entry_count_mismatch: return "entry count mismatch";
    case ParseErrc::duplicate_coordinate: return "duplicate coordinate";
  }
  return "unknown";
}

ParseError::ParseError(ParseErrc code, std::size_t line, const std::string& what)
    : std::runtime_error("matrix market: " + std::string(to_string(code)) +
                         (line ? " at line " + std::to_string(line) : std::string()) +
                         ": " + what),
      code_(code),
      line_(line) {}

namespace {

enum class Field { real, integer, pattern };
enum class Symmetry { general, symmetric };

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

}  // namespace

TripletMatrix parse_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) {
    throw ParseError(ParseErrc::malformed_banner, 0, "empty input");
  }
  ++line_no;
  const auto banner = split_ws(line);
  if (banner.size() != 5 || banner[0] != "%%MatrixMarket") {
    throw ParseError(ParseErrc::malformed_banner, line_no,
                     "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'");
  }
  if (lower(banner[1]) != "matrix") {
    throw ParseError(ParseErrc::unsupported_variant, line_no,
                     "object '" + std::string(banner[1]) + "' is not 'matrix'");
  }
  if (lower(banner[2]) != "coordinate") {
    throw ParseError(ParseErrc::unsupported_variant, line_no,
                     "format '" + std::string(banner[2]) + "' is not 'coordinate'");
  }
  Field field;
  const auto field_name = lower(banner[3]);
  if (field_name == "real" || field_name == "double") {
    field = Field::real;
  } else if (field_name == "integer") {
    field = Field::integer;
  } else if (field_name == "pattern") {
    field = Field::pattern;
  } else {
    throw ParseError(ParseErrc::unsupported_variant, line_no,
                     "field '" + std::string(banner[3]) + "' is not supported");
  }
  Symmetry symmetry;
  const auto sym_name = lower(banner[4]);
  if (sym_name == "general") {
    symmetry = Symmetry::general;
  } else if (sym_name == "symmetric") {
    symmetry = Symmetry::symmetric;
  } else {
    throw ParseError(ParseErrc::unsupported_variant, line_no,
                     "symmetry '" + std::string(banner[4]) + "' is not supported");
  }

  // Size line: first line that is neither a comment nor blank.
  std::int64_t rows = 0, cols = 0, declared = 0;
  bool have_size = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.starts_with('%') || is_blank(line)) continue;
    const auto tok = split_ws(line);
    if (tok.size() != 3) {
      throw ParseError(ParseErrc::malformed_size_line, line_no, "expected 'rows cols nnz'");
    }
    auto r = parse_int(tok[0]), c = parse_int(tok[1]), n = parse_int(tok[2]);
    if (!r || !c || !n || *r < 0 || *c < 0 || *n < 0) {
      throw ParseError(ParseErrc::malformed_size_line, line_no, "non-integer or negative size");
    }
    constexpr auto kMaxIndex = std::numeric_limits<index_t>::max();
    if (*r > kMaxIndex || *c > kMaxIndex) {
      throw ParseError(ParseErrc::malformed_size_line, line_no, "dimension exceeds index range");
    }
    rows = *r;
    cols = *c;
    declared = *n;
    have_size = true;
    break;
  }
  if (!have_size) {
    throw ParseError(ParseErrc::malformed_size_line, 0, "missing size line");
  }
  if (symmetry == Symmetry::symmetric && rows != cols) {
    throw ParseError(ParseErrc::malformed_size_line, line_no, "symmetric matrix is not square");
  }

  const std::size_t expected_tokens = field == Field::pattern ? 2 : 3;
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(declared) *
                  (symmetry == Symmetry::symmetric ? 2 : 1));
  std::int64_t parsed = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.starts_with('%') || is_blank(line)) continue;
    const auto tok = split_ws(line);
    if (tok.size() != expected_tokens) {
      throw ParseError(ParseErrc::malformed_entry, line_no,
                       "expected " + std::to_string(expected_tokens) + " tokens");
    }
    if (parsed == declared) {
      throw ParseError(ParseErrc::entry_count_mismatch, line_no,
                       "more entries than the declared " + std::to_string(declared));
    }
    auto r = parse_int(tok[0]), c = parse_int(tok[1]);
    if (!r || !c) throw ParseError(ParseErrc::malformed_entry, line_no, "bad index");
    if (*r < 1 || *r > rows || *c < 1 || *c > cols) {
      throw ParseError(ParseErrc::index_out_of_bounds, line_no,
                       "entry (" + std::string(tok[0]) + ", " + std::string(tok[1]) +
                           ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    double value = 1.0;
    if (field == Field::real) {
      auto v = parse_double(tok[2]);
      if (!v) throw ParseError(ParseErrc::malformed_entry, line_no, "bad real value");
      value = *v;
    } else if (field == Field::integer) {
      auto v = parse_int(tok[2]);
      if (!v) throw ParseError(ParseErrc::malformed_entry, line_no, "bad integer value");
      value = static_cast<double>(*v);
    }
    const auto row = static_cast<index_t>(*r - 1);
    const auto col = static_cast<index_t>(*c - 1);
    entries.push_back({row, col, value});
    if (symmetry == Symmetry::symmetric && row != col) entries.push_back({col, row, value});
    ++parsed;
  }
  if (parsed != declared) {
    throw ParseError(ParseErrc::entry_count_mismatch, 0,
                     "declared " + std::to_string(declared) + " entries, found " +
                         std::to_string(parsed));
  }

  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  auto dup = std::adjacent_find(entries.begin(), entries.end(),
                                [](const Triplet& a, const Triplet& b) {
                                  return a.row == b.row && a.col == b.col;
                                });
  if (dup != entries.end()) {
    throw ParseError(ParseErrc::duplicate_coordinate, 0,
                     "(" + std::to_string(dup->row + 1) + ", " +
                         std::to_string(dup->col + 1) + ") appears more than once");
  }
  return TripletMatrix(static_cast<index_t>(rows), static_cast<index_t>(cols),
                       std::move(entries));
}

TripletMatrix parse_matrix_market(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_matrix_market(in);
}

TripletMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_matrix_market(in);
}

void emit_matrix_market(std::ostream& out, const TripletMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.n_rows() << ' ' << m.n_cols() << ' ' << m.nnz() << '\n';
  for (const auto& e : m.entries()) {
    out << (e.row + 1) << ' ' << (e.col + 1) << ' ' << format_double(e.value) << '\n';
  }
}

std::string emit_matrix_market(const TripletMatrix& m) {
  std::ostringstream out;
  emit_matrix_market(out, m);
  return out.str();
}

void write_matrix_market(const std::filesystem::path& path, const TripletMatrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  emit_matrix_market(out, m);
}

}  // namespace autospmv
