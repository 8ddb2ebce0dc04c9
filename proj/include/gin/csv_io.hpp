#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gin/data_matrix.hpp"

namespace gin {

// RFC-4180 records (quoted fields, doubled quotes, CRLF or LF).
// Throws gin::DataError on an unterminated quote.
std::vector<std::vector<std::string>> parse_csv_records(std::istream& in);

// Header row of names, then numeric rows. Throws gin::DataError naming the
// offending row and column for non-numeric or non-finite cells, ragged rows,
// duplicate names, or fewer than 2 data rows.
DataMatrix read_csv(std::istream& in);
DataMatrix load_csv(const std::string& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
void write_csv(std::ostream& out, const DataMatrix& data);
void save_csv(const std::string& path, const DataMatrix& data);

}  // namespace gin
