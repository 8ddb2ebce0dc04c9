#include "gin/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <set>
#include <system_error>

#include "gin/error.hpp"

namespace gin {

std::vector<std::vector<std::string>> parse_csv_records(std::istream& in) {
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false, field_started = false;
    std::size_t line = 1;
    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        // A blank line is not a record.
        if (!(record.size() == 1 && record.front().empty())) records.push_back(std::move(record));
        record.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (field_started)
                    throw DataError("stray quote inside unquoted field on line " + std::to_string(line));
                quoted = field_started = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                end_record();
                ++line;
                break;
            case '\n':
                end_record();
                ++line;
                break;
            default:
                field.push_back(ch);
                field_started = true;
        }
    }
    if (quoted) throw DataError("unterminated quoted field at end of input");
    if (field_started || !field.empty() || !record.empty()) end_record();
    return records;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

DataMatrix read_csv(std::istream& in) {
    const auto records = parse_csv_records(in);
    if (records.empty()) throw DataError("empty CSV input (no header row)");
    const auto& header = records.front();
    std::set<std::string> seen;
    for (const auto& name : header) {
        if (name.empty()) throw DataError("empty column name in header");
        if (!seen.insert(name).second) throw DataError("duplicate column name '" + name + "'");
    }
    const std::size_t rows = records.size() - 1;
    if (rows < 2) throw DataError("fewer than 2 rows of data");
    const auto cols = static_cast<Eigen::Index>(header.size());
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows), cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& rec = records[r + 1];
        if (rec.size() != header.size())
            throw DataError("row " + std::to_string(r + 1) + " has " + std::to_string(rec.size()) +
                            " fields, header has " + std::to_string(header.size()));
        for (Eigen::Index c = 0; c < cols; ++c) {
            const std::string cell = trim(rec[static_cast<std::size_t>(c)]);
            double v = 0.0;
            const char* first = cell.data();
            const char* last = first + cell.size();
            if (!cell.empty() && *first == '+') ++first;
            const auto res = std::from_chars(first, last, v);
            const std::string where = "row " + std::to_string(r + 1) + ", column '" +
                                      header[static_cast<std::size_t>(c)] + "'";
            if (cell.empty() || res.ec != std::errc() || res.ptr != last)
                throw DataError("non-numeric cell '" + cell + "' at " + where);
            if (!std::isfinite(v)) throw DataError("non-finite cell '" + cell + "' at " + where);
            values(static_cast<Eigen::Index>(r), c) = v;
        }
    }
    return DataMatrix(std::move(values), header);
}

DataMatrix load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "' for reading");
    return read_csv(in);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

}  // namespace

void write_csv(std::ostream& out, const DataMatrix& data) {
    const auto& names = data.names();
    for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << quote_if_needed(names[c]);
    out << "\r\n";
    const auto& v = data.values();
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        for (Eigen::Index c = 0; c < v.cols(); ++c) out << (c ? "," : "") << format_double(v(r, c));
        out << "\r\n";
    }
}

void save_csv(const std::string& path, const DataMatrix& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    write_csv(out, data);
    if (!out) throw DataError("write to '" + path + "' failed");
}

}  // namespace gin
