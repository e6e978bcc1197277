#include "dobkit/csv.hpp"

#include <charconv>
#include <cmath>

namespace dobkit {

std::string CsvWriter::format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void CsvWriter::header(const std::vector<std::string>& names) {
    for (size_t i = 0; i < names.size(); ++i) {
        if (i) os_ << ',';
        os_ << names[i];
    }
    os_ << '\n';
}

void CsvWriter::field(double v) {
    if (row_started_) os_ << ',';
    os_ << format_double(v);
    row_started_ = true;
}

void CsvWriter::field(long v) {
    if (row_started_) os_ << ',';
    os_ << v;
    row_started_ = true;
}

void CsvWriter::field(const std::string& s) {
    if (row_started_) os_ << ',';
    os_ << s;
    row_started_ = true;
}

void CsvWriter::end_row() {
    os_ << '\n';
    row_started_ = false;
}

}  // namespace dobkit
