#include "comseq/csv.hpp"

#include <sstream>

namespace comseq {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

namespace {

// Tolerate CRLF input; everything else is kept verbatim.
void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

CsvReader::CsvReader(std::istream& in, std::string path,
                     const std::vector<std::string>& expected_header)
    : in_(in), path_(std::move(path)), columns_(expected_header.size()) {
    std::string header;
    if (!std::getline(in_, header)) fail(1, "empty file, expected a header row");
    strip_cr(header);
    line_ = 1;
    auto fields = split_csv_line(header);
    std::string expected;
    for (std::size_t i = 0; i < expected_header.size(); ++i) {
        if (i) expected += ',';
        expected += expected_header[i];
    }
    if (fields != expected_header)
        fail(1, "bad header '" + header + "', expected '" + expected + "'");
}

std::optional<CsvReader::Row> CsvReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        strip_cr(line);
        if (line.empty()) continue;
        Row row;
        row.fields = split_csv_line(line);
        row.line = line_;
        if (row.fields.size() != columns_)
            fail(line_, "expected " + std::to_string(columns_) + " fields, got " +
                            std::to_string(row.fields.size()));
        return row;
    }
    return std::nullopt;
}

void CsvReader::fail(std::size_t line, const std::string& message) const {
    throw DataError(path_ + ":" + std::to_string(line) + ": " + message);
}

}  // namespace comseq
