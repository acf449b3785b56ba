#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "comseq/common.hpp"

namespace comseq {

// Minimal comma-separated reader for the fixed-schema files this tool uses.
// No quoting: labels and attribute names must not contain commas, tabs or
// control characters (the network loader enforces that). Blank lines are
// skipped; the header row must match exactly.
class CsvReader {
public:
    struct Row {
        std::vector<std::string> fields;
        std::size_t line = 0;
    };

    CsvReader(std::istream& in, std::string path,
              const std::vector<std::string>& expected_header);

    std::optional<Row> next();

    // "path:line: message" - also used by loaders for semantic errors.
    [[noreturn]] void fail(std::size_t line, const std::string& message) const;

private:
    std::istream& in_;
    std::string path_;
    std::size_t columns_;
    std::size_t line_ = 0;
};

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace comseq
