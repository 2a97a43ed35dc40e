#pragma once

#include <string>
#include <vector>

namespace concrisk {

// Comma-separated table with '#' comment lines and blank lines skipped.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string path;

    int column(const std::string& name) const;        // -1 when absent
    int require_column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

// All non-comment rows with no header interpretation or width enforcement.
std::vector<std::vector<std::string>> read_csv_rows(const std::string& path);

double parse_double(const std::string& s, const std::string& context);
long parse_long(const std::string& s, const std::string& context);

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double x);

// Writes via a temp file in the same directory plus rename, so readers never
// observe a half-written file.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace concrisk
