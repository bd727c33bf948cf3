#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace maropt::csv {

// One parsed CSV file: a header row plus data rows, all fields trimmed.
// The dialect is deliberately small: comma separator, no quoting, UTF-8.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index for an exact header name, -1 when absent.
    int column(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

std::string trim(const std::string& s);
std::vector<std::string> split_line(const std::string& line);

// Reads the whole file; throws Errc::file_not_found / missing_column (empty file).
Table read_file(const std::filesystem::path& path);

} // namespace maropt::csv
