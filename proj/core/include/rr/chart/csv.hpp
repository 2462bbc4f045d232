#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rr::chart {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Writes a header row and numeric rows; values use round-trip precision.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace rr::chart
