#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace wavebench {

struct SvgSeries {
    std::string name;
    std::vector<double> y;
};

// Minimal vector-image writers for sigma curves and report bars.
void svg_line_plot(const std::filesystem::path& out, const std::string& title,
                   const std::vector<SvgSeries>& series, bool log_y = false);

void svg_bar_chart(const std::filesystem::path& out, const std::string& title,
                   const std::vector<std::string>& labels, const std::vector<double>& values,
                   const std::vector<double>& errors);

}  // namespace wavebench
