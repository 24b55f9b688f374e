#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace dtvec {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool markers = false;
  int width = 800;
  int height = 500;
};

// Renders the series as a line chart and writes a PNG.
void write_line_plot(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
                     const PlotOptions& options);

}  // namespace dtvec
