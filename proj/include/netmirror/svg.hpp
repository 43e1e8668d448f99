#pragma once

#include <string>
#include <vector>

namespace netmirror {

struct PlotSeries {
  std::vector<double> x, y;
  std::string label;
  std::string color = "#1f77b4";
  bool line = false;  // points otherwise
};

struct PlotOptions {
  std::string title;
  std::string x_label = "t";
  std::string y_label = "psi";
  int width = 640;
  int height = 400;
  std::vector<double> vertical_marks;  // e.g. estimated changepoints
};

std::string svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& opt = {});

}  // namespace netmirror
