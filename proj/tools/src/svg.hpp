#pragma once

#include <string>
#include <vector>

namespace fogserve::tools {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Vertical bars with value labels, one per category.
std::string bar_chart(const std::string& title, const std::string& y_label, const std::vector<std::string>& categories,
                      const std::vector<double>& values);

/// Polylines sharing one pair of axes.
std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series);

}  // namespace fogserve::tools
