#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jacobi {

bool is_valid_identifier(std::string_view s);
bool is_reserved_function(std::string_view s);  // exp, ln, sin, cos

/// Ordered list of distinct coordinate names on a local chart.
class Chart {
 public:
  explicit Chart(std::vector<std::string> coordinates);

  std::size_t dimension() const { return coords_.size(); }
  const std::vector<std::string>& coordinates() const { return coords_; }
  const std::string& coordinate(std::size_t i) const { return coords_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  bool operator==(const Chart& o) const { return coords_ == o.coords_; }
  bool operator!=(const Chart& o) const { return !(*this == o); }

 private:
  std::vector<std::string> coords_;
};

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::vector<std::string> coordinates);

/// Coordinate values of a sample location; finite and sized to the chart.
class Point {
 public:
  Point(ChartPtr chart, std::vector<double> values);

  const ChartPtr& chart() const { return chart_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t dimension() const { return values_.size(); }

 private:
  ChartPtr chart_;
  std::vector<double> values_;
};

}  // namespace jacobi
