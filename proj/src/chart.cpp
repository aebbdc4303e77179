#include "jacobi/chart.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "jacobi/errors.hpp"

namespace jacobi {

bool is_valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

bool is_reserved_function(std::string_view s) {
  return s == "exp" || s == "ln" || s == "sin" || s == "cos";
}

Chart::Chart(std::vector<std::string> coordinates) : coords_(std::move(coordinates)) {
  if (coords_.empty()) throw Error("chart needs at least one coordinate");
  std::set<std::string> seen;
  for (const auto& c : coords_) {
    if (!is_valid_identifier(c)) throw Error("invalid coordinate name '" + c + "'");
    if (is_reserved_function(c)) throw Error("coordinate name '" + c + "' is a reserved function");
    if (!seen.insert(c).second) throw Error("duplicate coordinate name '" + c + "'");
  }
}

std::optional<std::size_t> Chart::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (coords_[i] == name) return i;
  }
  return std::nullopt;
}

ChartPtr make_chart(std::vector<std::string> coordinates) {
  return std::make_shared<const Chart>(std::move(coordinates));
}

Point::Point(ChartPtr chart, std::vector<double> values)
    : chart_(std::move(chart)), values_(std::move(values)) {
  if (!chart_) throw Error("point needs a chart");
  if (values_.size() != chart_->dimension()) {
    throw ChartMismatch("point has " + std::to_string(values_.size()) + " values on a chart of dimension " +
                        std::to_string(chart_->dimension()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error("point coordinates must be finite");
  }
}

}  // namespace jacobi
