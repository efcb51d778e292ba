#include "tmiter/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace tmiter::csv {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // also folds -0
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buf.data(), res.ptr);
}

Row& Row::add(std::string_view s) {
  fields_.emplace_back(s);
  return *this;
}

Row& Row::add(double v) {
  fields_.push_back(format_double(v));
  return *this;
}

Row& Row::add(std::uint64_t v) {
  fields_.push_back(std::to_string(v));
  return *this;
}

Row& Row::add(std::int64_t v) {
  fields_.push_back(std::to_string(v));
  return *this;
}

Row& Row::add_empty() {
  fields_.emplace_back();
  return *this;
}

void Row::write(std::ostream& os) const {
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (i != 0) os << ',';
    os << fields_[i];
  }
  os << '\n';
}

void write_header(std::ostream& os, const std::vector<std::string>& columns) {
  Row r;
  for (const auto& c : columns) r.add(c);
  r.write(os);
}

}  // namespace tmiter::csv
