#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace tmiter::csv {

/// Shortest round-trip decimal form, '.' separator, independent of locale.
std::string format_double(double v);

/// Minimal CSV row builder. Fields are written verbatim; none of the fields
/// this library emits contain separators or quotes.
class Row {
 public:
  Row& add(std::string_view s);
  Row& add(double v);
  Row& add(std::uint64_t v);
  Row& add(std::int64_t v);
  Row& add(int v) { return add(static_cast<std::int64_t>(v)); }
  Row& add_empty();
  template <typename T>
  Row& add(const std::optional<T>& v) {
    return v ? add(*v) : add_empty();
  }

  void write(std::ostream& os) const;

 private:
  std::vector<std::string> fields_;
};

void write_header(std::ostream& os, const std::vector<std::string>& columns);

}  // namespace tmiter::csv
