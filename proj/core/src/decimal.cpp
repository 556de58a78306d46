#include "tlx/decimal.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace tlx {

std::string format_fixed2(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("cannot format non-finite value");

  char buf[400];
  const auto res = std::to_chars(buf, buf + sizeof buf, std::fabs(value), std::chars_format::fixed);
  if (res.ec != std::errc{}) throw std::invalid_argument("cannot format value");
  std::string text(buf, res.ptr);

  auto dot = text.find('.');
  if (dot == std::string::npos) {
    text += '.';
    dot = text.size() - 1;
  }
  const bool round_up = text.size() > dot + 3 && text[dot + 3] >= '5';
  text.resize(dot + 3, '0');

  if (round_up) {
    std::size_t i = text.size();
    bool carry = true;
    while (carry && i-- > 0) {
      if (text[i] == '.') continue;
      if (text[i] == '9') {
        text[i] = '0';
      } else {
        ++text[i];
        carry = false;
      }
    }
    if (carry) text.insert(text.begin(), '1');
  }

  if (std::signbit(value) && text.find_first_not_of("0.") != std::string::npos) {
    text.insert(text.begin(), '-');
  }
  return text;
}

double round2(double value) {
  const std::string text = format_fixed2(value);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

}  // namespace tlx
