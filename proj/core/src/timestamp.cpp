#include "tlx/timestamp.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace tlx {

Timestamp utc_now() {
  return std::chrono::time_point_cast<std::chrono::microseconds>(std::chrono::system_clock::now());
}

std::string format_rfc3339(Timestamp t) {
  using namespace std::chrono;
  const auto secs = floor<seconds>(t);
  const auto micros = (t - secs).count();
  const std::time_t tt = system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%06lldZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<long long>(micros));
  return buf;
}

namespace {

int field(std::string_view text, std::size_t pos, std::size_t len) {
  int v = 0;
  const auto* first = text.data() + pos;
  const auto [ptr, ec] = std::from_chars(first, first + len, v);
  if (ec != std::errc{} || ptr != first + len) {
    throw std::invalid_argument("malformed timestamp: " + std::string(text));
  }
  return v;
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
  if (text.size() < 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
      text[16] != ':' || text.back() != 'Z') {
    throw std::invalid_argument("malformed timestamp: " + std::string(text));
  }
  std::tm tm{};
  tm.tm_year = field(text, 0, 4) - 1900;
  tm.tm_mon = field(text, 5, 2) - 1;
  tm.tm_mday = field(text, 8, 2);
  tm.tm_hour = field(text, 11, 2);
  tm.tm_min = field(text, 14, 2);
  tm.tm_sec = field(text, 17, 2);
  long long micros = 0;
  if (text.size() > 20) {
    if (text[19] != '.') throw std::invalid_argument("malformed timestamp: " + std::string(text));
    const std::string_view frac = text.substr(20, text.size() - 21);
    if (frac.empty() || frac.size() > 6) {
      throw std::invalid_argument("malformed timestamp: " + std::string(text));
    }
    micros = field(text, 20, frac.size());
    for (std::size_t i = frac.size(); i < 6; ++i) micros *= 10;
  } else if (text.size() != 20) {
    throw std::invalid_argument("malformed timestamp: " + std::string(text));
  }
  const std::time_t secs = timegm(&tm);
  return Timestamp(std::chrono::seconds(secs)) + std::chrono::microseconds(micros);
}

}  // namespace tlx
