#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace tlx {

using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;
using Clock = std::function<Timestamp()>;

Timestamp utc_now();

/// RFC 3339 UTC with fixed microsecond precision: 2024-05-01T12:00:00.000000Z.
/// Fixed width, so string order equals time order.
std::string format_rfc3339(Timestamp t);

/// Accepts "YYYY-MM-DDTHH:MM:SS[.frac]Z"; throws std::invalid_argument otherwise.
Timestamp parse_rfc3339(std::string_view text);

}  // namespace tlx
