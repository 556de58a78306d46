#pragma once

#include <string>

namespace tlx {

// Half-up rounding to two decimals, applied to the shortest decimal string
// that round-trips the double. "58.33", "50.00", "-0.01".
std::string format_fixed2(double value);

// The double nearest to format_fixed2(value).
double round2(double value);

}  // namespace tlx
