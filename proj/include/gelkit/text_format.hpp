#pragma once

#include <string>

namespace gelkit {

// Shortest decimal string that round-trips to the same double. Infinities
// come out as "inf"/"-inf", NaN as "nan".
std::string format_double(double x);

}  // namespace gelkit
