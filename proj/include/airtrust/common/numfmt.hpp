#pragma once

#include <string>

namespace airtrust {

// Fixed-point rendering with at most `max_frac` fractional digits, trailing
// zeros stripped. Idempotent under parse+reformat, which is what keeps the
// canonical JSON documents byte-stable across round trips.
std::string format_fixed(double value, int max_frac = 6);

}  // namespace airtrust
