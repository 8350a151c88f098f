#include "airtrust/common/numfmt.hpp"

#include <cmath>
#include <cstdio>

namespace airtrust {

std::string format_fixed(double value, int max_frac) {
    if (!std::isfinite(value)) return "0";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", max_frac, value);
    std::string s(buf);
    if (s.find('.') != std::string::npos) {
        size_t last = s.find_last_not_of('0');
        if (s[last] == '.') last--;
        s.erase(last + 1);
    }
    if (s == "-0") s = "0";
    return s;
}

}  // namespace airtrust
