#include "ktg/base.hpp"

#include <sstream>

namespace ktg {

Rat parse_rat(const std::string& text) {
    std::string t = text;
    require(!t.empty(), "empty rational literal");
    Rat r;
    if (r.set_str(t, 10) != 0) fail("bad rational literal: " + text);
    r.canonicalize();
    return r;
}

std::string format_rat(const Rat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

Rat pow_int(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    Rat b = e > 0 ? base : Rat(1) / base;
    long n = e > 0 ? e : -e;
    Rat acc(1);
    for (long i = 0; i < n; ++i) acc *= b;
    return acc;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

} // namespace ktg
