#ifndef KTG_BASE_HPP
#define KTG_BASE_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ktg {

using Int = mpz_class;
using Rat = mpq_class;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

/// Canonicalized p/q (mpq_class's two-argument constructor does not reduce).
inline Rat frac(long p, long q) {
    Rat r(p, q);
    r.canonicalize();
    return r;
}

/// Parse an exact rational literal "p", "p/q" or "-p/q".
Rat parse_rat(const std::string& text);

/// Render canonically as "p" or "p/q" with positive q.
std::string format_rat(const Rat& r);

/// q-th root does not exist in general; rational powers are only taken of
/// unit-head series, never of bare rationals. Integer powers suffice here.
Rat pow_int(const Rat& base, long e);

// 64-bit FNV-1a, used for cache keys and canonical key prefixes.
std::uint64_t fnv1a(const std::string& bytes);

std::string hex64(std::uint64_t v);

} // namespace ktg

#endif
