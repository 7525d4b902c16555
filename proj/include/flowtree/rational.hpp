#ifndef FLOWTREE_RATIONAL_HPP
#define FLOWTREE_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace flowtree {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

inline Rat rat_pow(const Rat& x, unsigned p) {
    Rat r = 1;
    for (unsigned i = 0; i < p; ++i) r *= x;
    return r;
}

inline double rat_to_double(const Rat& x) { return x.convert_to<double>(); }

/// Serialize as "num/den" (den omitted when 1). Decimal-free, round-trip exact.
inline std::string rat_to_string(const Rat& x) {
    std::string s = numerator(x).str();
    if (denominator(x) != 1) s += "/" + denominator(x).str();
    return s;
}

inline Rat rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rat(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed rational: '" + s + "'");
    }
}

} // namespace flowtree

#endif
