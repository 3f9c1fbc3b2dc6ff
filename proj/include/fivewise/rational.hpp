#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace fivewise {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational ratio(long long num, long long den) { return Rational(num, den); }

inline Rational rpow(Rational const& base, unsigned exponent)
{
    Rational result = 1;
    for (unsigned i = 0; i < exponent; ++i)
        result *= base;
    return result;
}

inline std::string numerator_string(Rational const& r) { return numerator(r).str(); }
inline std::string denominator_string(Rational const& r) { return denominator(r).str(); }
inline std::string fraction_string(Rational const& r)
{
    return denominator(r) == 1 ? numerator(r).str() : numerator(r).str() + "/" + denominator(r).str();
}
inline double to_double(Rational const& r) { return r.convert_to<double>(); }

} // namespace fivewise
