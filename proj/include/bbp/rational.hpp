#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace bbp {

// Exact rational arithmetic backs every closed-form and oracle path.
// Floating point appears only in Monte Carlo summaries.
using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat(std::int64_t num, std::int64_t den = 1) {
  return Rat(BigInt(num), BigInt(den));
}

// [x]^+ = max(0, x)
inline Rat pos_part(const Rat& x) { return x > 0 ? x : Rat(0); }

// 2^e for e >= 0
inline Rat pow2_rat(std::int64_t e) {
  return Rat(BigInt(1) << static_cast<unsigned>(e));
}

inline double rat_to_double(const Rat& x) { return x.convert_to<double>(); }

inline bool rat_is_integer(const Rat& x) {
  return boost::multiprecision::denominator(x) == 1;
}

// "p" when the value is an integer, "p/q" otherwise
inline std::string rat_to_string(const Rat& x) {
  const BigInt num = boost::multiprecision::numerator(x);
  const BigInt den = boost::multiprecision::denominator(x);
  std::string s = num.str();
  if (den != 1) {
    s += '/';
    s += den.str();
  }
  return s;
}

}  // namespace bbp
