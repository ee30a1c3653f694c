#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace probelab {

using BigInt = boost::multiprecision::cpp_int;
// expression templates off so that Rat behaves like a plain value type
using Rat = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<
        boost::multiprecision::backends::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

// Raised on malformed user input (maps to exit code 2 at the CLI).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a configured enumeration cap is exceeded (exit code 3).
struct CapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double to_double(const Rat &x);

// Accepts "num/den", plain integers ("-3"), and decimal strings ("0.25"),
// all parsed exactly.
Rat rat_parse(const std::string &s);

// Canonical "num/den" form ("num" alone when den == 1).
std::string rat_str(const Rat &x);

// 2^e for any integer sign of e.
Rat rat_pow2(long e);

// 4^-k.
Rat rat_pow4_neg(long k);

// The integer e with 2^e < x <= 2^{e+1}; x must be positive.
long floor_log2_strict(const Rat &x);

// The integer k >= 1 with 4^-k < x (largest negative power of 4 strictly
// below x); x must be positive.
long pow4_below(const Rat &x);

} // namespace probelab
