#include "rational.hpp"

namespace probelab {

double to_double(const Rat &x) { return x.convert_to<double>(); }

// decimal-only integer parse; BigInt's own string constructor would read a
// leading zero as an octal prefix
static BigInt big_from_decimal(const std::string &s)
{
    size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-'))
        neg = s[i++] == '-';
    if (i == s.size())
        throw InputError("malformed integer literal '" + s + "'");
    BigInt x = 0;
    for (; i < s.size(); ++i)
    {
        if (s[i] < '0' || s[i] > '9')
            throw InputError("malformed integer literal '" + s + "'");
        x = x * 10 + (s[i] - '0');
    }
    return neg ? -x : x;
}

Rat rat_parse(const std::string &s)
{
    if (s.empty())
        throw InputError("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos)
    {
        BigInt num = big_from_decimal(s.substr(0, slash));
        BigInt den = big_from_decimal(s.substr(slash + 1));
        if (den == 0)
            throw InputError("zero denominator in '" + s + "'");
        return Rat(num, den);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos)
    {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        size_t frac = s.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+")
            throw InputError("malformed decimal '" + s + "'");
        BigInt num = big_from_decimal(digits);
        BigInt den = 1;
        for (size_t i = 0; i < frac; ++i)
            den *= 10;
        return Rat(num, den);
    }
    return Rat(big_from_decimal(s));
}

std::string rat_str(const Rat &x)
{
    std::string n = numerator(x).str();
    if (denominator(x) == 1)
        return n;
    return n + "/" + denominator(x).str();
}

Rat rat_pow2(long e)
{
    BigInt p = BigInt(1) << (e < 0 ? -e : e);
    return e < 0 ? Rat(1, p) : Rat(p);
}

Rat rat_pow4_neg(long k) { return rat_pow2(-2 * k); }

long floor_log2_strict(const Rat &x)
{
    if (x <= 0)
        throw InputError("floor_log2_strict requires a positive value");
    long e = static_cast<long>(msb(numerator(x))) -
             static_cast<long>(msb(denominator(x)));
    // msb gives |log2| within 1; fix up so that 2^e < x <= 2^{e+1}.
    while (rat_pow2(e) >= x)
        --e;
    while (rat_pow2(e + 1) < x)
        ++e;
    return e;
}

long pow4_below(const Rat &x)
{
    if (x <= 0)
        throw InputError("pow4_below requires a positive value");
    long k = 1;
    while (rat_pow4_neg(k) >= x)
        ++k;
    return k;
}

} // namespace probelab
