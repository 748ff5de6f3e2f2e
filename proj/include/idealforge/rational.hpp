#pragma once

#include "idealforge/error.hpp"

#include <gmpxx.h>

#include <compare>
#include <ostream>
#include <string>
#include <string_view>

namespace idealforge {

/// Exact rational number. Always kept in lowest terms with a positive
/// denominator; serializes as "p/q" (the denominator is always printed).
class Rational {
public:
    Rational() = default;

    Rational(long value) : value_(value) {}

    Rational(Nat numerator, Nat denominator)
    {
        if (denominator == 0)
            throw Error(ErrorCode::InvalidArgument, "zero denominator");
        value_ = mpq_class(mpz_from(numerator), mpz_from(denominator));
        value_.canonicalize();
    }

    /// 1/(n+1), the weight of n in the summable ideal.
    static Rational harmonic_weight(Nat n)
    {
        Rational r;
        mpz_class den = mpz_from(n);
        den += 1;
        r.value_ = mpq_class(mpz_class(1), den);
        return r;
    }

    static Rational parse(std::string_view text)
    {
        const auto slash = text.find('/');
        const std::string num(text.substr(0, slash));
        const std::string den = slash == std::string_view::npos ? "1" : std::string(text.substr(slash + 1));
        if (!valid_integer(num) || !valid_integer(den))
            throw ParseError(0, "malformed rational '" + std::string(text) + "'");
        Rational r;
        r.value_ = mpq_class(mpz_class(num, 10), mpz_class(den, 10));
        if (r.value_.get_den() == 0)
            throw ParseError(slash, "zero denominator");
        r.value_.canonicalize();
        return r;
    }

    std::string str() const { return value_.get_num().get_str() + "/" + value_.get_den().get_str(); }

    bool is_zero() const { return sgn(value_) == 0; }
    int sign() const { return sgn(value_); }
    double to_double() const { return value_.get_d(); }

    Rational & operator+=(const Rational & o)
    {
        value_ += o.value_;
        return *this;
    }
    Rational & operator-=(const Rational & o)
    {
        value_ -= o.value_;
        return *this;
    }
    Rational & operator*=(const Rational & o)
    {
        value_ *= o.value_;
        return *this;
    }
    Rational & operator/=(const Rational & o)
    {
        if (o.is_zero())
            throw Error(ErrorCode::InvalidArgument, "division by zero");
        value_ /= o.value_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational & b) { return a += b; }
    friend Rational operator-(Rational a, const Rational & b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational & b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational & b) { return a /= b; }

    friend bool operator==(const Rational & a, const Rational & b) { return cmp(a.value_, b.value_) == 0; }
    friend std::strong_ordering operator<=>(const Rational & a, const Rational & b)
    {
        const int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream & operator<<(std::ostream & os, const Rational & r) { return os << r.str(); }

private:
    static mpz_class mpz_from(Nat v)
    {
        static_assert(sizeof(unsigned long) == sizeof(Nat), "expects LP64");
        return mpz_class(static_cast<unsigned long>(v));
    }

    static bool valid_integer(const std::string & s)
    {
        if (s.empty())
            return false;
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size())
            return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9')
                return false;
        return true;
    }

    mpq_class value_;
};

} // namespace idealforge
