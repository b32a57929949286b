#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

#include <gmpxx.h>

#include "realjw/error.hpp"

namespace realjw::exactalg {

using Integer = mpz_class;
using Rational = mpq_class;

/// 2-adic valuation of a nonzero integer.
inline int valuation2(const Integer& n)
{
    if (n == 0)
        throw Error(ErrorCode::invalid_argument, "valuation of zero");
    return static_cast<int>(mpz_scan1(n.get_mpz_t(), 0));
}

inline int valuation2(const Rational& q)
{
    return valuation2(q.get_num()) - valuation2(q.get_den());
}

inline bool is_two_integral(const Rational& q)
{
    return mpz_odd_p(q.get_den().get_mpz_t()) != 0;
}

/// Element of Z localized at 2: reduced fraction with positive odd denominator.
class TwoLocal {
public:
    TwoLocal() = default;
    TwoLocal(long v) : q_(v) {}
    TwoLocal(int v) : q_(v) {}

    /// Reduces num/den; throws EvenDenominator when the value is not 2-local.
    static TwoLocal normalize(const Integer& num, const Integer& den)
    {
        if (den == 0)
            throw Error(ErrorCode::invalid_argument, "zero denominator");
        Rational q(num, den);
        q.canonicalize();
        return from_rational(q);
    }

    static TwoLocal from_rational(const Rational& q)
    {
        if (!is_two_integral(q))
            throw Error(ErrorCode::even_denominator, q.get_str() + " is not 2-local");
        TwoLocal t;
        t.q_ = q;
        return t;
    }

    const Integer& numerator() const { return q_.get_num(); }
    const Integer& denominator() const { return q_.get_den(); }
    const Rational& value() const { return q_; }

    bool is_zero() const { return q_ == 0; }
    bool is_one() const { return q_ == 1; }
    bool is_unit() const { return !is_zero() && mpz_odd_p(q_.get_num_mpz_t()) != 0; }

    /// Residue mod 2 (0 or 1). The denominator is odd, so only the numerator matters.
    int parity() const { return mpz_odd_p(q_.get_num_mpz_t()) ? 1 : 0; }

    int valuation() const { return valuation2(q_); }

    /// (this - parity()) / 2, exact in Z_(2).
    TwoLocal half_of_even_part() const
    {
        TwoLocal r;
        r.q_ = q_ - parity();
        mpz_mul_2exp(r.q_.get_den_mpz_t(), r.q_.get_den_mpz_t(), 1);
        r.q_.canonicalize();
        return r;
    }

    TwoLocal& operator+=(const TwoLocal& o) { q_ += o.q_; return *this; }
    TwoLocal& operator-=(const TwoLocal& o) { q_ -= o.q_; return *this; }
    TwoLocal& operator*=(const TwoLocal& o) { q_ *= o.q_; return *this; }

    /// Division is only defined by units of Z_(2).
    TwoLocal& operator/=(const TwoLocal& o)
    {
        if (!o.is_unit())
            throw Error(ErrorCode::division_by_even, "divisor " + o.str() + " is not a unit");
        q_ /= o.q_;
        return *this;
    }

    friend TwoLocal operator+(TwoLocal a, const TwoLocal& b) { return a += b; }
    friend TwoLocal operator-(TwoLocal a, const TwoLocal& b) { return a -= b; }
    friend TwoLocal operator*(TwoLocal a, const TwoLocal& b) { return a *= b; }
    friend TwoLocal operator/(TwoLocal a, const TwoLocal& b) { return a /= b; }
    TwoLocal operator-() const { TwoLocal r; r.q_ = -q_; return r; }

    friend bool operator==(const TwoLocal& a, const TwoLocal& b) { return a.q_ == b.q_; }
    friend bool operator!=(const TwoLocal& a, const TwoLocal& b) { return !(a == b); }

    std::string str() const { return q_.get_str(); }
    friend std::ostream& operator<<(std::ostream& os, const TwoLocal& t) { return os << t.str(); }

private:
    Rational q_{0};
};

// Coefficient traits used by the generic series code.
template <typename C>
struct CoeffTraits;

template <>
struct CoeffTraits<Rational> {
    static bool is_zero(const Rational& c) { return c == 0; }
    static Rational one() { return Rational(1); }
    static Rational from_int(long v) { return Rational(v); }
    static std::string str(const Rational& c) { return c.get_str(); }
    static const Integer& num(const Rational& c) { return c.get_num(); }
    static const Integer& den(const Rational& c) { return c.get_den(); }
};

template <>
struct CoeffTraits<TwoLocal> {
    static bool is_zero(const TwoLocal& c) { return c.is_zero(); }
    static TwoLocal one() { return TwoLocal(1); }
    static TwoLocal from_int(long v) { return TwoLocal(v); }
    static std::string str(const TwoLocal& c) { return c.str(); }
    static const Integer& num(const TwoLocal& c) { return c.numerator(); }
    static const Integer& den(const TwoLocal& c) { return c.denominator(); }
};

} // namespace realjw::exactalg
