/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#ifndef CANVDW_GUARD_RATIONAL_HH
#define CANVDW_GUARD_RATIONAL_HH 1

#include <canvdw/errors.hh>

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace canvdw
{
    using Rational = boost::rational<std::int64_t>;

    /// count <= bound * total, exactly.
    inline auto at_most_fraction_of(std::int64_t count, const Rational & bound, std::int64_t total) -> bool
    {
        return count * bound.denominator() <= bound.numerator() * total;
    }

    /// count >= bound * total, exactly.
    inline auto at_least_fraction_of(std::int64_t count, const Rational & bound, std::int64_t total) -> bool
    {
        return count * bound.denominator() >= bound.numerator() * total;
    }

    /// floor(bound * total)
    inline auto floor_fraction_of(const Rational & bound, std::int64_t total) -> std::int64_t
    {
        auto num = bound.numerator() * total, den = bound.denominator();
        auto q = num / den;
        if (num % den != 0 && num < 0)
            --q;
        return q;
    }

    /// ceil(bound * total)
    inline auto ceil_fraction_of(const Rational & bound, std::int64_t total) -> std::int64_t
    {
        return -floor_fraction_of(-bound, total);
    }

    /// Parses "p/q", an integer, or a terminating decimal such as "0.25".
    inline auto parse_rational(std::string_view text) -> Rational
    {
        auto fail = [&] () -> Rational { throw InvalidParameter("malformed rational '" + std::string(text) + "'"); };
        if (text.empty())
            return fail();

        auto parse_int = [&] (std::string_view s) -> std::int64_t {
            if (s.empty())
                fail();
            std::int64_t value = 0;
            bool negative = false;
            std::size_t i = 0;
            if (s[0] == '-' || s[0] == '+') {
                negative = s[0] == '-';
                ++i;
                if (i == s.size())
                    fail();
            }
            for ( ; i < s.size() ; ++i) {
                if (s[i] < '0' || s[i] > '9')
                    fail();
                value = value * 10 + (s[i] - '0');
                if (value > (std::int64_t{1} << 53))
                    fail();
            }
            return negative ? -value : value;
        };

        if (auto slash = text.find('/') ; slash != std::string_view::npos) {
            auto den = parse_int(text.substr(slash + 1));
            if (den == 0)
                fail();
            return Rational{parse_int(text.substr(0, slash)), den};
        }

        if (auto dot = text.find('.') ; dot != std::string_view::npos) {
            auto whole = text.substr(0, dot), frac = text.substr(dot + 1);
            if (frac.size() > 15 || frac.find_first_of("+-") != std::string_view::npos)
                fail();
            std::int64_t scale = 1;
            for (std::size_t i = 0 ; i < frac.size() ; ++i)
                scale *= 10;
            bool negative = ! whole.empty() && whole[0] == '-';
            auto w = (whole.empty() || whole == "-" || whole == "+") ? 0 : parse_int(whole);
            auto f = frac.empty() ? 0 : parse_int(frac);
            auto magnitude = (w < 0 ? -w : w) * scale + f;
            return Rational{negative ? -magnitude : magnitude, scale};
        }

        return Rational{parse_int(text)};
    }

    inline auto to_string(const Rational & q) -> std::string
    {
        if (q.denominator() == 1)
            return std::to_string(q.numerator());
        return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
    }
}

#endif
