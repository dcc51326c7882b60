#pragma once
/// @file class_numbers.hpp
/// Class numbers of imaginary quadratic discriminants, Hurwitz class numbers,
/// sums of three squares and the congruence-restricted four-square counts.

#include <cstdint>
#include <optional>
#include <vector>

#include "hecke/arithmetic.hpp"

namespace hecke {

struct ClassNumberRecord {
    std::int64_t discriminant = 0;
    std::uint64_t h = 0;
    int w = 1;
    Rational h_w;
};

/// Reduced primitive forms of discriminant D < 0, D = 0,1 mod 4, |D| <= 1e7.
ClassNumberRecord class_number(std::int64_t D);
/// Fundamental discriminant D0 and conductor f with D = D0 f^2.
std::pair<std::int64_t, std::uint64_t> fundamental_part(std::int64_t D);

/// H(n) for n = 0,3 mod 4; sum over square divisors and Cohen's formula
/// must agree, otherwise InconsistencyError.
Rational hurwitz_H(std::uint64_t n);
Rational hurwitz_H_by_divisors(std::uint64_t n);
Rational hurwitz_H_by_cohen(std::uint64_t n);

std::uint64_t r3(std::uint64_t n);
std::uint64_t r3_from_hurwitz(std::uint64_t n);

std::uint64_t count_A(std::uint64_t N, std::uint64_t n, std::int64_t n0);
std::optional<std::int64_t> admissible_n0(std::uint64_t N, std::uint64_t n);

/// All H(m), m <= limit, from one sweep over reduced forms (imprimitive forms
/// included). Values stored as 6 H(m), which is an integer.
class HurwitzTable {
public:
    explicit HurwitzTable(std::uint64_t limit);
    std::uint64_t limit() const { return limit_; }
    /// 6 H(m); zero when m = 1,2 mod 4.
    std::int64_t six_H(std::uint64_t m) const { return sixH_.at(m); }
    /// 6 h_w(-m) for the discriminant -m (zero when -m is not a discriminant).
    std::int64_t six_hw(std::uint64_t m) const;
    Rational h_w(std::uint64_t m) const { return Rational(six_hw(m), 6); }

private:
    std::uint64_t limit_;
    std::vector<std::int64_t> sixH_;
};

/// Shared table covering at least [0, limit]; grows on demand.
const HurwitzTable& hurwitz_table(std::uint64_t limit);

/// r3(m) for all m <= limit by convolution.
std::vector<std::uint64_t> r3_table(std::uint64_t limit);

}  // namespace hecke
