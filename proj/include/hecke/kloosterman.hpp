#pragma once
/// @file kloosterman.hpp
/// Kloosterman and Ramanujan sums by direct summation.

#include <cstdint>
#include <vector>

namespace hecke {

struct KloostermanValue {
    std::int64_t m = 0, n = 0;
    std::uint64_t c = 1;
    double value = 0;
    double imaginary_residual = 0;
};

KloostermanValue kloosterman_sum(std::int64_t m, std::int64_t n, std::uint64_t c);
std::int64_t ramanujan_sum(std::int64_t n, std::uint64_t c);
double weil_bound(std::int64_t m, std::int64_t n, std::uint64_t c);

/// Units modulo c with their inverses and a table of c-th roots of unity.
/// Built once per modulus and reused for many (m, n) pairs.
class UnitTable {
public:
    /// c < 2^31.
    explicit UnitTable(std::uint32_t c);
    std::uint32_t modulus() const { return c_; }
    /// Real part of S(m, n; c); the imaginary part goes to *imag when given.
    double sum(std::int64_t m, std::int64_t n, double* imag = nullptr) const;

private:
    std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) const;

    std::uint32_t c_;
    double inv_c_ = 1;
    std::vector<std::uint32_t> x_, xinv_;
    std::vector<double> cos_, sin_;
};

}  // namespace hecke
