#pragma once
/// @file arithmetic.hpp
/// Elementary multiplicative functions, factorization and congruence counts.

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace hecke {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// Raised when two independent routes to the same quantity disagree.
struct InconsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FactoredInt {
    std::uint64_t value = 1;
    std::vector<std::pair<std::uint64_t, int>> factors;  // sorted by prime

    std::vector<std::uint64_t> divisors() const;  // ascending
    bool squarefree() const;
    std::vector<std::uint64_t> primes() const;
};

FactoredInt factor(std::uint64_t n);

int mobius(const FactoredInt& n);
std::uint64_t euler_phi(const FactoredInt& n);
/// Sum of t-th powers of divisors, exact.
BigInt sigma(unsigned t, const FactoredInt& n);
std::uint64_t sigma0(const FactoredInt& n);
std::uint64_t sigma1(const FactoredInt& n);
std::uint64_t nu_index(const FactoredInt& N);

int mobius(std::uint64_t n);
std::uint64_t euler_phi(std::uint64_t n);

std::int64_t mod_inverse(std::int64_t x, std::int64_t c);
int kronecker_chi(std::int64_t D, std::uint64_t m);
std::uint64_t count_congruence_roots(std::int64_t t, std::int64_t n, std::uint64_t K);

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);
std::uint64_t isqrt(std::uint64_t n);
bool is_square(std::uint64_t n);

}  // namespace hecke
