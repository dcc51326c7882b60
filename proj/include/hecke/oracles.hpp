#pragma once
/// @file oracles.hpp
/// Independent reference data: level-one eigenform q-expansions, dimension
/// and genus formulas.

#include <cstdint>
#include <vector>

#include "hecke/arithmetic.hpp"

namespace hecke {

struct QExpansion {
    int weight = 0;
    std::vector<BigInt> coefficients;  // coefficients[i] = a(i+1)
    bool normalized = true;

    const BigInt& a(std::size_t n) const { return coefficients.at(n - 1); }
    /// a(n) / n^{(k-1)/2}
    double normalized_eigenvalue(std::size_t n) const;
};

/// q prod (1-q^m)^24 up to q^n_max.
QExpansion delta_tau(std::size_t n_max);
/// E4^a E6^b Delta for k in {12,16,18,20,22,26}.
QExpansion level_one_eigenform(int k, std::size_t n_max);

std::uint64_t dim_level_one(int k);
std::uint64_t genus_X0(std::uint64_t N);

}  // namespace hecke
