#pragma once
/// @file eichler_selberg.hpp
/// Traces of Hecke operators on S_k(N) and on the newform subspace S_k(N)*,
/// normalized by n^{(k-1)/2}, plus the quantities built from them: the
/// coefficients D_N(t,n), weight-window averages and phi-weighted variances.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hecke/arithmetic.hpp"

namespace hecke {

enum class TraceKind { full, new_forms };
std::string to_string(TraceKind k);

/// Normalized terms (divided by n^{(k-1)/2}) as doubles. The rational terms
/// are also kept exactly, scaled back up by n^{(k-1)/2} so they stay rational
/// when n is not a square: exact_i = term_i * n^{(k-1)/2}.
struct TraceBreakdown {
    std::uint64_t n = 1;
    int k = 2;
    std::uint64_t N = 1;
    TraceKind kind = TraceKind::full;
    double term1 = 0, term2 = 0, term3 = 0, term4 = 0, total = 0;
    bool has_exact = false;
    Rational term1_exact, term3_exact, term4_exact;
};

struct AngleData {
    std::int64_t t = 0;
    std::uint64_t n = 1;
    double theta = 0;  // sqrt(n) e^{i theta} = (t + i sqrt(4n - t^2)) / 2
};
AngleData angle_data(std::int64_t t, std::uint64_t n);

/// mu(t,f,n,N) = nu(N)/nu(N/N_f) * #{x mod N : x^2 - t x + n = 0 mod N N_f}.
std::int64_t mu_level(std::int64_t t, std::uint64_t f, std::uint64_t n, std::uint64_t N);
/// sum_{d|N} sigma0(N/d) mu(N/d) mu(t,f,n,d), N squarefree.
std::int64_t mu_tilde(std::int64_t t, std::uint64_t f, std::uint64_t n, std::uint64_t N);

/// Per-(n, N) data shared across all weights: angles and the class-number
/// sums 6 * sum_f h_w((t^2-4n)/f^2) * mu for every t with t^2 < 4n.
class TraceEngine {
public:
    TraceEngine(std::uint64_t n, std::uint64_t N, TraceKind kind);

    std::uint64_t n() const { return n_; }
    std::uint64_t N() const { return N_; }
    TraceKind kind() const { return kind_; }
    const std::vector<std::int64_t>& ts() const { return t_; }
    const std::vector<double>& thetas() const { return theta_; }
    /// 6 * sum_f h_w(...) * mu (or mu-tilde) at index i of ts().
    const std::vector<std::int64_t>& six_class_sums() const { return six_sum_; }
    /// |D_N(t,n)| for index i (only meaningful for TraceKind::new_forms).
    double d_value(std::size_t i) const;

    /// Evaluate the four terms at weight k. exact = false skips the rational
    /// terms (used for long weight sweeps where only doubles are needed).
    TraceBreakdown evaluate(int k, bool exact = true) const;
    /// The oscillating term alone.
    double term2(int k) const;

private:
    std::uint64_t n_, N_;
    TraceKind kind_;
    std::vector<std::int64_t> t_;
    std::vector<double> theta_, inv_root_;  // inv_root = 1/sqrt(4n - t^2)
    std::vector<std::int64_t> six_sum_;
    // divisor data for the third term: (d, coefficient) with d <= sqrt(n)
    std::vector<std::pair<std::uint64_t, Rational>> third_;
};

/// Shared engine for (n, N, kind); built once and kept for the process.
std::shared_ptr<const TraceEngine> trace_engine(std::uint64_t n, std::uint64_t N, TraceKind kind);

TraceBreakdown trace_full(std::uint64_t n, int k, std::uint64_t N);
/// Direct newform terms, checked against sum_{d|N} sigma0(N/d) mu(N/d)
/// trace_full(n,k,d); raises InconsistencyError on disagreement.
TraceBreakdown trace_new(std::uint64_t n, int k, std::uint64_t N);

/// (1 / (2 sqrt(4n - t^2))) * sum_f h_w((t^2-4n)/f^2) * mu_tilde(t,f,n,N).
double d_coefficient(std::int64_t t, std::uint64_t n, std::uint64_t N);

struct WindowSpec {
    double K = 0;
    double delta = 0.25;
    double T = 0;       // variance scale, unused by the window average
    double radius = 1;  // psi support in units of K^delta
};

/// (1/K^delta) sum_{k even} psi((k-K)/K^delta) (-1)^{k/2} Tr T_n*(k,N).
double averaged_trace_window(std::uint64_t n, std::uint64_t N, const WindowSpec& spec);
/// (mu(N) K / 2 pi) (sigma1(n)/n) J_K(4 pi sqrt n). K must be an integer.
double noweight_main_term(std::uint64_t n, std::uint64_t N, double K);

struct VarianceResult {
    double value = 0;
    double truncation_bound = 0;
    std::uint64_t k_max = 0;
};
VarianceResult variance_window(std::uint64_t n, std::uint64_t N, double T);
VarianceResult diagonal_side(std::uint64_t n, std::uint64_t N, double T);

struct CharacterSum {
    double value = 0;
    double imaginary_residual = 0;
    double truncation_bound = 0;
};
/// sum_{k in 2Z} phi((k-1)/T) e^{i(k-1) theta}.
CharacterSum poisson_character_sum(double T, double theta);

}  // namespace hecke
