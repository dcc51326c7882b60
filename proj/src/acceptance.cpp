#include "hecke/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <unistd.h>

#include "hecke/arithmetic.hpp"
#include "hecke/class_numbers.hpp"
#include "hecke/eichler_selberg.hpp"
#include "hecke/harness.hpp"
#include "hecke/kloosterman.hpp"
#include "hecke/oracles.hpp"
#include "hecke/petersson.hpp"
#include "hecke/special_functions.hpp"
#include "hecke/spectral.hpp"

namespace hecke {

namespace {

constexpr double kPi = std::numbers::pi;

// ---- pinned tolerances and limits
constexpr double kTauTol = 1e-9;
constexpr double kTauSeconds = 120;
constexpr double kRankOneTol = 1e-6;
constexpr double kVanishSlack = 1e-8;
constexpr double kMaintSlopeMax = 0.1;
constexpr double kMaintRatioMax = 0.2;
constexpr double kMaintSeconds = 600;
constexpr double kAvkSta3Lo = 0.45, kAvkSta3Hi = 0.55;
constexpr double kAvkSta1Tol = 1e-10;
constexpr double kAvkSta2Const = 10;
constexpr double kNoweightLo = 0.5, kNoweightHi = 1.5;
constexpr double kNoweightSeconds = 900;
constexpr double kVarianceConstMax = 10;
constexpr double kIdphiTol = 1e-9;
constexpr double kWeilSlack = 1e-9;
constexpr double kKloostermanImagTol = 1e-9;
constexpr double kNuMomentFactor = 0.4;
constexpr double kDiscrepancyTrendFactor = 5;
constexpr double kTraceBoundTol = 1e-9;
constexpr double kOrbitalTol = 1e-6;
constexpr double kOrbitalSlopeLo = 0.05, kOrbitalSlopeHi = 0.30;
constexpr std::uint64_t kRandomSeed = 20240601;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v, int prec = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// 1. traces at level one against q-expansions
CriterionResult tau_oracle() {
    CriterionResult r;
    r.id = 1;
    r.name = "tau-oracle-equivalence";
    const auto t0 = Clock::now();
    double worst = 0;
    const auto tau = delta_tau(2000);
    for (std::uint64_t n = 1; n <= 2000; ++n)
        worst = std::max(worst, std::abs(trace_new(n, 12, 1).total - tau.normalized_eigenvalue(n)));
    double worst_other = 0;
    for (int k : {16, 18, 20, 22, 26}) {
        const auto f = level_one_eigenform(k, 500);
        for (std::uint64_t n = 1; n <= 500; ++n)
            worst_other = std::max(worst_other, std::abs(trace_new(n, k, 1).total - f.normalized_eigenvalue(n)));
    }
    r.seconds = since(t0);
    r.metrics = {{"max_error_k12", worst}, {"max_error_other", worst_other}};
    r.pass = worst <= kTauTol && worst_other <= kTauTol && r.seconds <= kTauSeconds;
    r.detail = "max|err| k=12: " + num(worst) + ", k in {16..26}: " + num(worst_other) + ", " + num(r.seconds) + " s";
    return r;
}

// 2. rank-one Gram structure at weight 12 and vanishing on empty spaces
CriterionResult petersson_rank_one() {
    CriterionResult r;
    r.id = 2;
    r.name = "petersson-rank-one";
    const auto t0 = Clock::now();
    const auto tau = delta_tau(50);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    for (std::uint64_t n = 1; n <= 50; ++n) pairs.emplace_back(1, n);
    const auto d12 = delta_full_batch(12, 1, pairs);
    double worst = 0;
    for (std::uint64_t n = 1; n <= 50; ++n)
        worst = std::max(worst, std::abs(d12[n - 1].value / d12[0].value - tau.normalized_eigenvalue(n)));
    bool vanish = true;
    double max_excess = -1, k4_bound = 0;
    pairs.resize(20);
    for (int k : {4, 6, 8, 10, 14}) {
        for (const auto& p : delta_full_batch(k, 1, pairs)) {
            const double excess = std::abs(p.value) - p.truncation_bound - kVanishSlack;
            max_excess = std::max(max_excess, excess);
            if (excess > 0) vanish = false;
            if (k == 4) k4_bound = std::max(k4_bound, p.truncation_bound);
        }
    }
    r.seconds = since(t0);
    r.metrics = {{"max_ratio_error", worst}, {"max_vanishing_excess", max_excess}, {"k4_max_truncation_bound", k4_bound}};
    r.pass = worst <= kRankOneTol && vanish;
    r.detail = "ratio err " + num(worst) + "; empty spaces within bound (largest bound, k=4: " + num(k4_bound) + ")";
    if (!vanish) r.detail += "; vanishing violated";
    return r;
}

// 3. transition-range main terms for newforms
CriterionResult maint_sweep() {
    CriterionResult r;
    r.id = 3;
    r.name = "maint-transition-sweep";
    const auto t0 = Clock::now();
    std::vector<double> lk, lsup;
    double diag_ratio = 0, off_ratio = 0;
    for (int k : {500, 1000, 2000, 4000}) {
        const double K = k, lo = K - 2 * std::cbrt(K), hi = K + 2 * std::cbrt(K);
        double sup = 0;
        for (std::uint64_t N : {1, 2, 3, 5, 6}) {
            // diagonal cell: m = n with 4 pi n in the window, closest to the centre
            std::optional<std::uint64_t> dn;
            for (auto n = static_cast<std::uint64_t>(lo / (4 * kPi)); 4 * kPi * n < hi; ++n)
                if (4 * kPi * n > lo && gcd_u64(n, N) == 1 &&
                    (!dn || std::abs(4 * kPi * n - K) < std::abs(4 * kPi * *dn - K)))
                    dn = n;
            // off-diagonal cell: (1, n) with 4 pi sqrt(n) in the window
            std::optional<std::uint64_t> on;
            const auto c = static_cast<std::uint64_t>(std::llround(K * K / (16 * kPi * kPi)));
            for (std::uint64_t d = 0; d < 1000 && !on; ++d)
                for (auto n : {c + d, c - d})
                    if (!on && gcd_u64(n, N) == 1 && std::abs(4 * kPi * std::sqrt(static_cast<double>(n)) - K) < hi - K)
                        on = n;
            for (int which = 0; which < 2; ++which) {
                const bool diag = which == 0;
                if (diag ? !dn : !on) continue;
                const std::uint64_t m = diag ? *dn : 1, n = diag ? *dn : *on;
                const auto res = maint_residual(k, N, m, n);
                sup = std::max(sup, std::abs(res.residual) * std::sqrt(K));
                const double ratio = std::abs(res.residual) / std::abs(res.main_terms);
                if (k >= 1000) (diag ? diag_ratio : off_ratio) = std::max(diag ? diag_ratio : off_ratio, ratio);
            }
        }
        lk.push_back(std::log(K));
        lsup.push_back(std::log(sup));
        r.metrics["sup_residual_sqrt_k_" + std::to_string(k)] = sup;
    }
    r.seconds = since(t0);
    const double slope = ls_slope(lk, lsup);
    r.metrics["slope"] = slope;
    r.metrics["max_ratio_diagonal"] = diag_ratio;
    r.metrics["max_ratio_offdiagonal"] = off_ratio;
    r.pass = slope <= kMaintSlopeMax && diag_ratio <= kMaintRatioMax && r.seconds <= kMaintSeconds;
    r.detail = "slope " + num(slope) + ", |res|/|S1| (m=n, k>=1000) " + num(diag_ratio) +
               " (off-diagonal, reported only: " + num(off_ratio) + "), " + num(r.seconds) + " s";
    return r;
}

// 4. smooth averages of J_l(x) over odd orders near K
CriterionResult avk() {
    CriterionResult r;
    r.id = 4;
    r.name = "order-averaged-bessel";
    const auto t0 = Clock::now();
    const double K = 2000, delta = 0.3;
    const double sta3 = weighted_bessel_order_sum(K, delta, K) / bessel_j(2000, K).value;
    const double sta1 = std::abs(weighted_bessel_order_sum(K, delta, K - std::sqrt(K)));
    double sta2 = 0;
    const double band = std::pow(K, 0.4);
    for (double x = K - band + 0.25; x < K + band; x += 0.5)
        sta2 = std::max(sta2, std::abs(weighted_bessel_order_sum(K, delta, x)));
    const double sta2_limit = kAvkSta2Const * std::pow(K, -1.0 / 3);
    r.seconds = since(t0);
    r.metrics = {{"sta3_ratio", sta3}, {"sta1_abs", sta1}, {"sta2_max", sta2}, {"sta2_limit", sta2_limit}};
    const bool p3 = sta3 >= kAvkSta3Lo && sta3 <= kAvkSta3Hi, p1 = sta1 <= kAvkSta1Tol, p2 = sta2 <= sta2_limit;
    r.pass = p1 && p2 && p3;
    r.detail = std::string("sta3 ratio ") + num(sta3, 4) + (p3 ? " ok" : " FAIL") + "; sta1 |sum| " + num(sta1) +
               (p1 ? " ok" : " > 1e-10 FAIL") + "; sta2 max " + num(sta2) + (p2 ? " ok" : " FAIL");
    return r;
}

// 5. averaged traces against the Bessel main term
CriterionResult noweight() {
    CriterionResult r;
    r.id = 5;
    r.name = "noweight-end-to-end";
    const auto t0 = Clock::now();
    bool in_range = true, monotone = true;
    double prev = 1e300;
    std::string ratios;
    for (std::uint64_t n : {2280, 9120, 36480}) {
        WindowSpec w;
        w.delta = 0.25;
        w.K = std::floor(4 * kPi * std::sqrt(static_cast<double>(n)));
        const double ratio = averaged_trace_window(n, 1, w) / noweight_main_term(n, 1, w.K);
        r.metrics["ratio_" + std::to_string(n)] = ratio;
        in_range = in_range && ratio >= kNoweightLo && ratio <= kNoweightHi;
        const double dev = std::abs(ratio - 1);
        if (dev > prev) monotone = false;
        prev = dev;
        ratios += (ratios.empty() ? "" : ", ") + num(ratio, 5);
    }
    r.seconds = since(t0);
    r.pass = in_range && monotone && r.seconds <= kNoweightSeconds;
    r.detail = "ratios " + ratios + (in_range ? " in [0.5,1.5]" : " OUT OF RANGE") +
               (monotone ? "; |ratio-1| non-increasing" : "; |ratio-1| not non-increasing FAIL");
    return r;
}

// 6. variance against the diagonal, and the vanishing character sums
CriterionResult variance_identity() {
    CriterionResult r;
    r.id = 6;
    r.name = "variance-diagonal-identity";
    const auto t0 = Clock::now();
    double C = 0, idphi = 0;
    int cells = 0, skipped = 0;
    for (std::uint64_t n : {15, 27, 105, 625, 2401}) {
        const double T = 2 * std::ceil(std::sqrt(static_cast<double>(n)));
        for (std::uint64_t N : {2, 3, 5, 6}) {
            if (gcd_u64(n, N) != 1) {
                ++skipped;
                continue;
            }
            const double diff = variance_window(n, N, T).value - diagonal_side(n, N, T).value;
            C = std::max(C, std::abs(diff) / std::pow(static_cast<double>(n), 0.6));
            ++cells;
        }
        const auto bound = static_cast<std::int64_t>(isqrt(4 * n - 1));
        for (std::int64_t t = -bound; t <= bound; ++t)
            idphi = std::max(idphi, std::abs(poisson_character_sum(T, angle_data(t, n).theta).value));
    }
    r.seconds = since(t0);
    r.metrics = {{"fitted_C", C}, {"max_idphi", idphi}, {"cells", static_cast<double>(cells)},
                 {"skipped_non_coprime", static_cast<double>(skipped)}};
    r.pass = C <= kVarianceConstMax && idphi <= kIdphiTol;
    r.detail = "C = " + num(C) + " over " + std::to_string(cells) + " coprime cells (" + std::to_string(skipped) +
               " skipped, gcd(n,N) > 1); max idphi sum " + num(idphi);
    return r;
}

// 7. arithmetic sums over D_N, Gauss's three-squares count, lattice counts
CriterionResult arith() {
    CriterionResult r;
    r.id = 7;
    r.name = "arith-class-number-sums";
    const auto t0 = Clock::now();
    std::mt19937_64 rng(kRandomSeed);
    std::uniform_real_distribution<double> u(std::log(1e2), std::log(1e5));
    double c1 = 1e300, c2 = 0;
    for (int i = 0; i < 16; ++i) {
        auto n = static_cast<std::uint64_t>(std::exp(u(rng)));
        n |= 1;
        for (std::uint64_t N : {2, 3, 5, 6}) {
            if (gcd_u64(n, N) != 1) continue;
            auto e = trace_engine(n, N, TraceKind::new_forms);
            double s = 0;
            for (std::size_t j = 0; j < e->ts().size(); ++j) s += e->d_value(j) * e->d_value(j);
            const double rn = std::sqrt(static_cast<double>(n)), L = std::log(static_cast<double>(n));
            c1 = std::min(c1, s / rn);
            c2 = std::max(c2, s / rn / (L * L * std::pow(std::log(L), 4)));
        }
    }
    std::uint64_t r3_mismatch = 0;
    for (std::uint64_t n = 1; n <= 10000; ++n)
        if (r3(n) != r3_from_hurwitz(n)) ++r3_mismatch;
    double cA = 1e300;
    int empty_class = 0;
    for (std::uint64_t N : {2, 3, 5, 6})
        for (std::uint64_t n = 1; n <= 10000; n += 2) {
            if (gcd_u64(n, N) != 1) continue;
            auto n0 = admissible_n0(N, n);
            if (!n0) continue;
            // no t with |t| <= 2 sqrt(n) lies in the class when n0 > 2 sqrt(n)
            if (static_cast<std::uint64_t>(*n0 * *n0) > 4 * n) {
                ++empty_class;
                continue;
            }
            cA = std::min(cA, static_cast<double>(count_A(N, n, *n0)) / static_cast<double>(n));
        }
    r.seconds = since(t0);
    r.metrics = {{"c1", c1}, {"c2", c2}, {"r3_mismatches", static_cast<double>(r3_mismatch)}, {"cA", cA},
                 {"empty_class_cells", static_cast<double>(empty_class)}};
    r.pass = c1 > 0 && std::isfinite(c2) && r3_mismatch == 0 && cA > 0;
    r.detail = "c1 = " + num(c1) + ", c2 = " + num(c2) + ", r3 mismatches " + std::to_string(r3_mismatch) +
               ", min A_N(n)/n = " + num(cA) + " (" + std::to_string(empty_class) +
               " cells with n0 > 2 sqrt(n) excluded)";
    return r;
}

// 8. Weil bound and reality of Kloosterman sums
CriterionResult weil() {
    CriterionResult r;
    r.id = 8;
    r.name = "weil-bound-kloosterman";
    const auto t0 = Clock::now();
    std::mt19937_64 rng(kRandomSeed + 8);
    std::uniform_int_distribution<std::uint64_t> dc(1, 3000);
    std::uniform_int_distribution<std::int64_t> dm(-1000000, 1000000);
    double worst_ratio = 0, worst_imag = 0;
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto c = dc(rng);
        const auto m = dm(rng), n = dm(rng);
        const auto v = kloosterman_sum(m, n, c);
        const double w = weil_bound(m, n, c);
        if (std::abs(v.value) > w + kWeilSlack) ++violations;
        worst_ratio = std::max(worst_ratio, std::abs(v.value) / w);
        worst_imag = std::max(worst_imag, v.imaginary_residual);
    }
    r.seconds = since(t0);
    r.metrics = {{"max_ratio_to_bound", worst_ratio}, {"max_imaginary", worst_imag},
                 {"violations", static_cast<double>(violations)}};
    r.pass = violations == 0 && worst_imag <= kKloostermanImagTol;
    r.detail = "max |S|/bound " + num(worst_ratio, 4) + ", max imaginary residual " + num(worst_imag);
    return r;
}

// 9. moments of the harmonic measure at k_n = 4 pi 2^{n/2}
CriterionResult discrepancy_largeness() {
    CriterionResult r;
    r.id = 9;
    r.name = "discrepancy-largeness";
    const auto t0 = Clock::now();
    bool moments_ok = true;
    double rmin = 1e300, rmax = 0, worst_moment_ratio = 1e300;
    for (int n = 1; n <= 14; ++n) {
        const double x = 4 * kPi * std::pow(2.0, n / 2.0);
        auto k = static_cast<int>(std::floor(x));
        if (k % 2) --k;  // Petersson weights are even
        const double m0 = nu_moment(k, 1, 2, 0).value;
        const double mn = nu_moment(k, 1, 2, n).value;
        const double J = bessel_j(static_cast<std::uint64_t>(k - 1), x).value;
        const double mr = std::abs(mn) / (2 * kPi * std::abs(J));
        worst_moment_ratio = std::min(worst_moment_ratio, mr);
        if (mr < kNuMomentFactor) moments_ok = false;
        // probability-normalized moment gap against the semicircle (whose moment is 0)
        std::vector<double> diffs(n + 1, 0.0);
        diffs[n] = mn / m0;
        const double lb = discrepancy_lower_bound_moments(diffs, n);
        const double lk = std::log(static_cast<double>(k));
        const double scaled = lb / (std::pow(k, -1.0 / 3) / (lk * lk));
        rmin = std::min(rmin, scaled);
        rmax = std::max(rmax, scaled);
        r.metrics["lower_bound_n" + std::to_string(n)] = lb;
    }
    const double tdb = trace_discrepancy_bound(2, 12, 1).value_or(-1);
    const double expect = std::abs(-24.0 / std::pow(2.0, 5.5)) / 2;
    r.seconds = since(t0);
    r.metrics["min_moment_over_bessel"] = worst_moment_ratio;
    r.metrics["trend_spread"] = rmax / rmin;
    r.metrics["trace_discrepancy_bound_2_12_1"] = tdb;
    const bool trend = rmax / rmin <= kDiscrepancyTrendFactor;
    const bool tdb_ok = std::abs(tdb - expect) <= kTraceBoundTol;
    r.pass = moments_ok && trend && tdb_ok;
    r.detail = "min |moment|/(2pi|J|) " + num(worst_moment_ratio) + ", lower-bound spread vs k^-1/3 (log k)^-2: " +
               num(rmax / rmin) + ", trace bound err " + num(std::abs(tdb - expect));
    return r;
}

// 10. orbital integral by quadrature against the Bessel closed form
CriterionResult orbital() {
    CriterionResult r;
    r.id = 10;
    r.name = "orbital-integral";
    const auto t0 = Clock::now();
    double worst = 0;
    std::vector<double> lk, la;
    for (int k : {12, 24, 48})
        for (double t : {0.5, 1.0, 2.0}) {
            const auto o = orbital_integral_A(t, k);
            worst = std::max(worst, std::abs(o.quadrature - o.closed_form) / std::abs(o.closed_form));
            if (t == 1.0) {
                lk.push_back(std::log(static_cast<double>(k)));
                la.push_back(std::log(std::abs(o.closed_form)));
            }
        }
    const double slope = ls_slope(lk, la);
    r.seconds = since(t0);
    r.metrics = {{"max_relative_error", worst}, {"growth_slope", slope}};
    r.pass = worst <= kOrbitalTol && slope >= kOrbitalSlopeLo && slope <= kOrbitalSlopeHi;
    r.detail = "max rel err " + num(worst) + ", log-log slope of |A(1,k)| " + num(slope, 4);
    return r;
}

// 11. cold and warm runs of the determinism sweep at 1, 4, 8 threads
CriterionResult determinism(const std::string& exe) {
    CriterionResult r;
    r.id = 11;
    r.name = "determinism-and-cache";
    const auto t0 = Clock::now();
    if (exe.empty() || !std::filesystem::exists(exe)) {
        r.detail = "hecke-spectra executable not available";
        return r;
    }
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / ("hecke-determinism-" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path cfg = root / "verify.cfg";
    std::ofstream(cfg) << "experiment = verify\nsuite = determinism\n";
    std::vector<std::vector<ExperimentRecord>> runs;
    std::string failure;
    std::uintmax_t cache_bytes = 0;
    for (int threads : {1, 4, 8}) {
        const fs::path cache = root / ("cache-" + std::to_string(threads));
        fs::create_directories(cache);
        for (const char* phase : {"cold", "warm"}) {
            const fs::path out = root / (std::string(phase) + "-" + std::to_string(threads) + ".jsonl");
            const std::string cmd = "HECKE_CACHE_DIR='" + cache.string() + "' '" + exe + "' verify --config '" +
                                    cfg.string() + "' --out '" + out.string() + "' --threads " +
                                    std::to_string(threads) + " > /dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0) {
                failure = std::string(phase) + " run at " + std::to_string(threads) + " threads exited nonzero";
                break;
            }
            std::ifstream in(out);
            std::vector<ExperimentRecord> recs;
            for (std::string line; std::getline(in, line);)
                if (!line.empty()) recs.push_back(record_from_json_line(line));
            runs.push_back(std::move(recs));
            if (std::string(phase) == "cold") {
                const auto log = cache / "hecke-cache.log";
                cache_bytes = std::max(cache_bytes, fs::exists(log) ? fs::file_size(log) : 0);
            }
        }
        if (!failure.empty()) break;
    }
    std::size_t mismatches = 0;
    if (failure.empty()) {
        for (std::size_t i = 1; i < runs.size(); ++i) {
            if (runs[i].size() != runs[0].size()) {
                ++mismatches;
                continue;
            }
            for (std::size_t j = 0; j < runs[i].size(); ++j)
                if (!same_numbers(runs[i][j], runs[0][j])) ++mismatches;
        }
    }
    fs::remove_all(root);
    r.seconds = since(t0);
    r.metrics = {{"runs", static_cast<double>(runs.size())},
                 {"records_per_run", runs.empty() ? 0.0 : static_cast<double>(runs[0].size())},
                 {"mismatches", static_cast<double>(mismatches)},
                 {"cache_log_bytes", static_cast<double>(cache_bytes)}};
    r.pass = failure.empty() && runs.size() == 6 && mismatches == 0 && !runs[0].empty() && cache_bytes > 0;
    r.detail = failure.empty() ? std::to_string(runs.size()) + " runs x " +
                                     std::to_string(runs.empty() ? 0 : runs[0].size()) + " records, " +
                                     std::to_string(mismatches) + " mismatching records, cache log " +
                                     std::to_string(cache_bytes) + " bytes"
                               : failure;
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
    std::vector<CriterionResult> out;
    auto wanted = [&](int id) { return opts.only.empty() || std::count(opts.only.begin(), opts.only.end(), id); };
    auto run = [&](int id, auto&& f) {
        if (!wanted(id)) return;
        CriterionResult r;
        try {
            r = f();
        } catch (const std::exception& ex) {
            r.id = id;
            r.pass = false;
            r.detail = std::string("exception: ") + ex.what();
        }
        if (opts.on_result) opts.on_result(r);
        out.push_back(std::move(r));
    };
    run(1, tau_oracle);
    run(2, petersson_rank_one);
    run(3, maint_sweep);
    run(4, avk);
    run(5, noweight);
    run(6, variance_identity);
    run(7, arith);
    run(8, weil);
    run(9, discrepancy_largeness);
    run(10, orbital);
    run(11, [&] { return determinism(opts.executable); });
    return out;
}

}  // namespace hecke
