#include "hecke/eichler_selberg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "hecke/cache.hpp"
#include "hecke/class_numbers.hpp"
#include "hecke/special_functions.hpp"

namespace hecke {

namespace {

constexpr double kPi = std::numbers::pi;

void require_coprime(std::uint64_t n, std::uint64_t N, const char* who) {
    if (n == 0) throw std::invalid_argument(std::string(who) + ": n must be positive");
    if (N == 0) throw std::invalid_argument(std::string(who) + ": N must be positive");
    if (gcd_u64(n, N) != 1) throw std::invalid_argument(std::string(who) + ": gcd(n, N) must be 1");
}

void require_weight(int k, const char* who) {
    if (k < 2 || k % 2) throw std::invalid_argument(std::string(who) + ": k must be even and >= 2");
}

BigInt big_pow(std::uint64_t base, unsigned e) {
    BigInt r = 1, b = base;
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

// Coefficient of d^{k-1} in the third term at level N.
std::uint64_t third_term_weight(std::uint64_t n, std::uint64_t d, std::uint64_t N) {
    auto diff = static_cast<std::int64_t>(n / d) - static_cast<std::int64_t>(d);
    std::uint64_t g = gcd_u64(N, static_cast<std::uint64_t>(diff < 0 ? -diff : diff));
    std::uint64_t s = 0;
    for (auto c : factor(N).divisors()) {
        std::uint64_t gc = gcd_u64(c, N / c);
        if (g % gc == 0) s += euler_phi(gc);
    }
    return s;
}

}  // namespace

std::string to_string(TraceKind k) { return k == TraceKind::full ? "full" : "new"; }

AngleData angle_data(std::int64_t t, std::uint64_t n) {
    const auto four_n = static_cast<std::int64_t>(4 * n);
    if (t * t >= four_n) throw std::invalid_argument("angle_data: need t^2 < 4n");
    AngleData a;
    a.t = t;
    a.n = n;
    a.theta = std::atan2(std::sqrt(static_cast<double>(four_n - t * t)), static_cast<double>(t));
    return a;
}

std::int64_t mu_level(std::int64_t t, std::uint64_t f, std::uint64_t n, std::uint64_t N) {
    const std::uint64_t Nf = gcd_u64(N, f);
    const std::uint64_t num = nu_index(factor(N)), den = nu_index(factor(N / Nf));
    if (num % den) throw InconsistencyError("mu_level: nu ratio not integral");
    // x runs modulo N while the congruence is taken modulo N N_f; every root
    // modulo N that satisfies it has exactly N_f lifts modulo N N_f.
    const std::uint64_t lifts = count_congruence_roots(t, static_cast<std::int64_t>(n), N * Nf);
    if (lifts % Nf) throw InconsistencyError("mu_level: root count not divisible by N_f");
    return static_cast<std::int64_t>(num / den * (lifts / Nf));
}

std::int64_t mu_tilde(std::int64_t t, std::uint64_t f, std::uint64_t n, std::uint64_t N) {
    auto F = factor(N);
    if (!F.squarefree()) throw std::invalid_argument("mu_tilde: N must be squarefree");
    std::int64_t s = 0;
    for (auto d : F.divisors()) {
        auto Q = factor(N / d);
        s += static_cast<std::int64_t>(sigma0(Q)) * mobius(Q) * mu_level(t, f, n, d);
    }
    return s;
}

TraceEngine::TraceEngine(std::uint64_t n, std::uint64_t N, TraceKind kind) : n_(n), N_(N), kind_(kind) {
    require_coprime(n, N, "TraceEngine");
    if (kind == TraceKind::new_forms && !factor(N).squarefree())
        throw std::invalid_argument("TraceEngine: newform traces need squarefree N");
    const auto four_n = static_cast<std::int64_t>(4 * n);
    const auto tmax = static_cast<std::int64_t>(isqrt(4 * n - 1));
    for (std::int64_t t = -tmax; t <= tmax; ++t) {
        t_.push_back(t);
        const double root = std::sqrt(static_cast<double>(four_n - t * t));
        theta_.push_back(std::atan2(root, static_cast<double>(t)));
        inv_root_.push_back(1.0 / root);
    }

    auto& cache = global_cache();
    const std::string key = "class_sums:" + to_string(kind) + ":" + std::to_string(n) + ":" + std::to_string(N);
    bool loaded = false;
    if (auto v = cache.get(key)) {
        std::istringstream in(*v);
        std::string tok;
        while (std::getline(in, tok, ',')) six_sum_.push_back(std::stoll(tok));
        loaded = six_sum_.size() == t_.size();
        if (!loaded) six_sum_.clear();
    }
    if (!loaded) {
        const auto& table = hurwitz_table(4 * n);
        // Root counts depend on t only through t mod N N_f; memoize per modulus.
        std::map<std::pair<std::uint64_t, std::int64_t>, std::int64_t> mu_memo;
        auto mu_at = [&](std::int64_t t, std::uint64_t f) {
            const std::uint64_t Nf = gcd_u64(N, f);
            const auto mod = static_cast<std::int64_t>(N * N);
            auto key2 = std::make_pair(Nf, ((t % mod) + mod) % mod);
            auto it = mu_memo.find(key2);
            if (it != mu_memo.end()) return it->second;
            std::int64_t v = kind == TraceKind::full ? mu_level(t, Nf, n, N) : mu_tilde(t, Nf, n, N);
            mu_memo.emplace(key2, v);
            return v;
        };
        for (auto t : t_) {
            const auto m = static_cast<std::uint64_t>(four_n - t * t);
            std::int64_t s = 0;
            for (std::uint64_t f = 1; f * f <= m; ++f) {
                if (m % (f * f)) continue;
                const std::uint64_t q = m / (f * f);
                if (q % 4 != 0 && q % 4 != 3) continue;
                s += table.six_hw(q) * mu_at(t, f);
            }
            six_sum_.push_back(s);
        }
        std::string enc;
        for (std::size_t i = 0; i < six_sum_.size(); ++i) enc += (i ? "," : "") + std::to_string(six_sum_[i]);
        cache.put(key, enc);
    }

    for (auto d : factor(n).divisors()) {
        if (d * d > n) break;
        Rational c = kind == TraceKind::full ? Rational(third_term_weight(n, d, N)) : Rational(N == 1 ? 1 : 0);
        if (d * d == n) c /= 2;
        if (c != 0) third_.emplace_back(d, c);
    }
}

double TraceEngine::d_value(std::size_t i) const {
    return 0.5 * inv_root_.at(i) * static_cast<double>(six_sum_.at(i)) / 6.0;
}

double TraceEngine::term2(int k) const {
    double s = 0, c = 0;
    const double km1 = k - 1;
    for (std::size_t i = 0; i < t_.size(); ++i) {
        if (!six_sum_[i]) continue;
        double v = std::sin(km1 * theta_[i]) * inv_root_[i] * static_cast<double>(six_sum_[i]) / 6.0;
        // Kahan
        double y = v - c, tt = s + y;
        c = (tt - s) - y;
        s = tt;
    }
    return -s;
}

TraceBreakdown TraceEngine::evaluate(int k, bool exact) const {
    require_weight(k, "trace");
    TraceBreakdown b;
    b.n = n_;
    b.k = k;
    b.N = N_;
    b.kind = kind_;
    const auto F = factor(N_);
    const bool sq = is_square(n_);
    const std::uint64_t r = isqrt(n_);
    const double sqrt_n = std::sqrt(static_cast<double>(n_));
    const std::uint64_t vol = kind_ == TraceKind::full ? nu_index(F) : euler_phi(F);
    const int sign4 = kind_ == TraceKind::full ? 1 : mobius(F);
    const std::uint64_t s1 = sigma1(factor(n_));

    if (sq) b.term1 = (k - 1) / 12.0 * static_cast<double>(vol) / static_cast<double>(r);
    b.term2 = term2(k);
    const double log_n_half = 0.5 * std::log(static_cast<double>(n_));
    for (auto& [d, c] : third_)
        b.term3 -= c.convert_to<double>() * std::exp((k - 1) * (std::log(static_cast<double>(d)) - log_n_half));
    if (k == 2) b.term4 = sign4 * static_cast<double>(s1) / sqrt_n;
    b.total = b.term1 + b.term2 + b.term3 + b.term4;

    if (exact) {
        b.has_exact = true;
        if (sq) b.term1_exact = Rational(k - 1, 12) * Rational(vol) * Rational(big_pow(n_, static_cast<unsigned>(k / 2 - 1)));
        for (auto& [d, c] : third_) b.term3_exact -= c * Rational(big_pow(d, static_cast<unsigned>(k - 1)));
        if (k == 2) b.term4_exact = Rational(sign4) * Rational(s1);
    }
    return b;
}

std::shared_ptr<const TraceEngine> trace_engine(std::uint64_t n, std::uint64_t N, TraceKind kind) {
    static std::mutex mu;
    static std::map<std::tuple<std::uint64_t, std::uint64_t, int>, std::shared_ptr<const TraceEngine>> engines;
    const auto key = std::make_tuple(n, N, static_cast<int>(kind));
    {
        std::lock_guard lock(mu);
        auto it = engines.find(key);
        if (it != engines.end()) return it->second;
    }
    auto e = std::make_shared<const TraceEngine>(n, N, kind);
    std::lock_guard lock(mu);
    return engines.emplace(key, e).first->second;
}

TraceBreakdown trace_full(std::uint64_t n, int k, std::uint64_t N) {
    require_coprime(n, N, "trace_full");
    require_weight(k, "trace_full");
    return trace_engine(n, N, TraceKind::full)->evaluate(k);
}

TraceBreakdown trace_new(std::uint64_t n, int k, std::uint64_t N) {
    require_coprime(n, N, "trace_new");
    require_weight(k, "trace_new");
    auto F = factor(N);
    if (!F.squarefree()) throw std::invalid_argument("trace_new: N must be squarefree");
    TraceBreakdown direct = trace_engine(n, N, TraceKind::new_forms)->evaluate(k);

    Rational e1 = 0, e3 = 0, e4 = 0;
    double t2 = 0;
    for (auto d : F.divisors()) {
        auto Q = factor(N / d);
        const int c = static_cast<int>(sigma0(Q)) * mobius(Q);
        if (!c) continue;
        auto full = trace_full(n, k, d);
        e1 += c * full.term1_exact;
        e3 += c * full.term3_exact;
        e4 += c * full.term4_exact;
        t2 += c * full.term2;
    }
    if (e1 != direct.term1_exact || e3 != direct.term3_exact || e4 != direct.term4_exact)
        throw InconsistencyError("trace_new: rational terms differ between the direct and Moebius routes");
    if (std::abs(t2 - direct.term2) > 1e-9 * (1 + std::abs(direct.term2)))
        throw InconsistencyError("trace_new: oscillating term differs between the direct and Moebius routes");
    return direct;
}

double d_coefficient(std::int64_t t, std::uint64_t n, std::uint64_t N) {
    auto e = trace_engine(n, N, TraceKind::new_forms);
    const auto tmax = static_cast<std::int64_t>(isqrt(4 * n - 1));
    if (t < -tmax || t > tmax) throw std::invalid_argument("d_coefficient: need t^2 < 4n");
    return e->d_value(static_cast<std::size_t>(t + tmax));
}

double averaged_trace_window(std::uint64_t n, std::uint64_t N, const WindowSpec& spec) {
    if (!(spec.delta > 0.2 && spec.delta < 1.0 / 3.0))
        throw std::invalid_argument("averaged_trace_window: delta must lie in (1/5, 1/3)");
    const double target = 4 * kPi * std::sqrt(static_cast<double>(n));
    if (std::abs(spec.K - target) > std::pow(static_cast<double>(n), 1.0 / 6.0))
        throw std::invalid_argument("averaged_trace_window: K too far from 4 pi sqrt(n)");
    const double W = std::pow(spec.K, spec.delta);
    auto lo = static_cast<std::int64_t>(std::ceil(spec.K - W));
    auto hi = static_cast<std::int64_t>(std::floor(spec.K + W));
    if (lo % 2) ++lo;
    double s = 0;
    for (std::int64_t k = std::max<std::int64_t>(lo, 2); k <= hi; k += 2) {
        const double w = psi_eval((static_cast<double>(k) - spec.K) / W);
        if (w == 0) continue;
        const double tr = trace_new(n, static_cast<int>(k), N).total;
        s += w * ((k / 2) % 2 ? -tr : tr);
    }
    return s / W;
}

double noweight_main_term(std::uint64_t n, std::uint64_t N, double K) {
    require_coprime(n, N, "noweight_main_term");
    if (K < 1 || K != std::floor(K)) throw std::invalid_argument("noweight_main_term: K must be a positive integer");
    const auto F = factor(N);
    if (!F.squarefree()) throw std::invalid_argument("noweight_main_term: N must be squarefree");
    const double J = bessel_j(static_cast<std::uint64_t>(K), 4 * kPi * std::sqrt(static_cast<double>(n))).value;
    const double s1 = static_cast<double>(sigma1(factor(n)));
    return mobius(F) * K / (2 * kPi) * (s1 / static_cast<double>(n)) * J;
}

namespace {

constexpr double kVarianceTol = 1e-10;

void require_variance_args(std::uint64_t n, std::uint64_t N, double T, const char* who) {
    require_coprime(n, N, who);
    if (N <= 1) throw std::invalid_argument(std::string(who) + ": N must be > 1");
    if (!factor(N).squarefree()) throw std::invalid_argument(std::string(who) + ": N must be squarefree");
    if (T < std::sqrt(static_cast<double>(n))) throw std::invalid_argument(std::string(who) + ": need T >= sqrt(n)");
}

// Number of odd points (2j-1)/T below the certified truncation point.
std::size_t grid_count(double T, double W) {
    const double X = phi_truncation_point(T, W, kVarianceTol);
    return static_cast<std::size_t>(std::ceil((X * T + 1) / 2));
}

const std::vector<double>& cached_phi_grid(double T, std::size_t count) {
    static std::mutex mu;
    static std::map<std::pair<double, std::size_t>, std::vector<double>> grids;
    std::lock_guard lock(mu);
    auto key = std::make_pair(T, count);
    auto it = grids.find(key);
    if (it == grids.end()) it = grids.emplace(key, phi_odd_grid(T, count)).first;
    return it->second;
}

double tail_bound(double T, std::size_t count, double W) {
    // envelope tail from the first omitted odd point onward
    const auto& env = phi_envelope();
    const double X = (2.0 * static_cast<double>(count + 1) - 1) / T;
    const double base = X - 2.0 / T;
    return W * env.constant * (T / 2) * std::pow(base, 1 - env.power) / (env.power - 1);
}

}  // namespace

VarianceResult variance_window(std::uint64_t n, std::uint64_t N, double T) {
    require_variance_args(n, N, T, "variance_window");
    auto e = trace_engine(n, N, TraceKind::new_forms);
    const auto& ts = e->ts();
    // |Tr* - main|^2 <= (2 sum |d| + sigma1/sqrt n)^2 for every k
    double dsum = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) dsum += std::abs(e->d_value(i));
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const double s1 = static_cast<double>(sigma1(factor(n)));
    const double W = std::pow(2 * dsum + s1 / sqrt_n, 2);
    const std::size_t count = grid_count(T, W);
    const auto& phi = cached_phi_grid(T, count);

    // B2(k) = -2 sum_t sin((k-1) theta_t) d_t, with sin advanced by rotation and
    // re-seeded every block.
    const std::size_t m = ts.size();
    std::vector<double> d(m), s(m), c(m), rs(m), rc(m);
    for (std::size_t i = 0; i < m; ++i) {
        d[i] = e->d_value(i);
        rs[i] = std::sin(2 * e->thetas()[i]);
        rc[i] = std::cos(2 * e->thetas()[i]);
    }
    const int mu_N = mobius(factor(N));
    double acc = 0, comp = 0;
    constexpr std::size_t kBlock = 256;
    for (std::size_t j0 = 0; j0 < count; j0 += kBlock) {
        const std::size_t j1 = std::min(count, j0 + kBlock);
        for (std::size_t i = 0; i < m; ++i) {
            const double a = static_cast<double>(2 * j0 + 1) * e->thetas()[i];  // k = 2(j0+1)
            s[i] = std::sin(a);
            c[i] = std::cos(a);
        }
        for (std::size_t j = j0; j < j1; ++j) {
            double b2 = 0;
            for (std::size_t i = 0; i < m; ++i) {
                b2 += s[i] * d[i];
                const double ns = s[i] * rc[i] + c[i] * rs[i];
                c[i] = c[i] * rc[i] - s[i] * rs[i];
                s[i] = ns;
            }
            double dev = -2 * b2;
            if (j == 0) dev += mu_N * s1 / sqrt_n;  // weight 2
            const double y = phi[j] * dev * dev - comp;
            const double t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
    }
    VarianceResult r;
    r.value = acc;
    r.truncation_bound = tail_bound(T, count, W);
    r.k_max = 2 * count;
    return r;
}

VarianceResult diagonal_side(std::uint64_t n, std::uint64_t N, double T) {
    require_variance_args(n, N, T, "diagonal_side");
    auto e = trace_engine(n, N, TraceKind::new_forms);
    double dd = 0;
    for (std::size_t i = 0; i < e->ts().size(); ++i) dd += e->d_value(i) * e->d_value(i);
    const std::size_t count = grid_count(T, 1.0);
    const auto& phi = cached_phi_grid(T, count);
    double phisum = 0;
    for (std::size_t j = count; j-- > 0;) phisum += phi[j];
    phisum *= 2;  // k in 2Z: (k-1) runs over all odd integers, phi even
    const double s1 = static_cast<double>(sigma1(factor(n)));
    VarianceResult r;
    r.value = 2 * phisum * dd - phi[0] * s1 * s1 / static_cast<double>(n);
    r.truncation_bound = 2 * 2 * dd * tail_bound(T, count, 1.0);
    r.k_max = 2 * count;
    return r;
}

CharacterSum poisson_character_sum(double T, double theta) {
    if (T < 1) throw std::invalid_argument("poisson_character_sum: T must be >= 1");
    if (!(theta > 0 && theta < kPi)) throw std::invalid_argument("poisson_character_sum: theta must lie in (0, pi)");
    const std::size_t count = grid_count(T, 1.0);
    const auto& phi = cached_phi_grid(T, count);
    // positive and negative odd points summed separately; the imaginary parts
    // cancel pairwise and what is left is reported as a residual
    double re = 0, im_pos = 0, im_neg = 0;
    for (std::size_t j = count; j-- > 0;) {
        const double a = (2.0 * static_cast<double>(j) + 1) * theta;
        re += 2 * phi[j] * std::cos(a);
        im_pos += phi[j] * std::sin(a);
        im_neg -= phi[j] * std::sin(a);
    }
    CharacterSum out;
    out.value = re;
    out.imaginary_residual = im_pos + im_neg;
    out.truncation_bound = 2 * tail_bound(T, count, 1.0);
    return out;
}

}  // namespace hecke
