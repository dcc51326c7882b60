#include "hecke/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "hecke/acceptance.hpp"
#include "hecke/class_numbers.hpp"
#include "hecke/arithmetic.hpp"
#include "hecke/eichler_selberg.hpp"
#include "hecke/petersson.hpp"
#include "hecke/special_functions.hpp"
#include "hecke/spectral.hpp"
#include "json.hpp"

namespace hecke {

namespace {

constexpr double kPi = std::numbers::pi;
using json = nlohmann::json;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::int64_t parse_int(const std::string& key, const std::string& s) {
    std::size_t pos = 0;
    std::int64_t v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects integers, got '" + s + "'");
    }
    if (pos != s.size()) throw ConfigError("config: key '" + key + "' expects integers, got '" + s + "'");
    return v;
}

double parse_real(const std::string& key, const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects reals, got '" + s + "'");
    }
    if (pos != s.size() || !std::isfinite(v))
        throw ConfigError("config: key '" + key + "' expects reals, got '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

}  // namespace

// ---- records

std::string to_json_line(const ExperimentRecord& r) {
    json j;
    j["experiment"] = r.experiment;
    j["parameters"] = r.parameters;
    j["outputs"] = r.outputs;
    j["provenance"] = {{"tool_version", r.provenance.tool_version},
                       {"timestamp", r.provenance.timestamp},
                       {"truncation_bounds", r.provenance.truncation_bounds}};
    return j.dump();
}

ExperimentRecord record_from_json_line(const std::string& line) {
    const json j = json::parse(line);
    ExperimentRecord r;
    r.experiment = j.at("experiment").get<std::string>();
    r.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
    auto numbers = [](const json& obj) {
        std::map<std::string, double> m;
        for (auto it = obj.begin(); it != obj.end(); ++it)
            m[it.key()] = it.value().is_null() ? std::nan("") : it.value().get<double>();
        return m;
    };
    r.outputs = numbers(j.at("outputs"));
    const auto& p = j.at("provenance");
    r.provenance.tool_version = p.at("tool_version").get<std::string>();
    r.provenance.timestamp = p.at("timestamp").get<std::string>();
    r.provenance.truncation_bounds = numbers(p.at("truncation_bounds"));
    return r;
}

bool same_numbers(const ExperimentRecord& a, const ExperimentRecord& b) {
    auto same = [](const std::map<std::string, double>& x, const std::map<std::string, double>& y) {
        if (x.size() != y.size()) return false;
        for (auto ix = x.begin(), iy = y.begin(); ix != x.end(); ++ix, ++iy)
            if (ix->first != iy->first || std::memcmp(&ix->second, &iy->second, sizeof(double)) != 0) return false;
        return true;
    };
    return a.experiment == b.experiment && a.parameters == b.parameters && same(a.outputs, b.outputs) &&
           same(a.provenance.truncation_bounds, b.provenance.truncation_bounds);
}

// ---- config

Config Config::parse(const std::string& text) {
    Config c;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        for (char ch : key)
            if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'))
                throw ConfigError("config line " + std::to_string(lineno) + ": bad key '" + key + "'");
        if (c.values_.count(key)) throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        c.values_[key] = value;
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::vector<std::int64_t> Config::integers(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("config: missing key '" + key + "'");
    std::vector<std::int64_t> out;
    for (const auto& part : split(it->second, ',')) {
        if (auto dots = part.find(".."); dots != std::string::npos) {
            std::string hi = part.substr(dots + 2), step = "1";
            if (auto colon = hi.find(':'); colon != std::string::npos) {
                step = hi.substr(colon + 1);
                hi = hi.substr(0, colon);
            }
            const auto a = parse_int(key, trim(part.substr(0, dots))), b = parse_int(key, trim(hi)),
                       s = parse_int(key, trim(step));
            if (s <= 0 || b < a) throw ConfigError("config: bad range '" + part + "' for key '" + key + "'");
            if ((b - a) / s > 1000000) throw ConfigError("config: range too long for key '" + key + "'");
            for (auto v = a; v <= b; v += s) out.push_back(v);
        } else {
            out.push_back(parse_int(key, part));
        }
    }
    if (out.empty()) throw ConfigError("config: key '" + key + "' is empty");
    return out;
}

std::vector<double> Config::reals(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("config: missing key '" + key + "'");
    std::vector<double> out;
    for (const auto& part : split(it->second, ',')) out.push_back(parse_real(key, part));
    if (out.empty()) throw ConfigError("config: key '" + key + "' is empty");
    return out;
}

// ---- cells

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"trace",    "petersson",   "bessel-sum", "noweight", "variance",
                                                "arith-sum", "discrepancy", "orbital",    "verify"};
    return names;
}

namespace {

struct ExperimentSpec {
    std::vector<std::string> required;
    std::vector<std::string> optional;
};

const std::map<std::string, ExperimentSpec>& experiment_specs() {
    static const std::map<std::string, ExperimentSpec> specs{
        {"trace", {{"n", "k", "N"}, {"kind"}}},
        {"petersson", {{"k", "N", "n"}, {"m", "kind", "l_max"}}},
        {"bessel-sum", {{"K", "delta", "x"}, {}}},
        {"noweight", {{"n", "N"}, {"delta", "K"}}},
        {"variance", {{"n", "N"}, {"T"}}},
        {"arith-sum", {{"n", "N"}, {}}},
        {"discrepancy", {{"k", "N", "p"}, {}}},
        {"orbital", {{"t", "k"}, {}}},
        {"verify", {{}, {"suite", "criteria"}}},
    };
    return specs;
}

// keys whose values are lists of integers / reals / words
const std::set<std::string> kIntegerKeys{"n", "k", "N", "m", "p", "l_max"};
const std::set<std::string> kRealKeys{"K", "delta", "x", "T", "t"};

std::string fmt_real(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::uint64_t as_u64(const Cell& c, const std::string& key) {
    const auto v = std::stoll(c.params.at(key));
    if (v <= 0) throw ConfigError(c.experiment + ": '" + key + "' must be positive");
    return static_cast<std::uint64_t>(v);
}
int as_int(const Cell& c, const std::string& key) { return static_cast<int>(std::stoll(c.params.at(key))); }
double as_real(const Cell& c, const std::string& key) { return std::stod(c.params.at(key)); }
std::string as_word(const Cell& c, const std::string& key, const std::string& fallback) {
    auto it = c.params.find(key);
    return it == c.params.end() ? fallback : it->second;
}

}  // namespace

std::vector<Cell> expand_cells(const std::string& name, const Config& config) {
    auto sit = experiment_specs().find(name);
    if (sit == experiment_specs().end()) throw ConfigError("unknown experiment '" + name + "'");
    if (config.has("experiment") && config.get("experiment") != name)
        throw ConfigError("config names experiment '" + config.get("experiment") + "' but '" + name + "' was requested");
    const auto& spec = sit->second;
    std::set<std::string> allowed{"experiment", "output", "csv", "threads"};
    allowed.insert(spec.required.begin(), spec.required.end());
    allowed.insert(spec.optional.begin(), spec.optional.end());
    for (const auto& [k, v] : config.values())
        if (!allowed.count(k)) throw ConfigError("config: key '" + k + "' is not used by experiment '" + name + "'");
    for (const auto& k : spec.required)
        if (!config.has(k)) throw ConfigError("config: experiment '" + name + "' needs key '" + k + "'");

    // each parameter key becomes a list of string values; cells are the product
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    std::vector<std::string> keys = spec.required;
    keys.insert(keys.end(), spec.optional.begin(), spec.optional.end());
    for (const auto& k : keys) {
        if (!config.has(k)) continue;
        std::vector<std::string> vals;
        if (name == "verify") {
            vals.push_back(config.get(k));
        } else if (kIntegerKeys.count(k)) {
            for (auto v : config.integers(k)) vals.push_back(std::to_string(v));
        } else if (kRealKeys.count(k)) {
            for (auto v : config.reals(k)) vals.push_back(fmt_real(v));
        } else {
            vals = split(config.get(k), ',');
        }
        axes.emplace_back(k, vals);
    }
    std::vector<Cell> cells{Cell{name, {}}};
    for (const auto& [k, vals] : axes) {
        std::vector<Cell> next;
        for (const auto& c : cells)
            for (const auto& v : vals) {
                Cell d = c;
                d.params[k] = v;
                next.push_back(d);
            }
        cells = std::move(next);
    }
    return cells;
}

ExperimentRecord compute_cell(const Cell& c) {
    ExperimentRecord r;
    r.experiment = c.experiment;
    r.parameters = c.params;
    auto& out = r.outputs;
    auto& bounds = r.provenance.truncation_bounds;
    try {
        if (c.experiment == "trace") {
            const auto kind = as_word(c, "kind", "new");
            if (kind != "new" && kind != "full") throw ConfigError("trace: kind must be 'new' or 'full'");
            const auto n = as_u64(c, "n"), N = as_u64(c, "N");
            const int k = as_int(c, "k");
            const auto t = kind == "new" ? trace_new(n, k, N) : trace_full(n, k, N);
            out = {{"term1", t.term1}, {"term2", t.term2}, {"term3", t.term3}, {"term4", t.term4}, {"total", t.total}};
        } else if (c.experiment == "petersson") {
            const auto kind = as_word(c, "kind", "new");
            if (kind != "new" && kind != "full") throw ConfigError("petersson: kind must be 'new' or 'full'");
            const int k = as_int(c, "k");
            const auto N = as_u64(c, "N"), n = as_u64(c, "n");
            const std::uint64_t m = c.params.count("m") ? as_u64(c, "m") : 1;
            const std::uint64_t l_max = c.params.count("l_max") ? as_u64(c, "l_max") : 10000;
            const auto p = kind == "new" ? delta_new(k, N, m, n, l_max) : delta_full(k, N, m, n);
            out = {{"value", p.value}, {"c_max", static_cast<double>(p.c_max)}, {"l_max", static_cast<double>(p.l_max)}};
            bounds["truncation_bound"] = p.truncation_bound;
            const double x = 4 * kPi * std::sqrt(static_cast<double>(m) * static_cast<double>(n));
            if (kind == "new" && std::abs(x - k) < 2 * std::cbrt(static_cast<double>(k))) {
                const double main = maint_main_terms(k, N, m, n);
                out["main_terms"] = main;
                out["residual"] = p.value - main;
                out["residual_sqrt_k"] = (p.value - main) * std::sqrt(static_cast<double>(k));
            }
        } else if (c.experiment == "bessel-sum") {
            const double K = as_real(c, "K"), delta = as_real(c, "delta"), x = as_real(c, "x");
            const double v = weighted_bessel_order_sum(K, delta, x);
            const auto J = bessel_j(static_cast<std::uint64_t>(std::llround(K)), x);
            out = {{"value", v}, {"bessel_j_K", J.value}, {"ratio", v / J.value}};
            bounds["bessel_abs_error"] = J.abs_error_bound;
        } else if (c.experiment == "noweight") {
            const auto n = as_u64(c, "n"), N = as_u64(c, "N");
            WindowSpec w;
            w.delta = c.params.count("delta") ? as_real(c, "delta") : 0.25;
            w.K = c.params.count("K") ? as_real(c, "K") : std::floor(4 * kPi * std::sqrt(static_cast<double>(n)));
            const double lhs = averaged_trace_window(n, N, w);
            const double main = noweight_main_term(n, N, w.K);
            out = {{"K", w.K}, {"lhs", lhs}, {"main_term", main}, {"ratio", lhs / main}};
        } else if (c.experiment == "variance") {
            const auto n = as_u64(c, "n"), N = as_u64(c, "N");
            const double T = c.params.count("T") ? as_real(c, "T")
                                                 : 2 * std::ceil(std::sqrt(static_cast<double>(n)));
            const auto v = variance_window(n, N, T);
            const auto d = diagonal_side(n, N, T);
            out = {{"T", T},
                   {"variance", v.value},
                   {"diagonal", d.value},
                   {"difference", v.value - d.value},
                   {"difference_over_n06", std::abs(v.value - d.value) / std::pow(static_cast<double>(n), 0.6)},
                   {"k_max", static_cast<double>(v.k_max)}};
            bounds["variance_truncation"] = v.truncation_bound;
            bounds["diagonal_truncation"] = d.truncation_bound;
        } else if (c.experiment == "arith-sum") {
            const auto n = as_u64(c, "n"), N = as_u64(c, "N");
            if (gcd_u64(n, N) != 1) throw ConfigError("arith-sum: gcd(n, N) must be 1");
            auto e = trace_engine(n, N, TraceKind::new_forms);
            double s = 0;
            for (std::size_t i = 0; i < e->ts().size(); ++i) s += e->d_value(i) * e->d_value(i);
            const double rn = std::sqrt(static_cast<double>(n)), L = std::log(static_cast<double>(n));
            out = {{"sum_d2_over_sqrt_n", s / rn},
                   {"upper_normalized", s / rn / (L * L * std::pow(std::log(L), 4))}};
            if (n % 2 && factor(N).squarefree()) {
                if (auto n0 = admissible_n0(N, n)) {
                    out["n0"] = static_cast<double>(*n0);
                    out["count_A_over_n"] = static_cast<double>(count_A(N, n, *n0)) / static_cast<double>(n);
                }
            }
        } else if (c.experiment == "discrepancy") {
            const int k = as_int(c, "k");
            const auto N = as_u64(c, "N"), p = as_u64(c, "p");
            auto e = empirical_mu_star(k, N, p);
            out = {{"dim", static_cast<double>(e.measure.atoms.size())},
                   {"discrepancy_plancherel", discrepancy(e.measure, plancherel_measure(p))},
                   {"discrepancy_semicircle", discrepancy(e.measure, semicircle_measure())},
                   {"roundtrip_error", e.roundtrip_error},
                   {"degraded", e.degraded ? 1.0 : 0.0}};
            if (auto b = trace_discrepancy_bound(p, k, N)) out["trace_bound"] = *b;
        } else if (c.experiment == "orbital") {
            const double t = as_real(c, "t");
            const int k = as_int(c, "k");
            auto o = orbital_integral_A(t, k);
            out = {{"quadrature_re", o.quadrature.real()},
                   {"quadrature_im", o.quadrature.imag()},
                   {"closed_re", o.closed_form.real()},
                   {"closed_im", o.closed_form.imag()},
                   {"relative_error", std::abs(o.quadrature - o.closed_form) / std::abs(o.closed_form)}};
            bounds["quadrature_error"] = o.quadrature_error;
        } else {
            throw ConfigError("unknown experiment '" + c.experiment + "'");
        }
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(c.experiment + ": " + ex.what());
    }
    r.provenance.timestamp = utc_now();
    return r;
}

std::vector<Cell> determinism_cells() {
    std::vector<Cell> cells;
    auto add = [&](const std::string& e, std::map<std::string, std::string> p) { cells.push_back({e, std::move(p)}); };
    for (std::uint64_t N : {1, 11, 15})
        for (int k : {2, 12, 24})
            for (std::uint64_t n : {1, 2, 4, 7, 13, 97})
                if (gcd_u64(n, N) == 1)
                    add("trace", {{"n", std::to_string(n)}, {"k", std::to_string(k)}, {"N", std::to_string(N)}});
    for (std::uint64_t N : {2, 3, 5, 6})
        for (std::uint64_t n : {101, 1001, 3001, 20011})
            if (gcd_u64(n, N) == 1) add("arith-sum", {{"n", std::to_string(n)}, {"N", std::to_string(N)}});
    for (std::uint64_t N : {2, 3, 5})
        for (std::uint64_t n : {15, 27, 105})
            if (gcd_u64(n, N) == 1) add("variance", {{"n", std::to_string(n)}, {"N", std::to_string(N)}});
    for (std::uint64_t N : {1, 2})
        for (std::uint64_t n : {1, 3, 5})
            add("petersson", {{"k", "12"}, {"N", std::to_string(N)}, {"n", std::to_string(n)}, {"l_max", "100"}});
    add("noweight", {{"n", "2280"}, {"N", "1"}, {"delta", "0.25"}});
    add("discrepancy", {{"k", "72"}, {"N", "1"}, {"p", "2"}});
    add("discrepancy", {{"k", "4"}, {"N", "23"}, {"p", "3"}});
    add("bessel-sum", {{"K", "200"}, {"delta", "0.3"}, {"x", "190"}});
    add("bessel-sum", {{"K", "200"}, {"delta", "0.3"}, {"x", "200"}});
    add("orbital", {{"t", "1"}, {"k", "12"}});
    return cells;
}

// ---- running

void parallel_ordered(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& f,
                      const std::function<void(std::size_t)>& emit) {
    threads = std::max(1u, threads);
    std::vector<char> done(count, 0);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t emitted = 0;
    bool failed = false;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
            std::lock_guard lock(mu);
            done[i] = 1;
            if (errors[i]) failed = true;
            while (!failed && emitted < count && done[emitted]) emit(emitted++);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

namespace {

void write_csv(const std::string& path, const std::vector<ExperimentRecord>& recs) {
    std::set<std::string> pkeys, okeys;
    for (const auto& r : recs) {
        for (const auto& [k, v] : r.parameters) pkeys.insert(k);
        for (const auto& [k, v] : r.outputs) okeys.insert(k);
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "experiment";
    for (const auto& k : pkeys) out << ',' << k;
    for (const auto& k : okeys) out << ',' << k;
    out << '\n' << std::setprecision(17);
    for (const auto& r : recs) {
        out << r.experiment;
        for (const auto& k : pkeys) {
            auto it = r.parameters.find(k);
            out << ',' << (it == r.parameters.end() ? "" : it->second);
        }
        for (const auto& k : okeys) {
            out << ',';
            if (auto it = r.outputs.find(k); it != r.outputs.end()) out << it->second;
        }
        out << '\n';
    }
}

}  // namespace

std::vector<ExperimentRecord> run_cells(const std::vector<Cell>& cells, const RunOptions& opts) {
    std::vector<ExperimentRecord> recs(cells.size());
    std::ofstream file;
    if (!opts.out_path.empty()) {
        file.open(opts.out_path);
        if (!file) throw ConfigError("cannot write " + opts.out_path);
    }
    parallel_ordered(
        cells.size(), opts.threads, [&](std::size_t i) { recs[i] = compute_cell(cells[i]); },
        [&](std::size_t i) {
            const auto line = to_json_line(recs[i]);
            if (opts.stream) *opts.stream << line << '\n' << std::flush;
            if (file) file << line << '\n' << std::flush;
        });
    if (!opts.csv_path.empty()) write_csv(opts.csv_path, recs);
    return recs;
}

RunOutcome run_experiment(const std::string& name, const Config& config, const RunOptions& opts) {
    RunOutcome outcome;
    if (name != "verify") {
        outcome.records = run_cells(expand_cells(name, config), opts);
        return outcome;
    }
    expand_cells(name, config);  // validates keys
    const std::string suite = config.get("suite", "acceptance");
    if (suite == "determinism") {
        outcome.records = run_cells(determinism_cells(), opts);
        return outcome;
    }
    if (suite != "acceptance") throw ConfigError("verify: suite must be 'acceptance' or 'determinism'");
    AcceptanceOptions a;
    a.threads = opts.threads;
    a.executable = opts.executable;
    if (config.has("criteria"))
        for (auto v : config.integers("criteria")) a.only.push_back(static_cast<int>(v));
    std::ofstream file;
    if (!opts.out_path.empty()) {
        file.open(opts.out_path);
        if (!file) throw ConfigError("cannot write " + opts.out_path);
    }
    a.on_result = [&](const CriterionResult& c) {
        ExperimentRecord r;
        r.experiment = "verify";
        r.parameters = {{"criterion", std::to_string(c.id)}, {"name", c.name}};
        r.outputs = c.metrics;
        r.outputs["pass"] = c.pass ? 1.0 : 0.0;
        r.outputs["seconds"] = c.seconds;
        r.provenance.timestamp = utc_now();
        const auto line = to_json_line(r);
        if (opts.stream) *opts.stream << line << '\n' << std::flush;
        if (file) file << line << '\n' << std::flush;
        outcome.records.push_back(r);
        if (!c.pass) outcome.verification_failed = true;
    };
    run_acceptance(a);
    if (!opts.csv_path.empty()) write_csv(opts.csv_path, outcome.records);
    return outcome;
}

}  // namespace hecke
