#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

#include "hecke/cache.hpp"
#include "hecke/harness.hpp"

using namespace hecke;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
    auto p = fs::temp_directory_path() / ("hecke-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("'") + HECKE_SPECTRA_PATH + "' " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("config grammar") {
    const auto c = Config::parse("# sweep\nexperiment = trace\nn = 1..5\nk = 12,16 # weights\nN = 10..20:5\ndelta = 0.25,0.3\n");
    CHECK(c.get("experiment") == "trace");
    CHECK(c.integers("n") == std::vector<std::int64_t>{1, 2, 3, 4, 5});
    CHECK(c.integers("k") == std::vector<std::int64_t>{12, 16});
    CHECK(c.integers("N") == std::vector<std::int64_t>{10, 15, 20});
    CHECK(c.reals("delta") == std::vector<double>{0.25, 0.3});
    CHECK_THROWS_AS(Config::parse("n 5"), ConfigError);
    CHECK_THROWS_AS(Config::parse("n = 1\nn = 2"), ConfigError);
    CHECK_THROWS_AS(Config::parse("n = "), ConfigError);
    CHECK_THROWS_AS(Config::parse("n = x").integers("n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("n = 5..1").integers("n"), ConfigError);
    CHECK_THROWS_AS(Config::load("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("cell expansion") {
    const auto cells = expand_cells("trace", Config::parse("n = 1..3\nk = 12,16\nN = 1"));
    CHECK(cells.size() == 6);
    CHECK_THROWS_AS(expand_cells("nope", Config{}), ConfigError);
    CHECK_THROWS_AS(expand_cells("trace", Config::parse("n = 1\nk = 12")), ConfigError);
    CHECK_THROWS_AS(expand_cells("trace", Config::parse("n = 1\nk = 12\nN = 1\nbogus = 3")), ConfigError);
    CHECK(experiment_names().size() == 9);
}

TEST_CASE("trace record") {
    const auto r = compute_cell(Cell{"trace", {{"n", "2"}, {"k", "12"}, {"N", "1"}}});
    CHECK(r.outputs.at("total") == doctest::Approx(-0.5303300858899106).epsilon(1e-10));
    CHECK_THROWS_AS(compute_cell(Cell{"trace", {{"n", "2"}, {"k", "12"}, {"N", "2"}}}), ConfigError);
}

TEST_CASE("noweight record carries lhs, main term and ratio") {
    const auto r = compute_cell(Cell{"noweight", {{"n", "9120"}, {"N", "1"}, {"delta", "0.25"}}});
    CHECK(r.outputs.count("lhs"));
    CHECK(r.outputs.count("main_term"));
    CHECK(r.outputs.at("ratio") == doctest::Approx(r.outputs.at("lhs") / r.outputs.at("main_term")));
}

TEST_CASE("json lines round trip") {
    ExperimentRecord r;
    r.experiment = "trace";
    r.parameters = {{"n", "2"}, {"note", "a \"quoted\"\tvalue"}};
    r.outputs = {{"x", 0.1}, {"y", -1e-300}, {"z", 1.0 / 3}, {"big", 1e300}};
    r.provenance.timestamp = "2026-01-01T00:00:00Z";
    r.provenance.truncation_bounds = {{"tail", 3.5e-12}};
    const auto line = to_json_line(r);
    CHECK(line.find('\n') == std::string::npos);
    const auto back = record_from_json_line(line);
    CHECK(same_numbers(r, back));
    CHECK(back.parameters == r.parameters);
    CHECK(back.provenance.timestamp == r.provenance.timestamp);
    CHECK(back.provenance.tool_version == kToolVersion);
    auto other = back;
    other.provenance.timestamp = "later";
    CHECK(same_numbers(r, other));
    other.outputs["z"] = std::nextafter(1.0 / 3, 1.0);
    CHECK(!same_numbers(r, other));
}

TEST_CASE("ordered parallel emission") {
    for (unsigned threads : {1u, 3u, 8u}) {
        std::vector<std::size_t> order;
        std::vector<int> done(200, 0);
        parallel_ordered(
            200, threads,
            [&](std::size_t i) {
                std::this_thread::sleep_for(std::chrono::microseconds((i * 37) % 100));
                done[i] = 1;
            },
            [&](std::size_t i) {
                REQUIRE(done[i] == 1);
                order.push_back(i);
            });
        REQUIRE(order.size() == 200);
        for (std::size_t i = 0; i < order.size(); ++i) REQUIRE(order[i] == i);
    }
    CHECK_THROWS(parallel_ordered(10, 4, [](std::size_t i) { if (i == 5) throw std::runtime_error("x"); }, [](std::size_t) {}));
}

TEST_CASE("sweeps are identical across thread counts") {
    const auto cells = expand_cells("trace", Config::parse("n = 1..40\nk = 12,24\nN = 1,41"));
    RunOptions one, many;
    many.threads = 6;
    const auto a = run_cells(cells, one), b = run_cells(cells, many);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(same_numbers(a[i], b[i]));
}

TEST_CASE("memo cache round trip and corruption") {
    const auto dir = scratch_dir("cache");
    {
        MemoCache c(dir.string());
        c.put("H:23", "3");
        c.put("x", encode_double(0.1));
        CHECK(c.get("H:23") == "3");
    }
    {
        MemoCache c(dir.string());
        CHECK(c.get("H:23") == "3");
        CHECK(decode_double(*c.get("x")) == 0.1);
        CHECK(c.discarded_on_load() == 0);
    }
    // damage one byte; the record must be rejected, not trusted
    {
        std::fstream f(dir / "hecke-cache.log", std::ios::in | std::ios::out);
        std::stringstream ss;
        ss << f.rdbuf();
        auto text = ss.str();
        const auto pos = text.find("H:23");
        REQUIRE(pos != std::string::npos);
        text[pos + 3] = '4';
        f.close();
        std::ofstream(dir / "hecke-cache.log", std::ios::trunc) << text;
    }
    {
        MemoCache c(dir.string());
        CHECK(c.discarded_on_load() == 1);
        CHECK(!c.get("H:23"));
        CHECK(!c.get("H:24"));
        CHECK(decode_double(*c.get("x")) == 0.1);
    }
    for (double v : {0.0, -0.0, 1e-310, std::numeric_limits<double>::max(), -2.5}) {
        const double back = decode_double(encode_double(v));
        CHECK(std::signbit(back) == std::signbit(v));
        CHECK(back == v);
    }
    fs::remove_all(dir);
}

TEST_CASE("memo cache under concurrent readers and a writer") {
    MemoCache c;
    for (int i = 0; i < 100; ++i) c.put("k" + std::to_string(i), std::to_string(i));
    std::atomic<bool> bad{false};
    std::vector<std::thread> ts;
    ts.emplace_back([&] {
        for (int i = 100; i < 3000; ++i) c.put("k" + std::to_string(i), std::to_string(i));
    });
    for (int t = 0; t < 4; ++t)
        ts.emplace_back([&] {
            for (int rep = 0; rep < 2000; ++rep) {
                const int i = rep % 3000;
                if (auto v = c.get("k" + std::to_string(i)); v && *v != std::to_string(i)) bad = true;
                if (i < 100 && !c.get("k" + std::to_string(i))) bad = true;
            }
        });
    for (auto& t : ts) t.join();
    CHECK(!bad);
    CHECK(c.size() == 3000);
}

TEST_CASE("command line exit codes and cold/warm runs") {
    const auto dir = scratch_dir("cli");
    std::ofstream(dir / "ok.cfg") << "experiment = trace\nn = 1..6\nk = 12\nN = 1\n";
    std::ofstream(dir / "bad.cfg") << "experiment = trace\nn = 1\n";
    const auto cfg = (dir / "ok.cfg").string();
    const std::string env = "HECKE_CACHE_DIR='" + (dir / "cache").string() + "' ";
    fs::create_directories(dir / "cache");
    CHECK(run_cli("trace --config '" + cfg + "' --out '" + (dir / "cold.jsonl").string() + "' --csv '" +
                  (dir / "out.csv").string() + "'") == 0);
    CHECK(std::system((env + "'" + HECKE_SPECTRA_PATH + "' trace --config '" + cfg + "' --out '" +
                       (dir / "a.jsonl").string() + "' > /dev/null").c_str()) == 0);
    CHECK(std::system((env + "'" + HECKE_SPECTRA_PATH + "' trace --threads 4 --config '" + cfg + "' --out '" +
                       (dir / "b.jsonl").string() + "' > /dev/null").c_str()) == 0);
    auto read = [](const fs::path& p) {
        std::vector<ExperimentRecord> v;
        std::ifstream in(p);
        for (std::string line; std::getline(in, line);) v.push_back(record_from_json_line(line));
        return v;
    };
    const auto a = read(dir / "a.jsonl"), b = read(dir / "b.jsonl"), c = read(dir / "cold.jsonl");
    REQUIRE(a.size() == 6);
    REQUIRE(b.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(same_numbers(a[i], b[i]));
        CHECK(same_numbers(a[i], c[i]));
    }
    std::ifstream csv(dir / "out.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header.find("total") != std::string::npos);
    CHECK(run_cli("trace --config '" + (dir / "bad.cfg").string() + "'") == 2);
    CHECK(run_cli("nosuch --config '" + cfg + "'") == 2);
    CHECK(run_cli("trace --config /nonexistent.cfg") == 2);
    std::ofstream(dir / "v.cfg") << "experiment = verify\nsuite = acceptance\ncriteria = 8\n";
    CHECK(run_cli("verify --config '" + (dir / "v.cfg").string() + "'") == 0);
    fs::remove_all(dir);
}
