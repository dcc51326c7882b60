#pragma once
/// @file harness.hpp
/// Experiment configuration, JSON-lines records, and the sweep runner.

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hecke {

constexpr const char* kToolVersion = "hecke-spectra 1.0.0";

struct ExperimentRecord {
    std::string experiment;
    std::map<std::string, std::string> parameters;
    std::map<std::string, double> outputs;
    struct Provenance {
        std::string tool_version = kToolVersion;
        std::string timestamp;  // UTC, ISO 8601
        std::map<std::string, double> truncation_bounds;
    } provenance;
};

std::string to_json_line(const ExperimentRecord& r);
ExperimentRecord record_from_json_line(const std::string& line);
/// Equal experiment, parameters, outputs and bounds (bitwise on doubles);
/// timestamps are ignored.
bool same_numbers(const ExperimentRecord& a, const ExperimentRecord& b);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` text; see README for the grammar.
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback = {}) const;
    /// Integer lists: `5`, `1,2,3`, `10..20`, `10..20:2`.
    std::vector<std::int64_t> integers(const std::string& key) const;
    /// Real lists: `0.25` or `0.5,1,2`.
    std::vector<double> reals(const std::string& key) const;
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// One unit of work: an experiment name and scalar parameters.
struct Cell {
    std::string experiment;
    std::map<std::string, std::string> params;
};

const std::vector<std::string>& experiment_names();
/// Expands list-valued config keys into the Cartesian product of cells.
std::vector<Cell> expand_cells(const std::string& name, const Config& config);
ExperimentRecord compute_cell(const Cell& cell);
/// The fixed cross-module sweep used for determinism checks.
std::vector<Cell> determinism_cells();

struct RunOptions {
    unsigned threads = 1;
    std::ostream* stream = nullptr;  // JSON lines as they become ready, in cell order
    std::string out_path;            // JSON lines file
    std::string csv_path;
    std::string executable;          // this program, for the determinism criterion
};

/// Runs cells on a pool; results come back in cell order regardless of the
/// thread count.
std::vector<ExperimentRecord> run_cells(const std::vector<Cell>& cells, const RunOptions& opts);

struct RunOutcome {
    std::vector<ExperimentRecord> records;
    bool verification_failed = false;
};
/// Throws ConfigError for unknown names or malformed configuration.
RunOutcome run_experiment(const std::string& name, const Config& config, const RunOptions& opts);

/// Applies f(i) for i in [0, count) on `threads` workers pulling indices from
/// a shared counter; emit(i) is called in index order as prefixes complete.
void parallel_ordered(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& f,
                      const std::function<void(std::size_t)>& emit);

}  // namespace hecke
