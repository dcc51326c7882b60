#pragma once
/// @file acceptance.hpp
/// The acceptance suite: one pass/fail verdict per numbered criterion with
/// the measured quantities behind it.

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace hecke {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
    std::map<std::string, double> metrics;
};

struct AcceptanceOptions {
    unsigned threads = 1;
    std::string executable;  // hecke-spectra binary, needed by criterion 11
    std::vector<int> only;   // empty = all
    std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

}  // namespace hecke
