#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace eisenhart {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    double seconds = 0.0;
    double limit_seconds = 0.0;  // 0 = no runtime limit
    std::string detail;
};

struct AcceptanceOptions {
    // When non-empty, criterion 9 runs `<cli_path> suite` as a subprocess.
    std::string cli_path;
    bool verbose = false;
};

/// Runs criteria 1-8 (and 9 when a CLI path is given) in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// One line: PASS/FAIL, id, title, runtime and detail.
std::string format_result(const CriterionResult& r);

nlohmann::json to_json(const std::vector<CriterionResult>& results);

}  // namespace eisenhart
