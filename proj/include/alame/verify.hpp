#pragma once

#include <string>
#include <vector>

namespace alame::verify {

struct Check {
    std::string name;
    double measured; // worst observed deviation
    double tolerance;
    bool pass;
};

struct Report {
    std::string suite;
    std::vector<Check> checks;
    bool all_pass() const;
};

/// suite: "elliptic", "frobenius", "bloch", "susy", or "all".
Report run_suite(const std::string& suite);

std::string report_text(const Report& rep);
std::string report_json(const Report& rep);

} // namespace alame::verify
