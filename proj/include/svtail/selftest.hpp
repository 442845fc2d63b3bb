#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace svtail::selftest {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Runs every acceptance criterion, printing one pass/fail line per criterion.
// Returns the full result list.
std::vector<CriterionResult> run_all(std::ostream& out);

// True iff every criterion passed.
bool run_acceptance(std::ostream& out);

}  // namespace svtail::selftest
