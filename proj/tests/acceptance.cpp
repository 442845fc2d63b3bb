// Acceptance checklist runner: one line per criterion, nonzero exit on any
// failure. Also reachable as `svtail self-test`.

#include <iostream>

#include "svtail/selftest.hpp"

int main() {
    return svtail::selftest::run_acceptance(std::cout) ? 0 : 1;
}
