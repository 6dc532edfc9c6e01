#pragma once

#include <string>

#include "epiprox/core.hpp"

namespace epiprox {

struct SelftestResult {
  std::string suite;
  bool passed = false;
  std::string detail;
};

// Oracle-equivalence and invariant checks per subsystem. Tolerances are
// multiplied by the EPIPROX_SELFTEST_TOL env value when set (harness knob).
std::vector<SelftestResult> run_selftests(int threads = 1);

}  // namespace epiprox
